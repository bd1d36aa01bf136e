#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "nonloc/bipartition.hpp"
#include "nonloc/common.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

namespace detail {

/// For every global flat index, the (row, col) coordinates of the regrouped
/// matrix: rows flatten the block-A parties in ascending order, columns the
/// block-B parties.
struct RegroupIndex {
  std::vector<long> row_of;
  std::vector<long> col_of;
  long rows = 1;
  long cols = 1;
};

inline RegroupIndex regroup_index(const std::vector<int>& dims, const Bipartition& cut) {
  if (cut.party_count() != static_cast<int>(dims.size()))
    throw shape_error("bipartition is over " + std::to_string(cut.party_count()) +
                      " parties but the state has " + std::to_string(dims.size()));
  RegroupIndex ix;
  for (int p : cut.block_a()) ix.rows *= dims[static_cast<size_t>(p)];
  for (int p : cut.block_b()) ix.cols *= dims[static_cast<size_t>(p)];
  const long total = product_of_dims(dims);
  ix.row_of.resize(static_cast<size_t>(total));
  ix.col_of.resize(static_cast<size_t>(total));
  for (long g = 0; g < total; ++g) {
    const std::vector<int> digits = unflatten_label(dims, g);
    long r = 0;
    for (int p : cut.block_a()) r = r * dims[static_cast<size_t>(p)] + digits[static_cast<size_t>(p)];
    long c = 0;
    for (int p : cut.block_b()) c = c * dims[static_cast<size_t>(p)] + digits[static_cast<size_t>(p)];
    ix.row_of[static_cast<size_t>(g)] = r;
    ix.col_of[static_cast<size_t>(g)] = c;
  }
  return ix;
}

}  // namespace detail

/// Amplitude matrix of the state across a bipartition. Entry (r, c) is the
/// amplitude of the basis label whose block-A parties flatten to r and whose
/// block-B parties flatten to c. A pure index permutation: Frobenius norm 1.
inline Eigen::MatrixXcd regroup(const StateVector& state, const Bipartition& cut) {
  const detail::RegroupIndex ix = detail::regroup_index(state.dims(), cut);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ix.rows, ix.cols);
  for (long g = 0; g < state.total_dim(); ++g)
    m(ix.row_of[static_cast<size_t>(g)], ix.col_of[static_cast<size_t>(g)]) =
        state.amplitudes()[g];
  return m;
}

/// Inverse of regroup: reproduces the amplitude vector bit-exactly.
inline StateVector regroup_inverse(const Eigen::MatrixXcd& m, const Bipartition& cut,
                                   const std::vector<int>& dims, std::string label = "") {
  const detail::RegroupIndex ix = detail::regroup_index(dims, cut);
  if (m.rows() != ix.rows || m.cols() != ix.cols)
    throw shape_error("matrix shape does not match the bipartition's grouped dimensions");
  Eigen::VectorXcd amps(product_of_dims(dims));
  for (long g = 0; g < amps.size(); ++g)
    amps[g] = m(ix.row_of[static_cast<size_t>(g)], ix.col_of[static_cast<size_t>(g)]);
  return StateVector::from_unit_amplitudes(dims, std::move(amps), std::move(label));
}

/// Schmidt spectrum of a unit-Frobenius-norm amplitude matrix.
struct SchmidtData {
  Eigen::VectorXd singular_values;  // nonincreasing
  int rank = 0;                     // values above the rank tolerance
  double max_deviation_from_flat = 0.0;  // max_i |sigma_i - 1/sqrt(rank)|
};

inline SchmidtData schmidt(const Eigen::MatrixXcd& m) {
  const Tolerances& tol = tolerances();
  const double norm = m.norm();
  if (std::abs(norm - 1.0) > tol.schmidt_norm)
    throw precondition_error("schmidt requires Frobenius norm 1, got " + std::to_string(norm));
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  SchmidtData out;
  out.singular_values = svd.singularValues();
  for (long i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values[i] > tol.rank) ++out.rank;
  const double flat = out.rank > 0 ? 1.0 / std::sqrt(static_cast<double>(out.rank)) : 0.0;
  for (long i = 0; i < out.singular_values.size(); ++i)
    out.max_deviation_from_flat =
        std::max(out.max_deviation_from_flat, std::abs(out.singular_values[i] - flat));
  return out;
}

/// A dim-dimensional subspace of an ambient grouped space, held as a
/// column-orthonormal basis matrix.
struct Subspace {
  long ambient_dim = 0;
  Eigen::MatrixXcd basis;  // ambient_dim x dim, orthonormal columns

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Modified Gram-Schmidt over the columns in their given order, dropping
/// columns whose residual falls below drop_tol. Deterministic: no pivoting.
inline Eigen::MatrixXcd orthonormalize_columns(const Eigen::MatrixXcd& cols, double drop_tol) {
  Eigen::MatrixXcd basis(cols.rows(), cols.cols());
  long kept = 0;
  for (long j = 0; j < cols.cols(); ++j) {
    Eigen::VectorXcd v = cols.col(j);
    // two projection passes for numerical safety
    for (int pass = 0; pass < 2; ++pass)
      for (long k = 0; k < kept; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    const double norm = v.norm();
    if (norm > drop_tol) basis.col(kept++) = v / norm;
  }
  return basis.leftCols(kept);
}

/// Column space of the regrouped matrix (side A) or of its conjugate
/// transpose (side B): the state's reduced support on that side. The basis is
/// built by orthogonalizing columns in ascending flattened-basis order.
inline Subspace reduced_support(const StateVector& state, const Bipartition& cut, Side side) {
  const Eigen::MatrixXcd m = regroup(state, cut);
  const Eigen::MatrixXcd cols = (side == Side::A) ? m : Eigen::MatrixXcd(m.adjoint());
  Subspace s;
  s.ambient_dim = cols.rows();
  s.basis = orthonormalize_columns(cols, tolerances().rank);
  return s;
}

/// Reduced density matrix of a single party, rho = M M^H with M the regrouped
/// matrix for the split {party} | rest.
inline Eigen::MatrixXcd reduced_density(const StateVector& state, int party) {
  const int n = state.party_count();
  if (party < 0 || party >= n) throw parameter_error("party index out of range");
  std::vector<int> a{party};
  std::vector<int> b;
  for (int p = 0; p < n; ++p)
    if (p != party) b.push_back(p);
  const Eigen::MatrixXcd m = regroup(state, Bipartition(a, b, n));
  return m * m.adjoint();
}

}  // namespace nonloc

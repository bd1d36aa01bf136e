#pragma once

// Shared helpers for the test suites: an independent dense-operator route to
// the orthogonality-preserving constraint system, a Gaussian-elimination rank,
// deterministic random states, and a small process runner for CLI checks.

#include <Eigen/Dense>
#include <cstdio>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "nonloc/bipartition.hpp"
#include "nonloc/schmidt.hpp"
#include "nonloc/state.hpp"

namespace testsupport {

/// Dense full-space operator acting as |a><b| on the chosen side of the cut
/// and as identity on the other side, assembled in the original tensor basis.
/// Deliberately avoids the regrouped-matrix shortcut used by the library.
inline Eigen::MatrixXcd side_unit_operator(const std::vector<int>& dims,
                                           const nonloc::Bipartition& cut, nonloc::Side side,
                                           long a, long b) {
  const nonloc::detail::RegroupIndex ix = nonloc::detail::regroup_index(dims, cut);
  const long total = nonloc::product_of_dims(dims);
  auto mine = [&](long g) { return side == nonloc::Side::A ? ix.row_of[static_cast<size_t>(g)]
                                                           : ix.col_of[static_cast<size_t>(g)]; };
  auto other = [&](long g) { return side == nonloc::Side::A ? ix.col_of[static_cast<size_t>(g)]
                                                            : ix.row_of[static_cast<size_t>(g)]; };
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(total, total);
  for (long g1 = 0; g1 < total; ++g1)
    for (long g2 = 0; g2 < total; ++g2)
      if (mine(g1) == a && mine(g2) == b && other(g1) == other(g2)) op(g1, g2) = 1.0;
  return op;
}

/// <psi_i| O |psi_j> for the dense operator above.
inline nonloc::cd sandwich(const nonloc::StateVector& psi_i, const Eigen::MatrixXcd& op,
                           const nonloc::StateVector& psi_j) {
  return psi_i.amplitudes().dot(op * psi_j.amplitudes());
}

/// Constraint matrix over Hermitian E on the measured side, built from dense
/// operators with the plain parametrization (diagonal entries, then real and
/// imaginary off-diagonal parts without scaling). Rows: two per ordered pair.
inline Eigen::MatrixXd oracle_constraint_matrix(const nonloc::StateSet& set,
                                                const nonloc::Bipartition& cut,
                                                nonloc::Side side) {
  long d = 1;
  for (int p : cut.block(side)) d *= set.dims[static_cast<size_t>(p)];
  const long n = static_cast<long>(set.size());

  // v[p](a,b) = <psi_i| (|a><b| on side) |psi_j> for pair p = (i, j)
  std::vector<Eigen::MatrixXcd> v;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      Eigen::MatrixXcd m(d, d);
      for (long a = 0; a < d; ++a)
        for (long b = 0; b < d; ++b)
          m(a, b) = sandwich(set.states[static_cast<size_t>(i)],
                             side_unit_operator(set.dims, cut, side, a, b),
                             set.states[static_cast<size_t>(j)]);
      v.push_back(std::move(m));
    }

  Eigen::MatrixXd out(2 * static_cast<long>(v.size()), d * d);
  for (size_t p = 0; p < v.size(); ++p) {
    // complex coefficient of each real parameter in sum_ab E_ab v_ab
    Eigen::VectorXcd coeff(d * d);
    long at = 0;
    for (long k = 0; k < d; ++k) coeff[at++] = v[p](k, k);
    for (long a = 0; a < d; ++a)
      for (long b = a + 1; b < d; ++b) {
        coeff[at++] = v[p](a, b) + v[p](b, a);
        coeff[at++] = nonloc::cd(0.0, 1.0) * (v[p](a, b) - v[p](b, a));
      }
    out.row(2 * static_cast<long>(p)) = coeff.real();
    out.row(2 * static_cast<long>(p) + 1) = coeff.imag();
  }
  return out;
}

/// Row-echelon rank with partial pivoting. Pivot threshold sits far above
/// roundoff and far below any genuine pivot of these systems.
inline long gaussian_rank(Eigen::MatrixXd m, double threshold = 1e-7) {
  long rank = 0;
  const long rows = m.rows();
  const long cols = m.cols();
  for (long col = 0; col < cols && rank < rows; ++col) {
    long pivot = rank;
    for (long r = rank + 1; r < rows; ++r)
      if (std::abs(m(r, col)) > std::abs(m(pivot, col))) pivot = r;
    if (std::abs(m(pivot, col)) <= threshold) continue;
    m.row(pivot).swap(m.row(rank));
    for (long r = rank + 1; r < rows; ++r) {
      const double f = m(r, col) / m(rank, col);
      m.row(r) -= f * m.row(rank);
    }
    ++rank;
  }
  return rank;
}

/// Independent solution-space dimension: D^2 minus the rank of the dense
/// oracle constraint matrix.
inline long oracle_opm_space_dim(const nonloc::StateSet& set, const nonloc::Bipartition& cut,
                                 nonloc::Side side) {
  long d = 1;
  for (int p : cut.block(side)) d *= set.dims[static_cast<size_t>(p)];
  if (set.size() < 2) return d * d;
  return d * d - gaussian_rank(oracle_constraint_matrix(set, cut, side));
}

/// Deterministic random unit state.
inline nonloc::StateVector random_state(std::mt19937& rng, const std::vector<int>& dims) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd amps(nonloc::product_of_dims(dims));
  for (long i = 0; i < amps.size(); ++i) amps[i] = nonloc::cd(gauss(rng), gauss(rng));
  return nonloc::StateVector(dims, std::move(amps));
}

/// Random canonical bipartition of n parties.
inline nonloc::Bipartition random_bipartition(std::mt19937& rng, int n) {
  std::uniform_int_distribution<unsigned long> pick(0, (1ul << (n - 1)) - 2ul);
  const unsigned long mask = pick(rng);
  std::vector<int> a{0};
  std::vector<int> b;
  for (int p = 1; p < n; ++p) {
    if (mask & (1ul << (p - 1)))
      a.push_back(p);
    else
      b.push_back(p);
  }
  return nonloc::Bipartition(a, b, n);
}

/// Schmidt values by an eigen-decomposition of the reduced density matrix:
/// the square roots of the eigenvalues of M M^H, sorted nonincreasing.
inline Eigen::VectorXd schmidt_values_by_density(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd rho = m * m.adjoint();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
  const long keep = std::min(m.rows(), m.cols());
  Eigen::VectorXd values(keep);
  for (long i = 0; i < keep; ++i) {
    const double lambda = eig.eigenvalues()[m.rows() - 1 - i];  // ascending order in Eigen
    values[i] = std::sqrt(std::max(0.0, lambda));
  }
  return values;
}

struct CommandResult {
  int exit_code = -1;
  std::string output;
};

/// Run a shell command, capturing stdout+stderr and the exit code.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult result;
  const std::string full = cmd + " 2>&1";
  FILE* pipe = popen(full.c_str(), "r");
  if (!pipe) return result;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, n);
  const int status = pclose(pipe);
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  return result;
}

}  // namespace testsupport

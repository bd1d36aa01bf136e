#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nonloc/bipartition.hpp"
#include "nonloc/common.hpp"
#include "nonloc/schmidt.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

/// A diagonal projector onto grouped computational basis vectors that
/// preserves orthogonality on both outcomes and eliminates at least one state
/// on each.
struct Eliminator {
  std::vector<long> basis_indices;  // P = sum over these |b><b|
  std::vector<int> eliminated;      // states annihilated by P
  std::vector<int> complement_eliminated;  // states annihilated by I - P
};

/// Solution space of the orthogonality-preserving constraint system over
/// Hermitian operators on the measured side.
struct OpmReport {
  Bipartition cut;
  Side measured_side = Side::A;
  long space_dim = 0;
  bool trivial = false;
  std::vector<Eigen::MatrixXcd> hermitian_basis;  // filled when requested
  std::optional<Eliminator> eliminator;
};

namespace detail {

inline std::vector<Eigen::MatrixXcd> regroup_all(const StateSet& set, const Bipartition& cut) {
  std::vector<Eigen::MatrixXcd> ms;
  ms.reserve(set.size());
  for (const StateVector& s : set.states) ms.push_back(regroup(s, cut));
  return ms;
}

/// Real parametrization of Hermitian D x D matrices by a trace-orthonormal
/// basis: D diagonal elements, then for each a < b (lex order) the symmetric
/// and antisymmetric off-diagonal elements.
inline long hermitian_param_count(long d) { return d * d; }

inline Eigen::MatrixXcd hermitian_from_params(const Eigen::VectorXd& t, long d) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(d, d);
  long at = 0;
  for (long k = 0; k < d; ++k) e(k, k) = t[at++];
  for (long a = 0; a < d; ++a)
    for (long b = a + 1; b < d; ++b) {
      const double re = t[at++] * inv_sqrt2;
      const double im = t[at++] * inv_sqrt2;
      e(a, b) = cd(re, im);
      e(b, a) = cd(re, -im);
    }
  return e;
}

/// Two real constraint rows (real and imaginary part) for the pair overlap
/// matrix X, where the constraint is sum_ab E_ab X_ab = 0.
inline void constraint_rows(const Eigen::MatrixXcd& x, Eigen::VectorXd& row_re,
                            Eigen::VectorXd& row_im) {
  const long d = x.rows();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  row_re.resize(d * d);
  row_im.resize(d * d);
  long at = 0;
  for (long k = 0; k < d; ++k) {
    row_re[at] = x(k, k).real();
    row_im[at] = x(k, k).imag();
    ++at;
  }
  for (long a = 0; a < d; ++a)
    for (long b = a + 1; b < d; ++b) {
      const cd plus = (x(a, b) + x(b, a)) * inv_sqrt2;
      const cd minus = cd(0.0, 1.0) * (x(a, b) - x(b, a)) * inv_sqrt2;
      row_re[at] = plus.real();
      row_im[at] = plus.imag();
      ++at;
      row_re[at] = minus.real();
      row_im[at] = minus.imag();
      ++at;
    }
}

/// Overlap matrix X for the pair (i, j): X_ab = <psi_i| (|a><b| (x) I) |psi_j>
/// on side A, and the mirrored expression on side B.
inline Eigen::MatrixXcd pair_overlap(const Eigen::MatrixXcd& mi, const Eigen::MatrixXcd& mj,
                                     Side side) {
  if (side == Side::A) return mi.conjugate() * mj.transpose();
  return mi.adjoint() * mj;
}

inline Eigen::MatrixXd opm_constraint_matrix(const std::vector<Eigen::MatrixXcd>& ms, Side side) {
  const long n = static_cast<long>(ms.size());
  const long d = (side == Side::A) ? ms.front().rows() : ms.front().cols();
  const long pairs = n * (n - 1) / 2;
  Eigen::MatrixXd a(2 * pairs, hermitian_param_count(d));
  Eigen::VectorXd row_re, row_im;
  long at = 0;
  for (long i = 0; i < n; ++i)
    for (long j = i + 1; j < n; ++j) {
      constraint_rows(pair_overlap(ms[static_cast<size_t>(i)], ms[static_cast<size_t>(j)], side),
                      row_re, row_im);
      a.row(at++) = row_re;
      a.row(at++) = row_im;
    }
  return a;
}

}  // namespace detail

/// Dimension (and optionally a trace-orthonormal Hermitian basis) of the real
/// solution space of <psi_i|(E (x) I)|psi_j> = 0 for all i < j over Hermitian
/// E on the measured side. The identity always solves; the space is trivial
/// when nothing else does.
inline OpmReport opm_solution_space(const StateSet& set, const Bipartition& cut, Side side,
                                    bool with_basis = false) {
  if (set.states.empty()) throw degenerate_input_error("OPM analysis of an empty set");
  const auto ms = detail::regroup_all(set, cut);
  const long d = (side == Side::A) ? ms.front().rows() : ms.front().cols();
  const long params = detail::hermitian_param_count(d);

  OpmReport report{cut, side};

  if (set.size() < 2) {
    // no constraints at all
    report.space_dim = params;
    report.trivial = (report.space_dim == 1);
    if (with_basis)
      for (long k = 0; k < params; ++k)
        report.hermitian_basis.push_back(
            detail::hermitian_from_params(Eigen::VectorXd::Unit(params, k), d));
    return report;
  }

  const Eigen::MatrixXd a = detail::opm_constraint_matrix(ms, side);
  const double threshold = tolerances().opm_nullspace;
  if (with_basis) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    long rank = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > threshold) ++rank;
    report.space_dim = params - rank;
    for (long i = rank; i < params; ++i)
      report.hermitian_basis.push_back(detail::hermitian_from_params(svd.matrixV().col(i), d));
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
    long rank = 0;
    for (long i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > threshold) ++rank;
    report.space_dim = params - rank;
  }
  report.trivial = (report.space_dim == 1);
  return report;
}

/// Search for an orthogonality-preserving basis projector over unions of
/// support-pattern classes (grouped basis vectors appearing in exactly the
/// same states). Returns the first acceptable projector in canonical order
/// (by union size, then class indices), or nothing if none qualifies.
inline std::optional<Eliminator> find_eliminator(const StateSet& set, const Bipartition& cut,
                                                 Side side) {
  if (set.states.empty()) throw degenerate_input_error("eliminator search on an empty set");
  const auto ms = detail::regroup_all(set, cut);
  const long n = static_cast<long>(ms.size());
  const long d = (side == Side::A) ? ms.front().rows() : ms.front().cols();
  const Tolerances& tol = tolerances();

  // per-state squared weight on each grouped basis vector
  Eigen::MatrixXd weight(n, d);
  for (long i = 0; i < n; ++i)
    for (long b = 0; b < d; ++b)
      weight(i, b) = (side == Side::A) ? ms[static_cast<size_t>(i)].row(b).squaredNorm()
                                       : ms[static_cast<size_t>(i)].col(b).squaredNorm();

  // support-pattern classes keyed by the set of states a basis vector appears in
  std::map<std::vector<bool>, std::vector<long>> by_pattern;
  for (long b = 0; b < d; ++b) {
    std::vector<bool> pattern(static_cast<size_t>(n));
    for (long i = 0; i < n; ++i)
      pattern[static_cast<size_t>(i)] = weight(i, b) > tol.support_amplitude * tol.support_amplitude;
    by_pattern[pattern].push_back(b);
  }
  std::vector<std::vector<long>> classes;
  classes.reserve(by_pattern.size());
  for (auto& [pattern, members] : by_pattern) classes.push_back(members);
  std::sort(classes.begin(), classes.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  const long c = static_cast<long>(classes.size());
  if (c < 2) return std::nullopt;

  // per-pair per-basis overlaps, so any candidate is checked by summation
  std::vector<std::pair<int, int>> pair_of;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pair_of.emplace_back(i, j);
  Eigen::MatrixXcd overlap(static_cast<long>(pair_of.size()), d);
  for (size_t p = 0; p < pair_of.size(); ++p) {
    const auto& mi = ms[static_cast<size_t>(pair_of[p].first)];
    const auto& mj = ms[static_cast<size_t>(pair_of[p].second)];
    for (long b = 0; b < d; ++b)
      overlap(static_cast<long>(p), b) =
          (side == Side::A) ? mi.row(b).conjugate().cwiseProduct(mj.row(b)).sum()
                            : mi.col(b).conjugate().cwiseProduct(mj.col(b)).sum();
  }
  Eigen::VectorXcd full_overlap = overlap.rowwise().sum();

  auto try_union = [&](const std::vector<long>& chosen_classes) -> std::optional<Eliminator> {
    Eigen::VectorXd kept = Eigen::VectorXd::Zero(n);
    Eigen::VectorXcd constraint = Eigen::VectorXcd::Zero(static_cast<long>(pair_of.size()));
    std::vector<long> basis_indices;
    for (long ci : chosen_classes)
      for (long b : classes[static_cast<size_t>(ci)]) {
        basis_indices.push_back(b);
        kept += weight.col(b);
        constraint += overlap.col(b);
      }
    for (long p = 0; p < constraint.size(); ++p) {
      if (std::abs(constraint[p]) > tol.projector) return std::nullopt;
      if (std::abs(full_overlap[p] - constraint[p]) > tol.projector) return std::nullopt;
    }
    std::vector<int> eliminated, complement_eliminated;
    const double cutoff = tol.projector * tol.projector;
    for (long i = 0; i < n; ++i) {
      if (kept[i] <= cutoff) eliminated.push_back(static_cast<int>(i));
      const double total = weight.row(i).sum();
      if (total - kept[i] <= cutoff) complement_eliminated.push_back(static_cast<int>(i));
    }
    if (eliminated.empty() || complement_eliminated.empty()) return std::nullopt;
    std::sort(basis_indices.begin(), basis_indices.end());
    return Eliminator{std::move(basis_indices), std::move(eliminated),
                      std::move(complement_eliminated)};
  };

  // unions enumerated by size then lexicographic class indices; capped so the
  // search stays bounded on large grouped sides (absence is inconclusive)
  long examined = 0;
  const long cap = 1l << 20;
  for (long size = 1; size < c; ++size) {
    std::vector<long> combo(static_cast<size_t>(size));
    for (long i = 0; i < size; ++i) combo[static_cast<size_t>(i)] = i;
    while (true) {
      if (++examined > cap) return std::nullopt;
      if (auto found = try_union(combo)) return found;
      long i = size - 1;
      while (i >= 0 && combo[static_cast<size_t>(i)] == c - size + i) --i;
      if (i < 0) break;
      ++combo[static_cast<size_t>(i)];
      for (long j = i + 1; j < size; ++j)
        combo[static_cast<size_t>(j)] = combo[static_cast<size_t>(j - 1)] + 1;
    }
  }
  return std::nullopt;
}

}  // namespace nonloc

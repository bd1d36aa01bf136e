#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "nonloc/bipartition.hpp"
#include "nonloc/common.hpp"
#include "nonloc/schmidt.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

/// The effective bipartite system spanned by a state subset across a
/// bipartition: the union of their reduced supports on each side.
struct EffectiveFrame {
  Bipartition cut;
  Subspace subspace_a;
  Subspace subspace_b;

  int dim_a() const { return subspace_a.dim(); }
  int dim_b() const { return subspace_b.dim(); }
  bool square() const { return dim_a() == dim_b(); }
};

/// Frame of a subset of a set's states. Bases are built by orthogonalizing
/// the stacked member supports in member order, deterministically.
inline EffectiveFrame effective_frame(const StateSet& set, std::vector<int> member_indices,
                                      const Bipartition& cut) {
  if (member_indices.empty()) throw degenerate_input_error("frame of an empty state subset");
  std::sort(member_indices.begin(), member_indices.end());
  for (int i : member_indices)
    if (i < 0 || i >= static_cast<int>(set.size()))
      throw parameter_error("state index " + std::to_string(i) + " out of range for a set of " +
                            std::to_string(set.size()) + " states");

  auto stack_side = [&](Side side) {
    std::vector<Subspace> supports;
    supports.reserve(member_indices.size());
    long ambient = 0;
    long total_cols = 0;
    for (int i : member_indices) {
      supports.push_back(reduced_support(set.states[static_cast<size_t>(i)], cut, side));
      ambient = supports.back().ambient_dim;
      total_cols += supports.back().dim();
    }
    Eigen::MatrixXcd stacked(ambient, total_cols);
    long at = 0;
    for (const Subspace& s : supports) {
      stacked.middleCols(at, s.dim()) = s.basis;
      at += s.dim();
    }
    Subspace out;
    out.ambient_dim = ambient;
    out.basis = orthonormalize_columns(stacked, tolerances().rank);
    return out;
  };

  return EffectiveFrame{cut, stack_side(Side::A), stack_side(Side::B)};
}

/// Frobenius norm of the part of the state's regrouped matrix outside the
/// frame's row/column subspaces.
inline double frame_residual(const StateVector& state, const EffectiveFrame& frame) {
  const Eigen::MatrixXcd m = regroup(state, frame.cut);
  const Eigen::MatrixXcd coords = frame.subspace_a.basis.adjoint() * m * frame.subspace_b.basis;
  const double inside = coords.squaredNorm();
  return std::sqrt(std::max(0.0, m.squaredNorm() - inside));
}

/// Coordinates of the state in the frame bases: B_a^H * regroup(state) * B_b.
/// Throws support_error if the state does not lie inside the frame.
inline Eigen::MatrixXcd restrict_to_frame(const StateVector& state, const EffectiveFrame& frame) {
  const Eigen::MatrixXcd m = regroup(state, frame.cut);
  const Eigen::MatrixXcd coords = frame.subspace_a.basis.adjoint() * m * frame.subspace_b.basis;
  const double residual = std::sqrt(std::max(0.0, m.squaredNorm() - coords.squaredNorm()));
  if (residual > tolerances().frame_residual)
    throw support_error("state '" + state.label() + "' lies outside the frame (residual " +
                            std::to_string(residual) + ")",
                        residual);
  return coords;
}

struct MesCheck {
  bool is_mes = false;
  SchmidtData data;
};

/// Maximal entanglement within the frame: square frame and a flat Schmidt
/// spectrum of the restricted matrix at full rank.
inline MesCheck is_mes_in_frame(const StateVector& state, const EffectiveFrame& frame) {
  MesCheck out;
  out.data = schmidt(restrict_to_frame(state, frame));
  out.is_mes = frame.square() && out.data.rank == frame.dim_a() &&
               out.data.max_deviation_from_flat <= tolerances().flat_spectrum;
  return out;
}

}  // namespace nonloc

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nonloc/bipartition.hpp"
#include "nonloc/common.hpp"
#include "nonloc/frame.hpp"
#include "nonloc/opm.hpp"
#include "nonloc/schmidt.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

/// A certified sub-family: every member is maximally entangled on the common
/// effective r x r frame, and there are at least r + 1 members. Combined with
/// the trusted premise this certifies local indistinguishability of the whole
/// set across the bipartition.
struct MesWitness {
  Bipartition cut;
  std::vector<int> member_indices;  // sorted
  EffectiveFrame frame;
  int effective_dim = 0;
  std::vector<SchmidtData> member_schmidt;  // aligned with member_indices
};

/// Facts attached to a bipartition that could not be certified: the frame of
/// the full set and each state's Schmidt rank across the cut.
struct CutDiagnostics {
  int frame_dim_a = 0;
  int frame_dim_b = 0;
  std::vector<int> state_ranks;
};

enum class CutVerdict { Certified, Uncertified };

struct CutReport {
  Bipartition cut;
  CutVerdict verdict = CutVerdict::Uncertified;
  std::optional<MesWitness> witness;
  std::optional<CutDiagnostics> diagnostics;
  std::optional<OpmReport> opm_a;
  std::optional<OpmReport> opm_b;
};

enum class OverallVerdict { StronglyNonlocalCertified, NotCertified };

inline const char* verdict_name(CutVerdict v) {
  return v == CutVerdict::Certified ? "CERTIFIED" : "UNCERTIFIED";
}

inline const char* verdict_name(OverallVerdict v) {
  return v == OverallVerdict::StronglyNonlocalCertified ? "STRONGLY_NONLOCAL_CERTIFIED"
                                                        : "NOT_CERTIFIED";
}

/// The trusted premise every certificate leans on, stated once and attached
/// to every report.
inline const char* premise_note() {
  return "Trusted premise: in an r x r bipartite system, any r+1 maximally entangled states "
         "cannot be perfectly distinguished by LOCC. Witness certificates embed members into a "
         "common r x r effective frame and apply subset monotonicity: a protocol distinguishing "
         "the full set would distinguish the witness subset. Verdicts cover two-block groupings "
         "of the parties only; groupings into three or more blocks are outside this report.";
}

struct CertifyOptions {
  bool run_opm = true;
  std::optional<std::vector<int>> hint;  // tried first on every bipartition
};

struct CertificationReport {
  std::string set_label;
  std::vector<int> dims;
  ConstructionParams params;
  long state_count = 0;
  std::string premise;
  std::vector<CutReport> cuts;
  OverallVerdict overall = OverallVerdict::NotCertified;
};

namespace detail {

/// The nonzero cells of a regrouped matrix, the grouping key for the witness
/// search: states sharing a cell pattern live on the same frame by
/// construction.
inline std::vector<std::pair<long, long>> support_cells(const Eigen::MatrixXcd& m) {
  std::vector<std::pair<long, long>> cells;
  const double tol = tolerances().support_amplitude;
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c)
      if (std::abs(m(r, c)) > tol) cells.emplace_back(r, c);
  return cells;
}

inline std::optional<MesWitness> witness_from_members(const StateSet& set, const Bipartition& cut,
                                                      std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  const EffectiveFrame frame = effective_frame(set, members, cut);
  if (!frame.square()) return std::nullopt;
  const int r = frame.dim_a();
  if (static_cast<int>(members.size()) < r + 1) return std::nullopt;
  std::vector<SchmidtData> data;
  data.reserve(members.size());
  try {
    for (int i : members) {
      const MesCheck check = is_mes_in_frame(set.states[static_cast<size_t>(i)], frame);
      if (!check.is_mes) return std::nullopt;
      data.push_back(check.data);
    }
  } catch (const support_error&) {
    // a member outside its own subset's frame cannot happen for exact inputs,
    // but a noisy hinted member can land here: the hint simply fails
    return std::nullopt;
  }
  return MesWitness{cut, std::move(members), frame, r, std::move(data)};
}

}  // namespace detail

/// Find an embedded witness for the bipartition. With a hint, the hinted
/// subset is validated as-is. Without one, states are grouped by identical
/// support pattern; each group's frame is greedily extended with further
/// frame-compatible maximally entangled states until the witness size r + 1
/// is reached. The first group that yields a valid witness wins.
inline std::optional<MesWitness> find_mes_witness(const StateSet& set, const Bipartition& cut,
                                                  const std::optional<std::vector<int>>& hint = {}) {
  if (hint) {
    for (int i : *hint)
      if (i < 0 || i >= static_cast<int>(set.size()))
        throw parameter_error("hint index " + std::to_string(i) + " out of range for a set of " +
                              std::to_string(set.size()) + " states");
    if (hint->empty()) throw parameter_error("hint must name at least one state");
    return detail::witness_from_members(set, cut, *hint);
  }

  const int n = static_cast<int>(set.size());
  std::vector<std::vector<std::pair<long, long>>> cells(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    cells[static_cast<size_t>(i)] = detail::support_cells(regroup(set.states[static_cast<size_t>(i)], cut));

  // groups in order of first appearance
  std::map<std::vector<std::pair<long, long>>, int> group_of;
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < n; ++i) {
    auto [it, inserted] = group_of.try_emplace(cells[static_cast<size_t>(i)],
                                               static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[static_cast<size_t>(it->second)].push_back(i);
  }

  const double residual_tol = tolerances().frame_residual;
  for (const std::vector<int>& group : groups) {
    const EffectiveFrame frame = effective_frame(set, group, cut);
    if (!frame.square()) continue;
    const int r = frame.dim_a();

    std::vector<int> members = group;
    std::vector<SchmidtData> data;
    bool group_ok = true;
    for (int i : group) {
      const MesCheck check = is_mes_in_frame(set.states[static_cast<size_t>(i)], frame);
      if (!check.is_mes) {
        group_ok = false;
        break;
      }
      data.push_back(check.data);
    }
    if (!group_ok) continue;

    for (int i = 0; i < n && static_cast<int>(members.size()) < r + 1; ++i) {
      if (std::find(members.begin(), members.end(), i) != members.end()) continue;
      const StateVector& s = set.states[static_cast<size_t>(i)];
      if (frame_residual(s, frame) > residual_tol) continue;
      const MesCheck check = is_mes_in_frame(s, frame);
      if (!check.is_mes) continue;
      members.push_back(i);
      data.push_back(check.data);
    }
    if (static_cast<int>(members.size()) < r + 1) continue;

    std::vector<size_t> order(members.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&members](size_t x, size_t y) { return members[x] < members[y]; });
    MesWitness w{cut, {}, frame, r, {}};
    for (size_t i : order) {
      w.member_indices.push_back(members[i]);
      w.member_schmidt.push_back(data[i]);
    }
    return w;
  }
  return std::nullopt;
}

/// Re-check a witness from scratch: rebuild the frame from the member indices
/// and verify the flat spectrum of every member. Certificates are
/// self-contained, so this takes only the set and the witness.
inline bool revalidate_witness(const StateSet& set, const MesWitness& w) {
  try {
    const EffectiveFrame frame = effective_frame(set, w.member_indices, w.cut);
    if (!frame.square() || frame.dim_a() != w.effective_dim) return false;
    if (static_cast<int>(w.member_indices.size()) < w.effective_dim + 1) return false;
    for (int i : w.member_indices)
      if (!is_mes_in_frame(set.states[static_cast<size_t>(i)], frame).is_mes) return false;
    return true;
  } catch (const error&) {
    return false;
  }
}

/// Full certification: witness search on every canonical bipartition plus
/// orthogonality-preserving-measurement analysis of both sides. The overall
/// verdict is the conjunction over bipartitions.
inline CertificationReport certify(const StateSet& set, const CertifyOptions& options = {}) {
  require_orthonormal(set, tolerances().orthogonality);

  CertificationReport report;
  report.set_label = set.label;
  report.dims = set.dims;
  report.params = set.params;
  report.state_count = static_cast<long>(set.size());
  report.premise = premise_note();

  bool all_certified = true;
  for (const Bipartition& cut : enumerate_bipartitions(set.party_count())) {
    CutReport entry{cut};

    std::optional<MesWitness> witness;
    if (options.hint) witness = find_mes_witness(set, cut, options.hint);
    if (!witness) witness = find_mes_witness(set, cut);

    if (witness) {
      entry.verdict = CutVerdict::Certified;
      entry.witness = std::move(witness);
    } else {
      entry.verdict = CutVerdict::Uncertified;
      all_certified = false;
      CutDiagnostics diag;
      std::vector<int> everyone(set.size());
      for (size_t i = 0; i < set.size(); ++i) everyone[i] = static_cast<int>(i);
      const EffectiveFrame full = effective_frame(set, everyone, cut);
      diag.frame_dim_a = full.dim_a();
      diag.frame_dim_b = full.dim_b();
      for (const StateVector& s : set.states)
        diag.state_ranks.push_back(schmidt(regroup(s, cut)).rank);
      entry.diagnostics = std::move(diag);
    }

    if (options.run_opm) {
      entry.opm_a = opm_solution_space(set, cut, Side::A);
      entry.opm_a->eliminator = find_eliminator(set, cut, Side::A);
      entry.opm_b = opm_solution_space(set, cut, Side::B);
      entry.opm_b->eliminator = find_eliminator(set, cut, Side::B);
    }
    report.cuts.push_back(std::move(entry));
  }
  report.overall =
      all_certified ? OverallVerdict::StronglyNonlocalCertified : OverallVerdict::NotCertified;
  return report;
}

}  // namespace nonloc

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "nonloc/common.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

/// Powers of the primitive d-th root of unity. The exponent is reduced mod d
/// before taking cosine/sine, so the phase error does not grow with j*l.
class PhaseRoot {
public:
  explicit PhaseRoot(int d) : d_(d) {
    if (d < 1) throw parameter_error("phase root modulus must be >= 1");
  }

  int modulus() const { return d_; }

  /// omega^{j*l} with omega = e^{2 pi i / d}.
  cd value(long j, long l) const {
    const long m = ((j % d_) * (l % d_)) % d_;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / d_;
    return cd(std::cos(angle), std::sin(angle));
  }

private:
  int d_;
};

/// One state of a family given by its raw (unnormalized) term list.
struct RawState {
  std::string label;
  std::vector<SparseTerm> terms;
};

/// A family of states in raw form: exactly the coefficients the constructions
/// define, before normalization. Serialization stores these verbatim.
struct FamilySpec {
  std::string label;
  std::vector<int> dims;
  ConstructionParams params;
  std::vector<RawState> states;
};

/// Normalize a raw family into a StateSet.
inline StateSet realize(const FamilySpec& spec) {
  std::vector<StateVector> states;
  states.reserve(spec.states.size());
  for (const RawState& rs : spec.states) states.push_back(superpose(rs.terms, spec.dims, rs.label));
  return StateSet(spec.label, spec.dims, std::move(states), spec.params);
}

namespace detail {

inline std::vector<int> complement_bits(const std::vector<int>& bits) {
  std::vector<int> out(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) out[i] = (bits[i] + 1) % 2;
  return out;
}

}  // namespace detail

/// The five-state three-qubit family: |000> +- |111|, |011> + |100>,
/// |001> + |110>, |010> + |101>, in that order.
inline FamilySpec ghz_subset_3qubit_family() {
  FamilySpec spec;
  spec.label = "eq1";
  spec.dims = {2, 2, 2};
  spec.params.family = "eq1";
  auto add = [&spec](const std::vector<int>& x, double sign, const std::vector<int>& y) {
    RawState rs;
    rs.label = "phi" + std::to_string(spec.states.size() + 1);
    rs.terms = {{x, cd(1.0, 0.0)}, {y, cd(sign, 0.0)}};
    spec.states.push_back(std::move(rs));
  };
  add({0, 0, 0}, +1.0, {1, 1, 1});
  add({0, 0, 0}, -1.0, {1, 1, 1});
  add({0, 1, 1}, +1.0, {1, 0, 0});
  add({0, 0, 1}, +1.0, {1, 1, 0});
  add({0, 1, 0}, +1.0, {1, 0, 1});
  return spec;
}

inline StateSet ghz_subset_3qubit() { return realize(ghz_subset_3qubit_family()); }

/// The N-qubit family of 2^{N-1} + 1 states: the all-zeros minus state
/// first, then |a> + |a-bar> for every bit string a with leading bit 0,
/// placed at position 2 + a_2 2^{N-2} + ... + a_N 2^0.
inline FamilySpec ghz_subset_nqubit_family(int N) {
  if (N < 3) throw parameter_error("the N-qubit family needs N >= 3, got " + std::to_string(N));
  FamilySpec spec;
  spec.label = "eq3-N" + std::to_string(N);
  spec.dims.assign(static_cast<size_t>(N), 2);
  spec.params.family = "eq3";
  spec.params.N = N;

  RawState minus;
  minus.label = "phi1";
  minus.terms = {{std::vector<int>(static_cast<size_t>(N), 0), cd(1.0, 0.0)},
                 {std::vector<int>(static_cast<size_t>(N), 1), cd(-1.0, 0.0)}};
  spec.states.push_back(std::move(minus));

  const long count = 1l << (N - 1);
  for (long tail = 0; tail < count; ++tail) {
    // tail encodes (a_2, ..., a_N) with a_2 as the most significant bit
    std::vector<int> a(static_cast<size_t>(N), 0);
    for (int i = 2; i <= N; ++i) a[static_cast<size_t>(i - 1)] = static_cast<int>((tail >> (N - i)) & 1);
    RawState rs;
    rs.label = "phi" + std::to_string(tail + 2);
    rs.terms = {{a, cd(1.0, 0.0)}, {detail::complement_bits(a), cd(1.0, 0.0)}};
    spec.states.push_back(std::move(rs));
  }
  return spec;
}

inline StateSet ghz_subset_nqubit(int N) { return realize(ghz_subset_nqubit_family(N)); }

namespace detail {

/// Term list sum_l omega^{jl} |label(l)> where label(l) has digit l at every
/// party except shifted_party, which carries l + 1 mod d. shifted_party = -1
/// means no shift.
inline std::vector<SparseTerm> phase_shift_terms(int parties, int d, int j, int shifted_party) {
  const PhaseRoot omega(d);
  std::vector<SparseTerm> terms;
  terms.reserve(static_cast<size_t>(d));
  for (int l = 0; l < d; ++l) {
    std::vector<int> label(static_cast<size_t>(parties), l);
    if (shifted_party >= 0) label[static_cast<size_t>(shifted_party)] = (l + 1) % d;
    terms.push_back({std::move(label), omega.value(j, l)});
  }
  return terms;
}

}  // namespace detail

/// The six 3x3x3 maximally entangled states, as listed: three phase states on
/// |lll> followed by one cyclic-shift state per party.
inline FamilySpec mes_set_3x3x3_family() {
  FamilySpec spec;
  spec.label = "lemma1";
  spec.dims = {3, 3, 3};
  spec.params.family = "lemma1";
  int index = 1;
  for (int j = 0; j < 3; ++j)
    spec.states.push_back({"phi" + std::to_string(index++), detail::phase_shift_terms(3, 3, j, -1)});
  for (int p = 0; p < 3; ++p)
    spec.states.push_back({"phi" + std::to_string(index++), detail::phase_shift_terms(3, 3, 0, p)});
  return spec;
}

inline StateSet mes_set_3x3x3() { return realize(mes_set_3x3x3_family()); }

/// The d+3 tripartite family for d >= 3: d phase states on |lll> followed by
/// the three single-party cyclic-shift states.
inline FamilySpec mes_set_tripartite_family(int d) {
  if (d < 3)
    throw parameter_error("the tripartite family needs d >= 3, got " + std::to_string(d));
  FamilySpec spec;
  spec.label = "thm3-d" + std::to_string(d);
  spec.dims = {d, d, d};
  spec.params.family = "thm3";
  spec.params.d = d;
  int index = 1;
  for (int j = 0; j < d; ++j)
    spec.states.push_back({"phi" + std::to_string(index++), detail::phase_shift_terms(3, d, j, -1)});
  for (int p = 0; p < 3; ++p)
    spec.states.push_back({"phi" + std::to_string(index++), detail::phase_shift_terms(3, d, 0, p)});
  return spec;
}

inline StateSet mes_set_tripartite(int d) { return realize(mes_set_tripartite_family(d)); }

/// The (k+1)d k-partite family for k >= 4, d >= 3: for each shift pattern
/// (none, then one per party) the full phase family j = 0..d-1,
/// pattern-major then phase.
inline FamilySpec mes_set_kpartite_family(int k, int d) {
  if (k < 4)
    throw parameter_error("the k-partite family needs k >= 4, got " + std::to_string(k));
  if (d < 3)
    throw parameter_error("the k-partite family needs d >= 3, got " + std::to_string(d));
  FamilySpec spec;
  spec.label = "thm4-k" + std::to_string(k) + "-d" + std::to_string(d);
  spec.dims.assign(static_cast<size_t>(k), d);
  spec.params.family = "thm4";
  spec.params.k = k;
  spec.params.d = d;
  int index = 1;
  for (int pattern = -1; pattern < k; ++pattern)
    for (int j = 0; j < d; ++j)
      spec.states.push_back(
          {"phi" + std::to_string(index++), detail::phase_shift_terms(k, d, j, pattern)});
  return spec;
}

inline StateSet mes_set_kpartite(int k, int d) { return realize(mes_set_kpartite_family(k, d)); }

}  // namespace nonloc

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nonloc/common.hpp"

namespace nonloc {

/// Row-major flattened index of a basis label, parties in ascending order.
inline long flatten_label(const std::vector<int>& dims, const std::vector<int>& label) {
  long idx = 0;
  for (size_t i = 0; i < dims.size(); ++i) idx = idx * dims[i] + label[i];
  return idx;
}

inline std::vector<int> unflatten_label(const std::vector<int>& dims, long idx) {
  std::vector<int> label(dims.size());
  for (size_t i = dims.size(); i-- > 0;) {
    label[i] = static_cast<int>(idx % dims[i]);
    idx /= dims[i];
  }
  return label;
}

inline long product_of_dims(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

/// A pure multipartite state: per-party dimensions plus a dense complex
/// amplitude vector of unit Euclidean norm. The constructor normalizes, so
/// callers may pass unnormalized amplitude lists.
class StateVector {
public:
  StateVector(std::vector<int> dims, Eigen::VectorXcd amplitudes, std::string label = "")
      : dims_(std::move(dims)), amplitudes_(std::move(amplitudes)), label_(std::move(label)) {
    check_dims();
    if (amplitudes_.size() != product_of_dims(dims_))
      throw shape_error("amplitude vector length " + std::to_string(amplitudes_.size()) +
                        " does not match product of dims " +
                        std::to_string(product_of_dims(dims_)));
    const double norm = amplitudes_.norm();
    if (norm < 1e-14)
      throw degenerate_input_error("cannot normalize a zero amplitude vector");
    amplitudes_ /= norm;
  }

  /// Rebuild from amplitudes that are already unit norm, preserving them
  /// bit-exactly (used by index-permutation round trips).
  static StateVector from_unit_amplitudes(std::vector<int> dims, Eigen::VectorXcd amplitudes,
                                          std::string label = "") {
    StateVector s;
    s.dims_ = std::move(dims);
    s.amplitudes_ = std::move(amplitudes);
    s.label_ = std::move(label);
    s.check_dims();
    if (s.amplitudes_.size() != product_of_dims(s.dims_))
      throw shape_error("amplitude vector length does not match product of dims");
    return s;
  }

  const std::vector<int>& dims() const { return dims_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  const std::string& label() const { return label_; }
  int party_count() const { return static_cast<int>(dims_.size()); }
  long total_dim() const { return amplitudes_.size(); }

private:
  StateVector() = default;

  void check_dims() const {
    if (dims_.empty()) throw shape_error("state needs at least one party");
    for (int d : dims_)
      if (d < 2) throw shape_error("every party dimension must be >= 2");
  }

  std::vector<int> dims_;
  Eigen::VectorXcd amplitudes_;
  std::string label_;
};

/// One term of a sparse superposition: a coefficient on a basis label.
struct SparseTerm {
  std::vector<int> basis;
  cd coeff;
};

/// Normalized superposition of computational basis labels.
inline StateVector superpose(const std::vector<SparseTerm>& terms, const std::vector<int>& dims,
                             std::string label = "") {
  if (terms.empty()) throw degenerate_input_error("superpose needs at least one term");
  bool any_nonzero = false;
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(product_of_dims(dims));
  for (const SparseTerm& t : terms) {
    if (t.basis.size() != dims.size())
      throw domain_error("basis label has " + std::to_string(t.basis.size()) +
                         " entries for a " + std::to_string(dims.size()) + "-party system");
    for (size_t i = 0; i < dims.size(); ++i)
      if (t.basis[i] < 0 || t.basis[i] >= dims[i])
        throw domain_error("basis label entry " + std::to_string(t.basis[i]) +
                           " out of range for party " + std::to_string(i) +
                           " of dimension " + std::to_string(dims[i]));
    if (std::abs(t.coeff) > 0.0) any_nonzero = true;
    amps[flatten_label(dims, t.basis)] += t.coeff;
  }
  if (!any_nonzero) throw degenerate_input_error("all superposition coefficients are zero");
  if (amps.norm() < 1e-14)
    throw degenerate_input_error("superposition terms cancel to the zero vector");
  return StateVector(dims, std::move(amps), std::move(label));
}

/// <x|y>, conjugate-linear in the first argument.
inline cd inner_product(const StateVector& x, const StateVector& y) {
  if (x.dims() != y.dims()) throw shape_error("inner product requires matching dims");
  return x.amplitudes().dot(y.amplitudes());
}

/// Construction parameters attached to a generated family.
struct ConstructionParams {
  std::optional<std::string> family;
  std::optional<int> N;
  std::optional<int> d;
  std::optional<int> k;

  bool operator==(const ConstructionParams&) const = default;
};

/// A labeled family of states over a shared party structure.
struct StateSet {
  std::string label;
  std::vector<int> dims;
  std::vector<StateVector> states;
  ConstructionParams params;

  StateSet(std::string label_, std::vector<int> dims_, std::vector<StateVector> states_,
           ConstructionParams params_ = {})
      : label(std::move(label_)), dims(std::move(dims_)), states(std::move(states_)),
        params(std::move(params_)) {
    for (const StateVector& s : states)
      if (s.dims() != dims) throw shape_error("all states of a set must share the set's dims");
  }

  size_t size() const { return states.size(); }
  int party_count() const { return static_cast<int>(dims.size()); }
};

/// Gram matrix G(i,j) = <s_i|s_j>. Hermitian with unit diagonal for any set
/// of normalized states; the identity iff the set is orthonormal.
inline Eigen::MatrixXcd gram(const StateSet& set) {
  if (set.states.empty()) throw degenerate_input_error("gram of an empty set");
  const int n = static_cast<int>(set.states.size());
  Eigen::MatrixXcd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = inner_product(set.states[static_cast<size_t>(i)], set.states[static_cast<size_t>(j)]);
  return g;
}

/// Throws precondition_error carrying the first offending Gram entry if the
/// set is not orthonormal within the given tolerance.
inline void require_orthonormal(const StateSet& set, double tol) {
  const Eigen::MatrixXcd g = gram(set);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      const cd expected = (i == j) ? cd(1.0, 0.0) : cd(0.0, 0.0);
      if (std::abs(g(i, j) - expected) > tol)
        throw precondition_error("set is not orthonormal: |G(" + std::to_string(i) + "," +
                                     std::to_string(j) + ")| deviates by " +
                                     std::to_string(std::abs(g(i, j) - expected)),
                                 i, j, g(i, j));
    }
}

}  // namespace nonloc

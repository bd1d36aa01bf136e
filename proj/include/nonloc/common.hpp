#pragma once

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace nonloc {

inline constexpr const char* kToolVersion = "1.0.0";

using cd = std::complex<double>;

/// Base class for all toolkit errors.
class error : public std::runtime_error {
public:
  explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched dimensions or an invalid bipartition for the given system.
class shape_error : public error {
public:
  using error::error;
};

/// A basis label outside the per-party dimension range.
class domain_error : public error {
public:
  using error::error;
};

/// Structurally valid input that carries no usable content (all-zero
/// coefficients, empty sets).
class degenerate_input_error : public error {
public:
  using error::error;
};

/// A construction or enumeration parameter outside its stated domain.
class parameter_error : public error {
public:
  using error::error;
};

/// A violated operation precondition. For orthonormality failures the
/// offending Gram entry is carried alongside the message.
class precondition_error : public error {
public:
  explicit precondition_error(const std::string& msg) : error(msg) {}
  precondition_error(const std::string& msg, int row, int col, cd value)
      : error(msg), row_(row), col_(col), value_(value), has_entry_(true) {}

  bool has_gram_entry() const { return has_entry_; }
  int gram_row() const { return row_; }
  int gram_col() const { return col_; }
  cd gram_value() const { return value_; }

private:
  int row_ = 0;
  int col_ = 0;
  cd value_{};
  bool has_entry_ = false;
};

/// A state whose regrouped matrix does not lie inside the requested frame.
/// Carries the Frobenius norm of the out-of-frame residual.
class support_error : public error {
public:
  support_error(const std::string& msg, double residual)
      : error(msg), residual_(residual) {}
  double residual() const { return residual_; }

private:
  double residual_;
};

/// Numerical thresholds used by every check in the toolkit. All values are
/// multiplied by the NONLOC_TOLERANCE_SCALE environment variable (default 1).
struct Tolerances {
  double unit_norm = 1e-12;         // |norm - 1| after state construction
  double orthogonality = 1e-10;     // Gram matrix vs identity
  double rank = 1e-9;               // singular value cutoff for ranks
  double flat_spectrum = 1e-9;      // deviation from 1/sqrt(r) for MES checks
  double frame_residual = 1e-10;    // out-of-frame Frobenius residual
  double opm_nullspace = 1e-9;      // singular-value threshold for OPM spaces
  double schmidt_norm = 1e-10;      // Frobenius norm precondition on schmidt()
  double projector = 1e-9;          // eliminator constraint and annihilation
  double support_amplitude = 1e-12; // nonzero-cell detection in regrouped matrices
  double scale = 1.0;
};

inline Tolerances scaled_tolerances() {
  Tolerances t;
  double s = 1.0;
  if (const char* env = std::getenv("NONLOC_TOLERANCE_SCALE")) {
    char* end = nullptr;
    double parsed = std::strtod(env, &end);
    if (end != env && parsed > 0.0) s = parsed;
  }
  t.unit_norm *= s;
  t.orthogonality *= s;
  t.rank *= s;
  t.flat_spectrum *= s;
  t.frame_residual *= s;
  t.opm_nullspace *= s;
  t.schmidt_norm *= s;
  t.projector *= s;
  t.support_amplitude *= s;
  t.scale = s;
  return t;
}

/// Process-wide tolerances, read once from the environment.
inline const Tolerances& tolerances() {
  static const Tolerances t = scaled_tolerances();
  return t;
}

}  // namespace nonloc

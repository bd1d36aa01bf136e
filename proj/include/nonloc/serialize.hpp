#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nonloc/certify.hpp"
#include "nonloc/common.hpp"
#include "nonloc/constructions.hpp"
#include "nonloc/state.hpp"

namespace nonloc {

/// Schema violation in a state-set document; the message names the location
/// of the first violation in JSON-pointer style.
class document_error : public error {
 public:
  document_error(std::string location, const std::string& reason)
      : error(location + ": " + reason), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

namespace detail {

inline void json_escape_into(std::string& out, const std::string& s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", static_cast<unsigned>(c));
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

/// 17 significant digits: lossless round trip for binary64.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw domain_error("cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class JsonWriter {
 public:
  std::string take() && { return std::move(out_); }

  void begin_object() { open('{'); }
  void end_object() { close('}'); }
  void begin_array() { open('['); }
  void end_array() { close(']'); }

  void key(const std::string& k) {
    comma_and_newline();
    indent();
    detail::json_escape_into(out_, k);
    out_ += ": ";
    need_comma_ = false;
    pending_key_ = true;
  }

  void value(const std::string& s) { scalar([&] { detail::json_escape_into(out_, s); }); }
  void value(const char* s) { value(std::string(s)); }
  void value(long v) { scalar([&] { out_ += std::to_string(v); }); }
  void value(int v) { value(static_cast<long>(v)); }
  void value(double v) { scalar([&] { out_ += format_double(v); }); }
  void value(bool v) { scalar([&] { out_ += v ? "true" : "false"; }); }
  void null() { scalar([&] { out_ += "null"; }); }

  /// Compact array of integers on a single line.
  void int_array(const std::vector<int>& xs) {
    scalar([&] {
      out_.push_back('[');
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out_ += ", ";
        out_ += std::to_string(xs[i]);
      }
      out_.push_back(']');
    });
  }

  void long_array(const std::vector<long>& xs) {
    scalar([&] {
      out_.push_back('[');
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out_ += ", ";
        out_ += std::to_string(xs[i]);
      }
      out_.push_back(']');
    });
  }

  void double_array(const std::vector<double>& xs) {
    scalar([&] {
      out_.push_back('[');
      for (size_t i = 0; i < xs.size(); ++i) {
        if (i) out_ += ", ";
        out_ += format_double(xs[i]);
      }
      out_.push_back(']');
    });
  }

 private:
  template <class F>
  void scalar(F&& emit) {
    if (!pending_key_) {
      comma_and_newline();
      indent();
    }
    pending_key_ = false;
    emit();
    need_comma_ = true;
  }

  void open(char c) {
    if (!pending_key_) {
      comma_and_newline();
      indent();
    }
    pending_key_ = false;
    out_.push_back(c);
    ++depth_;
    need_comma_ = false;
    just_opened_ = true;
  }

  void close(char c) {
    --depth_;
    if (!just_opened_) {
      out_.push_back('\n');
      indent();
    }
    just_opened_ = false;
    out_.push_back(c);
    need_comma_ = true;
    if (depth_ == 0) out_.push_back('\n');
  }

  void comma_and_newline() {
    if (need_comma_) out_.push_back(',');
    if (depth_ > 0) out_.push_back('\n');
    need_comma_ = false;
    just_opened_ = false;
  }

  void indent() { out_.append(static_cast<size_t>(2 * depth_), ' '); }

  std::string out_;
  int depth_ = 0;
  bool need_comma_ = false;
  bool pending_key_ = false;
  bool just_opened_ = false;
};

inline void write_params(JsonWriter& w, const ConstructionParams& p) {
  w.begin_object();
  if (p.family) {
    w.key("family");
    w.value(*p.family);
  }
  if (p.N) {
    w.key("N");
    w.value(*p.N);
  }
  if (p.d) {
    w.key("d");
    w.value(*p.d);
  }
  if (p.k) {
    w.key("k");
    w.value(*p.k);
  }
  w.end_object();
}

}  // namespace detail

/// Canonical state-set document: fixed key order, terms sorted by flattened
/// basis index, 17-significant-digit floats. Amplitudes are stored
/// unnormalized; normalization happens when the set is realized.
inline std::string write_state_set_json(const FamilySpec& spec) {
  detail::JsonWriter w;
  w.begin_object();
  w.key("schema_version");
  w.value("1");
  w.key("label");
  w.value(spec.label);
  w.key("dims");
  w.int_array(spec.dims);
  w.key("params");
  detail::write_params(w, spec.params);
  w.key("states");
  w.begin_array();
  for (const RawState& state : spec.states) {
    std::vector<size_t> order(state.terms.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return flatten_label(spec.dims, state.terms[x].basis) <
             flatten_label(spec.dims, state.terms[y].basis);
    });
    w.begin_object();
    w.key("label");
    w.value(state.label);
    w.key("terms");
    w.begin_array();
    for (size_t i : order) {
      const SparseTerm& t = state.terms[i];
      w.begin_object();
      w.key("basis");
      w.int_array(t.basis);
      w.key("re");
      w.value(t.coeff.real());
      w.key("im");
      w.value(t.coeff.imag());
      w.end_object();
    }
    w.end_array();
    w.end_object();
  }
  w.end_array();
  w.end_object();
  return std::move(w).take();
}

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& obj, const std::string& path,
                                         const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw document_error(path, std::string("missing key \"") + key + "\"");
  return *it;
}

inline std::string require_string(const nlohmann::json& v, const std::string& path) {
  if (!v.is_string()) throw document_error(path, "expected a string");
  return v.get<std::string>();
}

inline long require_integer(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number_integer()) throw document_error(path, "expected an integer");
  return v.get<long>();
}

inline double require_number(const nlohmann::json& v, const std::string& path) {
  if (!v.is_number()) throw document_error(path, "expected a number");
  return v.get<double>();
}

inline void reject_unknown_keys(const nlohmann::json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) known = true;
    if (!known) throw document_error(path + "." + it.key(), "unknown key");
  }
}

}  // namespace detail

/// Strict reader for the state-set schema. Throws document_error naming the
/// first violating location; JSON syntax errors surface the parser's byte
/// position.
inline FamilySpec read_state_set_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw document_error("$", std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) throw document_error("$", "expected an object");
  detail::reject_unknown_keys(doc, "$", {"schema_version", "label", "dims", "params", "states"});

  if (detail::require_string(detail::require_key(doc, "$", "schema_version"),
                             "$.schema_version") != "1")
    throw document_error("$.schema_version", "unsupported schema version (expected \"1\")");

  FamilySpec spec;
  spec.label = detail::require_string(detail::require_key(doc, "$", "label"), "$.label");

  const nlohmann::json& dims = detail::require_key(doc, "$", "dims");
  if (!dims.is_array() || dims.empty()) throw document_error("$.dims", "expected a non-empty array");
  for (size_t i = 0; i < dims.size(); ++i) {
    const std::string path = "$.dims[" + std::to_string(i) + "]";
    const long d = detail::require_integer(dims[i], path);
    if (d < 2) throw document_error(path, "local dimension must be at least 2");
    spec.dims.push_back(static_cast<int>(d));
  }

  if (doc.contains("params")) {
    const nlohmann::json& params = doc["params"];
    if (!params.is_object()) throw document_error("$.params", "expected an object");
    detail::reject_unknown_keys(params, "$.params", {"family", "N", "d", "k"});
    if (params.contains("family"))
      spec.params.family = detail::require_string(params["family"], "$.params.family");
    if (params.contains("N"))
      spec.params.N = static_cast<int>(detail::require_integer(params["N"], "$.params.N"));
    if (params.contains("d"))
      spec.params.d = static_cast<int>(detail::require_integer(params["d"], "$.params.d"));
    if (params.contains("k"))
      spec.params.k = static_cast<int>(detail::require_integer(params["k"], "$.params.k"));
  }

  const nlohmann::json& states = detail::require_key(doc, "$", "states");
  if (!states.is_array() || states.empty())
    throw document_error("$.states", "expected a non-empty array");
  for (size_t s = 0; s < states.size(); ++s) {
    const std::string spath = "$.states[" + std::to_string(s) + "]";
    const nlohmann::json& js = states[s];
    if (!js.is_object()) throw document_error(spath, "expected an object");
    detail::reject_unknown_keys(js, spath, {"label", "terms"});
    RawState raw;
    raw.label = detail::require_string(detail::require_key(js, spath, "label"), spath + ".label");
    const nlohmann::json& terms = detail::require_key(js, spath, "terms");
    if (!terms.is_array() || terms.empty())
      throw document_error(spath + ".terms", "expected a non-empty array (at least one term)");
    for (size_t t = 0; t < terms.size(); ++t) {
      const std::string tpath = spath + ".terms[" + std::to_string(t) + "]";
      const nlohmann::json& jt = terms[t];
      if (!jt.is_object()) throw document_error(tpath, "expected an object");
      detail::reject_unknown_keys(jt, tpath, {"basis", "re", "im"});
      const nlohmann::json& basis = detail::require_key(jt, tpath, "basis");
      if (!basis.is_array() || basis.size() != spec.dims.size())
        throw document_error(tpath + ".basis",
                             "expected an array of " + std::to_string(spec.dims.size()) +
                                 " party indices");
      SparseTerm term;
      for (size_t p = 0; p < basis.size(); ++p) {
        const std::string bpath = tpath + ".basis[" + std::to_string(p) + "]";
        const long b = detail::require_integer(basis[p], bpath);
        if (b < 0 || b >= spec.dims[p])
          throw document_error(bpath, "basis index " + std::to_string(b) +
                                          " outside local dimension " + std::to_string(spec.dims[p]));
        term.basis.push_back(static_cast<int>(b));
      }
      const double re = detail::require_number(detail::require_key(jt, tpath, "re"), tpath + ".re");
      const double im = detail::require_number(detail::require_key(jt, tpath, "im"), tpath + ".im");
      term.coeff = cd(re, im);
      raw.terms.push_back(std::move(term));
    }
    spec.states.push_back(std::move(raw));
  }
  return spec;
}

namespace detail {

inline void write_sparse_vector(JsonWriter& w, const Eigen::VectorXcd& v) {
  const double tol = tolerances().support_amplitude;
  w.begin_array();
  for (long i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) <= tol) continue;
    w.begin_object();
    w.key("index");
    w.value(static_cast<long>(i));
    w.key("re");
    w.value(v(i).real());
    w.key("im");
    w.value(v(i).imag());
    w.end_object();
  }
  w.end_array();
}

inline void write_frame_basis(JsonWriter& w, const Subspace& sub) {
  w.begin_array();
  for (long c = 0; c < sub.basis.cols(); ++c) write_sparse_vector(w, sub.basis.col(c));
  w.end_array();
}

inline void write_opm_side(JsonWriter& w, const OpmReport& opm) {
  w.begin_object();
  w.key("space_dim");
  w.value(static_cast<long>(opm.space_dim));
  w.key("trivial");
  w.value(opm.trivial);
  w.key("eliminator");
  if (opm.eliminator) {
    w.begin_object();
    w.key("basis_indices");
    w.long_array(opm.eliminator->basis_indices);
    w.key("eliminated");
    w.int_array(opm.eliminator->eliminated);
    w.key("complement_eliminated");
    w.int_array(opm.eliminator->complement_eliminated);
    w.end_object();
  } else {
    w.null();
  }
  w.end_object();
}

}  // namespace detail

/// Certification report document: deterministic field order, no timestamps,
/// 17-significant-digit floats. Two runs over the same set are byte-identical.
inline std::string write_report_json(const CertificationReport& report) {
  const Tolerances& tol = tolerances();
  detail::JsonWriter w;
  w.begin_object();
  w.key("schema_version");
  w.value("1");
  w.key("tool_version");
  w.value(kToolVersion);
  w.key("set");
  w.begin_object();
  w.key("label");
  w.value(report.set_label);
  w.key("dims");
  w.int_array(report.dims);
  w.key("params");
  detail::write_params(w, report.params);
  w.key("state_count");
  w.value(report.state_count);
  w.end_object();
  w.key("premise");
  w.value(report.premise);
  w.key("tolerances");
  w.begin_object();
  w.key("scale");
  w.value(tol.scale);
  w.key("unit_norm");
  w.value(tol.unit_norm);
  w.key("orthogonality");
  w.value(tol.orthogonality);
  w.key("rank");
  w.value(tol.rank);
  w.key("flat_spectrum");
  w.value(tol.flat_spectrum);
  w.key("frame_residual");
  w.value(tol.frame_residual);
  w.key("opm_nullspace");
  w.value(tol.opm_nullspace);
  w.key("schmidt_norm");
  w.value(tol.schmidt_norm);
  w.key("projector");
  w.value(tol.projector);
  w.key("support_amplitude");
  w.value(tol.support_amplitude);
  w.end_object();
  w.key("bipartitions");
  w.begin_array();
  for (const CutReport& cut : report.cuts) {
    w.begin_object();
    w.key("block_a");
    w.int_array(cut.cut.block(Side::A));
    w.key("block_b");
    w.int_array(cut.cut.block(Side::B));
    w.key("verdict");
    w.value(verdict_name(cut.verdict));
    w.key("witness");
    if (cut.witness) {
      const MesWitness& wit = *cut.witness;
      w.begin_object();
      w.key("member_indices");
      w.int_array(wit.member_indices);
      w.key("effective_dim");
      w.value(static_cast<long>(wit.effective_dim));
      w.key("member_schmidt_values");
      w.begin_array();
      for (const SchmidtData& sd : wit.member_schmidt) {
        std::vector<double> vals(sd.singular_values.data(),
                                 sd.singular_values.data() + sd.singular_values.size());
        w.double_array(vals);
      }
      w.end_array();
      w.key("frame_basis_a");
      detail::write_frame_basis(w, wit.frame.subspace_a);
      w.key("frame_basis_b");
      detail::write_frame_basis(w, wit.frame.subspace_b);
      w.end_object();
    } else {
      w.null();
    }
    w.key("diagnostics");
    if (cut.diagnostics) {
      w.begin_object();
      w.key("frame_dim_a");
      w.value(static_cast<long>(cut.diagnostics->frame_dim_a));
      w.key("frame_dim_b");
      w.value(static_cast<long>(cut.diagnostics->frame_dim_b));
      w.key("state_ranks");
      w.int_array(cut.diagnostics->state_ranks);
      w.end_object();
    } else {
      w.null();
    }
    w.key("opm_side_a");
    if (cut.opm_a) {
      detail::write_opm_side(w, *cut.opm_a);
    } else {
      w.null();
    }
    w.key("opm_side_b");
    if (cut.opm_b) {
      detail::write_opm_side(w, *cut.opm_b);
    } else {
      w.null();
    }
    w.end_object();
  }
  w.end_array();
  w.key("overall");
  w.value(verdict_name(report.overall));
  w.end_object();
  return std::move(w).take();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parameter_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw parameter_error("cannot write file: " + path);
  out << content;
  if (!out) throw parameter_error("write failed: " + path);
}

}  // namespace nonloc

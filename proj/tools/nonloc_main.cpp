#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nonloc/serialize.hpp"

namespace {

using namespace nonloc;

// exit codes: 0 certified, 1 not certified, 2 input error, 3 precondition violation
constexpr int kExitCertified = 0;
constexpr int kExitNotCertified = 1;
constexpr int kExitInputError = 2;
constexpr int kExitPrecondition = 3;

std::string dims_to_string(const std::vector<int>& dims) {
  std::string out = "[";
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(dims[i]);
  }
  return out + "]";
}

std::string indices_to_string(const std::vector<int>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(xs[i]);
  }
  return out + "]";
}

std::string longs_to_string(const std::vector<long>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(xs[i]);
  }
  return out + "]";
}

std::vector<int> parse_index_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    int value = 0;
    try {
      value = std::stoi(item, &pos);
    } catch (const std::exception&) {
      throw parameter_error(what + ": '" + item + "' is not an integer");
    }
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size())
      throw parameter_error(what + ": '" + item + "' is not an integer");
    out.push_back(value);
  }
  if (out.empty()) throw parameter_error(what + ": expected a comma-separated list of indices");
  return out;
}

Bipartition parse_bipartition_spec(const std::string& text, int parties) {
  const size_t bar = text.find('|');
  if (bar == std::string::npos)
    throw parameter_error("bipartition '" + text + "' must separate its two blocks with '|'");
  const std::vector<int> a = parse_index_list(text.substr(0, bar), "bipartition block A");
  const std::vector<int> b = parse_index_list(text.substr(bar + 1), "bipartition block B");
  return Bipartition(a, b, parties);
}

struct FamilyArgs {
  std::string family;
  std::optional<int> N;
  std::optional<int> d;
  std::optional<int> k;
};

void reject_extraneous(const FamilyArgs& fa, bool allow_N, bool allow_d, bool allow_k) {
  if (fa.N && !allow_N)
    throw parameter_error("family '" + fa.family + "' does not take a parameter N");
  if (fa.d && !allow_d)
    throw parameter_error("family '" + fa.family + "' does not take a parameter d");
  if (fa.k && !allow_k)
    throw parameter_error("family '" + fa.family + "' does not take a parameter k");
}

FamilySpec build_family_spec(const FamilyArgs& fa) {
  if (fa.family == "eq1") {
    reject_extraneous(fa, false, false, false);
    return ghz_subset_3qubit_family();
  }
  if (fa.family == "eq3") {
    reject_extraneous(fa, true, false, false);
    if (!fa.N) throw parameter_error("family 'eq3' needs -N (number of qubit parties, N >= 3)");
    return ghz_subset_nqubit_family(*fa.N);
  }
  if (fa.family == "lemma1") {
    reject_extraneous(fa, false, false, false);
    return mes_set_3x3x3_family();
  }
  if (fa.family == "thm3") {
    reject_extraneous(fa, false, true, false);
    if (!fa.d) throw parameter_error("family 'thm3' needs -d (local dimension, d >= 3)");
    return mes_set_tripartite_family(*fa.d);
  }
  if (fa.family == "thm4") {
    reject_extraneous(fa, false, true, true);
    if (!fa.k) throw parameter_error("family 'thm4' needs -k (party count, k >= 4)");
    if (!fa.d) throw parameter_error("family 'thm4' needs -d (local dimension, d >= 3)");
    return mes_set_kpartite_family(*fa.k, *fa.d);
  }
  throw parameter_error("unknown family '" + fa.family +
                        "' (expected eq1, eq3, lemma1, thm3, or thm4)");
}

FamilySpec resolve_input(const std::string& in_path, const FamilyArgs& fa) {
  if (!in_path.empty() && !fa.family.empty())
    throw parameter_error("give either --in or --family, not both");
  if (!in_path.empty()) return read_state_set_json(read_text_file(in_path));
  if (!fa.family.empty()) return build_family_spec(fa);
  throw parameter_error("give --in PATH or --family NAME");
}

void print_opm_line(const char* side, const OpmReport& opm) {
  std::cout << "  opm side " << side << ": space_dim " << opm.space_dim
            << (opm.trivial ? " (trivial)" : "");
  if (opm.eliminator) {
    std::cout << ", eliminator basis " << longs_to_string(opm.eliminator->basis_indices)
              << " eliminates " << indices_to_string(opm.eliminator->eliminated)
              << ", complement eliminates "
              << indices_to_string(opm.eliminator->complement_eliminated);
  }
  std::cout << "\n";
}

int run_certify(const std::string& in_path, const FamilyArgs& fa, const std::string& hint_text,
                const std::string& json_path, bool skip_opm) {
  const FamilySpec spec = resolve_input(in_path, fa);
  const StateSet set = realize(spec);

  CertifyOptions options;
  options.run_opm = !skip_opm;
  if (!hint_text.empty()) options.hint = parse_index_list(hint_text, "--hint");

  const CertificationReport report = certify(set, options);

  std::cout << "set " << report.set_label << ": " << report.state_count << " states, dims "
            << dims_to_string(report.dims) << "\n";
  for (const CutReport& cut : report.cuts) {
    std::cout << "bipartition " << cut.cut.to_string() << ": " << verdict_name(cut.verdict)
              << "\n";
    if (cut.witness) {
      std::cout << "  witness members " << indices_to_string(cut.witness->member_indices)
                << ", effective dim " << cut.witness->effective_dim << "\n";
    }
    if (cut.diagnostics) {
      std::cout << "  no witness: full-set frame dims (" << cut.diagnostics->frame_dim_a << ", "
                << cut.diagnostics->frame_dim_b << "), state ranks "
                << indices_to_string(cut.diagnostics->state_ranks) << "\n";
    }
    if (cut.opm_a) print_opm_line("A", *cut.opm_a);
    if (cut.opm_b) print_opm_line("B", *cut.opm_b);
  }
  std::cout << "overall: " << verdict_name(report.overall) << "\n";

  if (!json_path.empty()) write_text_file(json_path, write_report_json(report));

  return report.overall == OverallVerdict::StronglyNonlocalCertified ? kExitCertified
                                                                     : kExitNotCertified;
}

int run_generate(const FamilyArgs& fa, const std::string& out_path) {
  if (fa.family.empty()) throw parameter_error("generate needs --family NAME");
  const FamilySpec spec = build_family_spec(fa);
  realize(spec);  // reject anything that does not normalize cleanly
  write_text_file(out_path, write_state_set_json(spec));
  std::cout << "wrote " << out_path << ": " << spec.states.size() << " states, dims "
            << dims_to_string(spec.dims) << "\n";
  return kExitCertified;
}

int run_inspect(const std::string& in_path, const FamilyArgs& fa, const std::string& cut_text,
                const std::string& hint_text) {
  const FamilySpec spec = resolve_input(in_path, fa);
  const StateSet set = realize(spec);
  const Bipartition cut = parse_bipartition_spec(cut_text, set.party_count());

  std::cout << "set " << set.label << ": " << set.size() << " states, dims "
            << dims_to_string(set.dims) << "\n";
  std::cout << "bipartition " << cut.to_string() << "\n";

  char buf[64];
  for (size_t i = 0; i < set.size(); ++i) {
    const SchmidtData data = schmidt(regroup(set.states[i], cut));
    std::cout << "state " << i;
    if (!set.states[i].label().empty()) std::cout << " (" << set.states[i].label() << ")";
    std::cout << ": rank " << data.rank << ", schmidt values [";
    for (long v = 0; v < data.singular_values.size(); ++v) {
      std::snprintf(buf, sizeof(buf), "%.6g", data.singular_values[v]);
      std::cout << (v ? ", " : "") << buf;
    }
    std::snprintf(buf, sizeof(buf), "%.3g", data.max_deviation_from_flat);
    std::cout << "], flat deviation " << buf << "\n";
  }

  std::vector<int> members;
  if (!hint_text.empty()) {
    members = parse_index_list(hint_text, "--hint");
  } else {
    members.resize(set.size());
    for (size_t i = 0; i < set.size(); ++i) members[i] = static_cast<int>(i);
  }
  const EffectiveFrame frame = effective_frame(set, members, cut);
  std::cout << (hint_text.empty() ? "full-set" : "hinted subset") << " frame "
            << indices_to_string(members) << ": dims (" << frame.dim_a() << ", " << frame.dim_b()
            << ")\n";
  if (!hint_text.empty()) {
    const auto witness = find_mes_witness(set, cut, members);
    if (witness) {
      std::cout << "hinted witness validates: effective dim " << witness->effective_dim
                << ", members " << indices_to_string(witness->member_indices) << "\n";
    } else {
      std::cout << "hinted subset is not a valid witness for this bipartition\n";
    }
  }

  const OpmReport opm_a = opm_solution_space(set, cut, Side::A);
  const OpmReport opm_b = opm_solution_space(set, cut, Side::B);
  std::cout << "opm space dims: side A " << opm_a.space_dim << (opm_a.trivial ? " (trivial)" : "")
            << ", side B " << opm_b.space_dim << (opm_b.trivial ? " (trivial)" : "") << "\n";
  return kExitCertified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nonloc: builds families of orthogonal multipartite entangled states and certifies their "
      "local indistinguishability across every bipartition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", nonloc::kToolVersion);

  FamilyArgs fa;
  std::string in_path, out_path, json_path, hint_text, cut_text;
  bool skip_opm = false;

  auto add_family_options = [&fa](CLI::App* cmd) {
    cmd->add_option("--family", fa.family, "family token: eq1, eq3, lemma1, thm3, thm4");
    cmd->add_option("-N,--N", fa.N, "qubit party count (family eq3)");
    cmd->add_option("-d,--d", fa.d, "local dimension (families thm3, thm4)");
    cmd->add_option("-k,--k", fa.k, "party count (family thm4)");
  };

  CLI::App* generate = app.add_subcommand("generate", "write a state-set document for a family");
  add_family_options(generate);
  generate->add_option("--out", out_path, "output path for the document")->required();

  CLI::App* certify_cmd =
      app.add_subcommand("certify", "run the full certification over every bipartition");
  add_family_options(certify_cmd);
  certify_cmd->add_option("--in", in_path, "state-set document to certify");
  certify_cmd->add_option("--hint", hint_text,
                          "comma-separated state indices tried first as a witness on every "
                          "bipartition");
  certify_cmd->add_option("--json", json_path, "write the full report to this path");
  certify_cmd->add_flag("--skip-opm", skip_opm,
                        "skip the orthogonality-preserving measurement analysis");

  CLI::App* inspect = app.add_subcommand("inspect", "per-state view across one bipartition");
  add_family_options(inspect);
  inspect->add_option("--in", in_path, "state-set document to inspect");
  inspect->add_option("--bipartition", cut_text, "blocks as comma lists separated by '|', e.g. 0,1|2")
      ->required();
  inspect->add_option("--hint", hint_text, "comma-separated state indices for the frame");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (generate->parsed()) return run_generate(fa, out_path);
    if (certify_cmd->parsed()) return run_certify(in_path, fa, hint_text, json_path, skip_opm);
    if (inspect->parsed()) return run_inspect(in_path, fa, cut_text, hint_text);
  } catch (const nonloc::precondition_error& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    if (e.has_gram_entry())
      std::cerr << "offending Gram entry G(" << e.gram_row() << "," << e.gram_col() << ") = ("
                << e.gram_value().real() << ", " << e.gram_value().imag() << ")\n";
    return kExitPrecondition;
  } catch (const nonloc::document_error& e) {
    std::cerr << "invalid document: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nonloc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

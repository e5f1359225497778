#include "diophlab/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "diophlab/io.hpp"
#include "diophlab/lab.hpp"

namespace diophlab {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string spec;
  std::string sequence;
  int n = 3;
  std::string xmax;
  std::optional<long> precision_bits;
  std::optional<std::string> lambda;
  std::string out_dir = ".";
  std::string formats = "json,csv";
  std::string lemmas = "all";
  std::uint64_t seed = 1;
  bool json = false;
  std::string basis;
  std::string other;
};

PrecisionContext context_for(const RunConfig& c) {
  PrecisionContext ctx = PrecisionContext::from_environment();
  if (c.precision_bits) ctx.initial_bits = *c.precision_bits;
  try {
    ctx.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return ctx;
}

mpz_class parse_xmax(const std::string& text) {
  mpz_class v;
  if (text.empty() || v.set_str(text, 10) != 0) throw UsageError("--xmax must be a positive integer");
  if (v < 1) throw UsageError("--xmax must be at least 1");
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ','))
    if (!p.empty()) parts.push_back(p);
  return parts;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << body;
}

int cmd_minimal_points(const RunConfig& c, std::ostream& out, std::ostream&) {
  RealSpec spec = load_spec(c.spec);
  mpz_class xmax = parse_xmax(c.xmax);
  if (c.n < 1) throw UsageError("--n must be at least 1");
  std::vector<std::string> formats = split(c.formats);
  if (formats.empty()) throw UsageError("--format needs json and/or csv");
  for (const auto& f : formats)
    if (f != "json" && f != "csv") throw UsageError("unknown format: " + f);
  PrecisionContext ctx = context_for(c);

  MinimalPointSequence seq = minimal_points(spec, c.n, xmax, ctx);
  Json j = sequence_to_json(seq, utc_timestamp());
  std::filesystem::create_directories(c.out_dir);
  for (const auto& f : formats) {
    if (f == "json") write_file(std::filesystem::path(c.out_dir) / "sequence.json", j.dump(2) + "\n");
    if (f == "csv") write_file(std::filesystem::path(c.out_dir) / "sequence.csv", sequence_to_csv(seq));
  }
  if (c.json) {
    out << j.dump(2) << "\n";
  } else {
    out << seq.records.size() << " minimal points up to X = " << xmax.get_str() << " for "
        << (spec.label().empty() ? "xi" : spec.label()) << " (n = " << c.n << ")\n";
    if (!seq.records.empty())
      out << "last: " << seq.records.back().x.to_string() << "  L = "
          << l_midpoint_decimal(seq.records.back().L) << "\n";
  }
  return kExitOk;
}

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.spec.empty() == c.sequence.empty()) throw UsageError("verify needs exactly one of --spec or --sequence");
  PrecisionContext ctx = context_for(c);
  const std::string lambda = c.lambda ? *c.lambda : lambda3_decimal();
  std::optional<MinimalPointSequence> loaded;
  if (!c.sequence.empty()) {
    std::ifstream in(c.sequence);
    if (!in) throw UsageError("cannot read sequence file: " + c.sequence);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw InvalidSpec(std::string("malformed sequence JSON: ") + e.what());
    }
    loaded.emplace(sequence_from_json(j));
  } else {
    RealSpec spec = load_spec(c.spec);
    loaded.emplace(minimal_points(spec, c.n, parse_xmax(c.xmax), ctx));
  }
  const MinimalPointSequence& seq = *loaded;
  ConstantSet cs = constants(lambda, &seq.spec);
  std::vector<std::string> ids;
  if (c.lemmas == "all") {
    ids = lemma_ids();
  } else {
    for (const auto& name : split(c.lemmas)) ids.push_back(resolve_lemma_id(name));
  }

  std::vector<ExactCheck> checks = identity_suite(c.seed);
  if (!c.sequence.empty()) checks.push_back(replay_check(seq, ctx));
  std::optional<LabRun> run;
  if (seq.n == 3) {
    try {
      run.emplace(build_lab_run(seq));
      checks.insert(checks.end(), run->checks.begin(), run->checks.end());
    } catch (const DataCorruption& e) {
      std::string what = e.what();
      checks.push_back({what.substr(0, what.find(':')), false, what});
    }
  }

  Json report;
  report["header"] = {{"timestamp", utc_timestamp()}, {"tool", "diophlab"}};
  report["spec"] = spec_to_json(seq.spec);
  report["n"] = seq.n;
  report["X_max"] = seq.X_max.get_str();
  report["record_count"] = seq.records.size();
  report["tie_rule"] = seq.tie_rule;
  report["lambda"] = cs.lambda.decimal(50);
  report["seed"] = c.seed;
  report["constants"] = constants_to_json(cs);
  Json warnings = Json::array();
  for (const auto& w : cs.warnings) warnings.push_back(w);

  Json reports = Json::array();
  if (run) {
    std::vector<std::size_t> i_minus_j;
    std::set_difference(run->I.begin(), run->I.end(), run->J.begin(), run->J.end(),
                        std::back_inserter(i_minus_j));
    report["index_sets"] = {{"I", run->I},
                            {"J", run->J},
                            {"I_minus_J_count", i_minus_j.size()},
                            {"i0", run->i0 ? Json(*run->i0) : Json(nullptr)},
                            {"dependent", run->dependent}};
    LabOptions opt;
    opt.lambda = lambda;
    for (const auto& id : ids) {
      std::vector<RatioReport> rs = verify_lemma_ratios(*run, id, opt);
      attach_drift(rs, *run, id, opt);
      for (const auto& r : rs) {
        if (r.drift_flag)
          warnings.push_back("drift: " + r.lemma + "/" + r.part + " max ratio grew more than " +
                             std::to_string(static_cast<int>(opt.drift_factor)) + "x over the half run");
        reports.push_back(report_to_json(r));
      }
    }
  } else if (seq.n != 3) {
    warnings.push_back("ratio reports need n = 3; only the identity suite and the gate ran");
  }
  report["reports"] = reports;

  GateReport gate;
  if (run || seq.n != 3) {
    gate = theorem_gate(seq, cs, run ? &*run : nullptr);
  } else {
    gate.reason = "lab run unavailable after a failed structural check";
    gate.verdict = gate.reason;
  }
  report["gate"] = gate_to_json(gate);

  Json jchecks = Json::array();
  std::size_t failing = 0;
  for (const auto& ch : checks) {
    jchecks.push_back(check_to_json(ch));
    if (!ch.passed) ++failing;
  }
  report["exact_checks"] = jchecks;
  report["warnings"] = warnings;
  report["status"] = failing == 0 ? "pass" : "fail";

  std::filesystem::create_directories(c.out_dir);
  write_file(std::filesystem::path(c.out_dir) / "report.json", report.dump(2) + "\n");

  for (const auto& w : warnings) err << "warning: " << w.get<std::string>() << "\n";
  if (c.json) {
    out << report.dump(2) << "\n";
  } else {
    for (const auto& ch : checks)
      out << "check " << ch.name << ": " << (ch.passed ? "PASS" : "FAIL") << " (" << ch.detail << ")\n";
    for (const auto& r : reports)
      out << "report " << r["lemma"].get<std::string>() << "/" << r["part"].get<std::string>() << ": "
          << r["verdict"].get<std::string>() << "\n";
    out << "gate: " << gate.verdict << "\n";
    if (failing == 0) out << "exact checks: all " << checks.size() << " pass\n";
    else out << "exact checks: " << failing << " of " << checks.size() << " FAIL\n";
  }
  return failing == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_constants(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::optional<RealSpec> spec;
  if (!c.spec.empty()) spec = load_spec(c.spec);
  ConstantSet cs;
  try {
    cs = constants(c.lambda ? *c.lambda : lambda3_decimal(), spec ? &*spec : nullptr);
  } catch (const std::out_of_range& e) {
    throw UsageError(e.what());
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& w : cs.warnings) err << "warning: " << w << "\n";
  Json j = constants_to_json(cs);
  if (c.json) {
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  const std::vector<std::string> order = {"lambda",  "theta", "alpha",   "beta",          "gamma",
                                          "lambda2", "lambda3", "lambda3_alt", "gamma_over_lambda3",
                                          "sqrt2_minus_1", "tau4", "c1"};
  for (const auto& k : order) {
    if (j[k].is_null()) continue;
    out << std::left << std::setw(20) << k << j[k]["value"].get<std::string>() << "  (width "
        << j[k]["width"].get<std::string>() << ")\n";
  }
  return kExitOk;
}

int cmd_heights(const RunConfig& c, std::ostream& out, std::ostream&) {
  auto read_basis = [](const std::string& text) {
    try {
      return matrix_from_json(Json::parse(text));
    } catch (const Json::parse_error& e) {
      throw UsageError(std::string("malformed basis JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  };
  IntMatrix a = read_basis(c.basis);
  if (a.empty()) throw UsageError("--basis needs at least one row");
  const int n = static_cast<int>(a.front().size());
  RationalSubspace s = saturate(a, n);
  Json j;
  j["subspace"] = subspace_to_json(s);
  j["complement"] = subspace_to_json(orthogonal_complement(s));
  j["duality_holds"] = duality_holds(s);
  j["input_is_lattice_basis"] = is_lattice_basis_of_span(a, n);
  if (!c.other.empty()) {
    IntMatrix b = read_basis(c.other);
    if (b.empty() || static_cast<int>(b.front().size()) != n) throw UsageError("--other must live in the same space");
    RationalSubspace t = saturate(b, n);
    HeightRatio r = height_product_ratio(s, t);
    j["other"] = subspace_to_json(t);
    j["sum"] = subspace_to_json(sum(s, t));
    j["intersection"] = subspace_to_json(intersect(s, t));
    j["ratio_sup"] = r.sup.get_str();
    j["ratio_euclid_squared"] = r.euclid_squared.get_str();
  }
  out << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal points, heights and verification reports for simultaneous approximation"};
  app.name("diophlab");
  app.require_subcommand(1);
  RunConfig c;

  auto* mp = app.add_subcommand("minimal-points", "Compute the minimal-point sequence and write it to files");
  mp->add_option("--spec", c.spec, "Spec JSON, inline or a file path")->required();
  mp->add_option("--n", c.n, "Dimension n (default 3)");
  mp->add_option("--xmax", c.xmax, "Norm bound X_max")->required();
  mp->add_option("--precision-bits", c.precision_bits, "Initial working precision in bits");
  mp->add_option("--out", c.out_dir, "Output directory");
  mp->add_option("--format", c.formats, "Comma-separated output formats: json,csv");
  mp->add_flag("--json", c.json, "Print the sequence JSON to stdout");

  auto* vf = app.add_subcommand("verify", "Run exact checks and ratio reports on a sequence");
  vf->add_option("--spec", c.spec, "Spec JSON, inline or a file path");
  vf->add_option("--sequence", c.sequence, "Sequence JSON written by minimal-points");
  vf->add_option("--n", c.n, "Dimension n (default 3)");
  vf->add_option("--xmax", c.xmax, "Norm bound X_max");
  vf->add_option("--lambda", c.lambda, "Exponent used on the right-hand sides (default lambda3)");
  vf->add_option("--lemmas", c.lemmas, "Comma-separated report ids or 'all'");
  vf->add_option("--seed", c.seed, "Seed for the random identity batches");
  vf->add_option("--precision-bits", c.precision_bits, "Initial working precision in bits");
  vf->add_option("--out", c.out_dir, "Output directory for report.json");
  vf->add_flag("--json", c.json, "Print the report JSON to stdout");

  auto* cn = app.add_subcommand("constants", "Print the exponent constants to 50 digits");
  cn->add_option("--lambda", c.lambda, "Exponent lambda in (0, 1] (default lambda3)");
  cn->add_option("--spec", c.spec, "Optional spec, used for c1");
  cn->add_flag("--json", c.json, "Machine-readable output");

  auto* hs = app.add_subcommand("heights", "Heights, Grassmann coordinates and complements of rational subspaces");
  hs->add_option("--basis", c.basis, "Spanning vectors as JSON, e.g. [[1,2,3],[0,1,1]]")->required();
  hs->add_option("--other", c.other, "A second subspace for sum and intersection");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (mp->parsed()) return cmd_minimal_points(c, out, err);
    if (vf->parsed()) {
      if (!c.spec.empty() && c.xmax.empty()) throw UsageError("verify --spec needs --xmax");
      return cmd_verify(c, out, err);
    }
    if (cn->parsed()) return cmd_constants(c, out, err);
    if (hs->parsed()) return cmd_heights(c, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidSpec& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SuspectedRationality& e) {
    err << "invalid spec: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EscalationFailure& e) {
    err << "precision failure: " << e.what() << "\n";
    return kExitPrecision;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace diophlab

#include "diophlab/io.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <sstream>

namespace diophlab {

namespace {

mpz_class integer_from_json(const Json& j, const std::string& what) {
  mpz_class v;
  if (j.is_number_unsigned()) return mpz_class(std::to_string(j.get<unsigned long long>()));
  if (j.is_number_integer()) return mpz_class(std::to_string(j.get<long long>()));
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty() || v.set_str(s, 10) != 0) throw InvalidSpec(what + ": not an integer: " + s);
    return v;
  }
  throw InvalidSpec(what + ": integer expected");
}

// "1", "-2.375", "1e-3", "3/2"
mpq_class rational_from_text(const std::string& text) {
  if (text.find('/') != std::string::npos) {
    mpq_class q;
    if (q.set_str(text, 10) != 0 || q.get_den() == 0) throw InvalidSpec("not a rational: " + text);
    q.canonicalize();
    return q;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) negative = text[pos++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_digit = false, seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits += c;
      seen_digit = true;
      if (seen_point) --scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InvalidSpec("not a decimal number: " + text);
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') throw InvalidSpec("not a decimal number: " + text);
    try {
      std::size_t used = 0;
      long e = std::stol(text.substr(pos + 1), &used);
      if (pos + 1 + used != text.size()) throw InvalidSpec("not a decimal number: " + text);
      scale += e;
    } catch (const std::logic_error&) {
      throw InvalidSpec("not a decimal number: " + text);
    }
  }
  mpz_class m(digits, 10);
  if (negative) m = -m;
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(scale)));
  mpq_class q = scale >= 0 ? mpq_class(m * p) : mpq_class(m, p);
  q.canonicalize();
  return q;
}

std::string rational_text(const mpq_class& q) { return q.get_str(10); }

Json integers(const std::vector<mpz_class>& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(c.get_str());
  return a;
}

}  // namespace

RealSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidSpec("spec must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) throw InvalidSpec("spec needs a string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  const std::string label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "";
  if (kind == "algebraic") {
    if (!j.contains("poly") || !j["poly"].is_array()) throw InvalidSpec("algebraic spec needs 'poly'");
    if (!j.contains("interval") || !j["interval"].is_array() || j["interval"].size() != 2)
      throw InvalidSpec("algebraic spec needs 'interval' with two endpoints");
    std::vector<mpz_class> coeffs;
    for (const auto& c : j["poly"]) coeffs.push_back(integer_from_json(c, "poly"));
    mpq_class ends[2];
    for (int k = 0; k < 2; ++k) {
      const Json& e = j["interval"][k];
      if (e.is_string()) ends[k] = rational_from_text(e.get<std::string>());
      else if (e.is_number_integer()) ends[k] = mpq_class(integer_from_json(e, "interval"));
      else throw InvalidSpec("interval endpoints must be decimal strings");
    }
    return RealSpec::algebraic(IntPoly(coeffs), ends[0], ends[1], label);
  }
  if (kind == "cf") {
    if (!j.contains("a0")) throw InvalidSpec("cf spec needs 'a0'");
    if (!j.contains("quotients") || !j["quotients"].is_array()) throw InvalidSpec("cf spec needs 'quotients'");
    std::vector<mpz_class> q;
    for (const auto& c : j["quotients"]) q.push_back(integer_from_json(c, "quotients"));
    bool periodic = false;
    if (j.contains("periodic")) {
      if (!j["periodic"].is_boolean()) throw InvalidSpec("'periodic' must be a boolean");
      periodic = j["periodic"].get<bool>();
    }
    std::size_t pre = 0;
    if (j.contains("preperiod")) {
      if (!j["preperiod"].is_number_unsigned()) throw InvalidSpec("'preperiod' must be a non-negative integer");
      pre = j["preperiod"].get<std::size_t>();
    }
    return RealSpec::continued_fraction(integer_from_json(j["a0"], "a0"), q, periodic, pre, label);
  }
  throw InvalidSpec("unknown spec kind: " + kind);
}

Json spec_to_json(const RealSpec& spec) {
  Json j;
  if (spec.kind() == SpecKind::algebraic) {
    const auto& a = spec.as_algebraic();
    j["kind"] = "algebraic";
    j["poly"] = integers(a.poly.coefficients());
    j["interval"] = {rational_text(a.lo), rational_text(a.hi)};
  } else {
    const auto& c = spec.as_continued_fraction();
    j["kind"] = "cf";
    j["a0"] = c.a0.get_str();
    j["quotients"] = integers(c.quotients);
    j["periodic"] = c.periodic;
    j["preperiod"] = c.preperiod;
  }
  j["label"] = spec.label();
  return j;
}

RealSpec load_spec(const std::string& text_or_path) {
  std::string text = text_or_path;
  std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    std::ifstream in(text_or_path);
    if (!in) throw InvalidSpec("cannot read spec file: " + text_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidSpec(std::string("malformed spec JSON: ") + e.what());
  }
  return spec_from_json(j);
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string l_midpoint_decimal(const Enclosure& L) {
  Dyadic mid = (L.lower() + L.upper()) * Dyadic(mpz_class(1), -1);
  return mid.to_decimal(17, 0);
}

Json sequence_to_json(const MinimalPointSequence& seq, const std::string& timestamp) {
  Json j;
  j["header"] = {{"timestamp", timestamp}, {"tool", "diophlab"}};
  j["spec"] = spec_to_json(seq.spec);
  j["n"] = seq.n;
  j["X_max"] = seq.X_max.get_str();
  j["tie_rule"] = seq.tie_rule;
  j["precision_bits"] = seq.precision_bits;
  Json recs = Json::array();
  for (const auto& r : seq.records) {
    Json e;
    e["i"] = r.index;
    e["x"] = integers(r.x.coords);
    e["X"] = r.X.get_str();
    e["L_lo"] = r.L.lower().to_decimal(20, -1);
    e["L_hi"] = r.L.upper().to_decimal(20, +1);
    e["L_exact"] = {r.L.lower().to_exact_string(), r.L.upper().to_exact_string()};
    e["witness"] = {{"x0", r.witness.x0.get_str()}, {"k", r.witness.k}, {"xk", r.witness.xk.get_str()}};
    recs.push_back(e);
  }
  j["records"] = recs;
  return j;
}

MinimalPointSequence sequence_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("records") || !j["records"].is_array())
      throw InvalidSpec("sequence JSON needs 'records'");
    RealSpec spec = spec_from_json(j.at("spec"));
    MinimalPointSequence seq(spec, j.at("n").get<int>(), integer_from_json(j.at("X_max"), "X_max"));
    if (j.contains("tie_rule")) seq.tie_rule = j["tie_rule"].get<std::string>();
    if (j.contains("precision_bits")) seq.precision_bits = j["precision_bits"].get<long>();
    for (const auto& e : j["records"]) {
      MinimalPointRecord r;
      r.index = e.at("i").get<std::size_t>();
      std::vector<mpz_class> x;
      for (const auto& c : e.at("x")) x.push_back(integer_from_json(c, "x"));
      r.x = ApproxVector(x);
      r.X = integer_from_json(e.at("X"), "X");
      if (e.contains("L_exact")) {
        r.L = Enclosure(Dyadic::parse_exact(e["L_exact"][0].get<std::string>()),
                        Dyadic::parse_exact(e["L_exact"][1].get<std::string>()));
      } else {
        mpq_class lo = rational_from_text(e.at("L_lo").get<std::string>());
        mpq_class hi = rational_from_text(e.at("L_hi").get<std::string>());
        r.L = Enclosure::outward(lo, hi, -200);
      }
      if (e.contains("witness")) {
        const Json& w = e["witness"];
        r.witness.x0 = integer_from_json(w.at("x0"), "witness");
        r.witness.k = w.at("k").get<int>();
        r.witness.xk = integer_from_json(w.at("xk"), "witness");
      } else {
        r.witness.x0 = r.x[0];
        r.witness.k = 1;
        r.witness.xk = r.x[1];
      }
      seq.records.push_back(r);
    }
    return seq;
  } catch (const Json::exception& e) {
    throw InvalidSpec(std::string("malformed sequence JSON: ") + e.what());
  }
}

std::string sequence_to_csv(const MinimalPointSequence& seq) {
  std::ostringstream os;
  os << "i";
  for (int k = 0; k <= seq.n; ++k) os << ",x" << k;
  os << ",X,L_mid\n";
  for (const auto& r : seq.records) {
    os << r.index;
    for (const auto& c : r.x.coords) os << ',' << c.get_str();
    os << ',' << r.X.get_str() << ',' << l_midpoint_decimal(r.L) << '\n';
  }
  return os.str();
}

std::vector<CsvRow> parse_sequence_csv(const std::string& text) {
  std::vector<CsvRow> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) throw std::invalid_argument("short CSV row: " + line);
    CsvRow r;
    r.i = std::stoul(cells.front());
    for (std::size_t k = 1; k + 2 < cells.size(); ++k) r.x.emplace_back(cells[k], 10);
    r.X = mpz_class(cells[cells.size() - 2], 10);
    r.L_mid = cells.back();
    rows.push_back(r);
  }
  return rows;
}

Json report_to_json(const RatioReport& r) {
  Json j;
  j["lemma"] = r.lemma;
  j["part"] = r.part;
  j["statement"] = r.statement;
  j["two_sided"] = r.two_sided;
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"indices", row.indices}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"ratio", row.ratio}});
  j["rows"] = rows;
  j["max_ratio"] = r.max_ratio;
  j["min_ratio"] = r.min_ratio;
  j["applicable_count"] = r.applicable_count;
  j["trimmed_count"] = r.trimmed_count;
  j["verdict"] = r.verdict;
  j["half_run_max_ratio"] = r.half_run_max_ratio ? Json(*r.half_run_max_ratio) : Json(nullptr);
  j["drift_flag"] = r.drift_flag;
  return j;
}

Json check_to_json(const ExactCheck& c) {
  return {{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}};
}

Json gate_to_json(const GateReport& g) {
  Json j;
  j["applicable"] = g.applicable;
  j["reason"] = g.reason;
  j["max_tail_estimate"] = g.max_tail_estimate;
  j["last_estimate"] = g.last_estimate;
  j["tail_inf"] = g.tail_inf;
  j["tail_count"] = g.tail_count;
  j["above_ceiling"] = g.above_ceiling;
  j["within_slack"] = g.within_slack;
  j["c_norm_checked"] = g.c_norm_checked;
  j["c_norm_floor_holds"] = g.c_norm_floor_holds;
  Json rows = Json::array();
  for (const auto& row : g.c_norm_rows)
    rows.push_back({{"indices", row.indices}, {"norm_C", row.lhs}, {"X_power", row.rhs}, {"ratio", row.ratio}});
  j["c_norm_rows"] = rows;
  j["verdict"] = g.verdict;
  return j;
}

Json constants_to_json(const ConstantSet& cs, int digits) {
  auto v = [&](const RealInterval& x) { return Json{{"value", x.decimal(digits)}, {"width", x.width_decimal()}}; };
  Json j;
  j["lambda"] = v(cs.lambda);
  j["theta"] = v(cs.theta);
  j["alpha"] = v(cs.alpha);
  j["beta"] = v(cs.beta);
  j["gamma"] = v(cs.gamma);
  j["lambda2"] = v(cs.lambda2);
  j["lambda3"] = v(cs.lambda3);
  j["lambda3_alt"] = v(cs.lambda3_alt);
  j["gamma_over_lambda3"] = v(cs.lambda3_cofactor);
  j["sqrt2_minus_1"] = v(cs.sqrt2_minus_1);
  j["tau4"] = v(cs.tau4);
  j["c1"] = cs.c1 ? v(*cs.c1) : Json(nullptr);
  j["theta_at_least_one"] = cs.theta_at_least_one;
  j["warnings"] = cs.warnings;
  return j;
}

Json subspace_to_json(const RationalSubspace& s) {
  Json j;
  j["n"] = s.ambient();
  j["p"] = s.dim();
  Json basis = Json::array();
  for (const auto& row : s.basis()) basis.push_back(integers(row));
  j["basis"] = basis;
  j["grassmann"] = integers(s.grassmann().entries);
  j["H_sup"] = s.height_sup().get_str();
  j["H_euclid_squared"] = s.height_euclid_squared().get_str();
  j["H_euclid"] = s.height(HeightNorm::euclid);
  return j;
}

IntMatrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw std::invalid_argument("basis must be an array of rows");
  IntMatrix m;
  for (const auto& row : j) {
    if (!row.is_array()) throw std::invalid_argument("basis rows must be arrays");
    IntVector v;
    for (const auto& c : row) v.push_back(integer_from_json(c, "basis"));
    if (!m.empty() && v.size() != m.front().size()) throw std::invalid_argument("basis rows differ in length");
    m.push_back(v);
  }
  return m;
}

}  // namespace diophlab

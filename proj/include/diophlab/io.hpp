#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "diophlab/approximation.hpp"
#include "diophlab/constants.hpp"
#include "diophlab/lab.hpp"
#include "diophlab/subspace.hpp"

namespace diophlab {

using Json = nlohmann::json;

/// {"kind":"algebraic","poly":[...],"interval":["lo","hi"],"label":...} or
/// {"kind":"cf","a0":...,"quotients":[...],"periodic":bool,"preperiod":k,"label":...}.
/// Integers may be JSON numbers or decimal strings. Throws InvalidSpec.
RealSpec spec_from_json(const Json& j);
Json spec_to_json(const RealSpec& spec);
/// Inline JSON (starting with '{') or a path to a JSON file. Throws InvalidSpec.
RealSpec load_spec(const std::string& text_or_path);

/// Current UTC time, ISO 8601. Only ever written into a header object.
std::string utc_timestamp();

Json sequence_to_json(const MinimalPointSequence& seq, const std::string& timestamp);
/// Throws InvalidSpec on malformed input.
MinimalPointSequence sequence_from_json(const Json& j);
/// Columns i, x0..xn, X, L_mid.
std::string sequence_to_csv(const MinimalPointSequence& seq);
struct CsvRow {
  std::size_t i = 0;
  std::vector<mpz_class> x;
  mpz_class X;
  std::string L_mid;
};
std::vector<CsvRow> parse_sequence_csv(const std::string& text);
/// Decimal midpoint of an L enclosure as written to CSV.
std::string l_midpoint_decimal(const Enclosure& L);

Json report_to_json(const RatioReport& r);
Json check_to_json(const ExactCheck& c);
Json gate_to_json(const GateReport& g);
Json constants_to_json(const ConstantSet& cs, int digits = 50);
Json subspace_to_json(const RationalSubspace& s);
/// [[1,2],[3,4]] with numbers or strings.
IntMatrix matrix_from_json(const Json& j);

}  // namespace diophlab

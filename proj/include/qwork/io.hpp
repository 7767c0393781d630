#pragma once

// JSON and file helpers shared by the command-line driver.
//
// Numbers are written as JSON doubles (shortest round-trip form). With
// `full` precision the exact or multiprecision values are added as decimal
// strings under "<key>_full".

#include "qwork/errors.hpp"
#include "qwork/lanczos.hpp"
#include "qwork/numeric.hpp"
#include "qwork/timeseries.hpp"
#include "qwork/workstats.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace qwork {

using Json = nlohmann::ordered_json;

enum class EmitPrecision { digits17, full };

EmitPrecision parse_emit_precision(const std::string& s);

template <class T>
Json to_json(const LanczosCoefficients<T>& lc, EmitPrecision p = EmitPrecision::digits17) {
  Json j;
  Json a = Json::array(), b = Json::array();
  for (const auto& x : lc.a) a.push_back(to_double(x));
  for (int n = 1; n <= static_cast<int>(lc.b_squared.size()); ++n) {
    const double b2 = to_double(lc.b_squared[static_cast<std::size_t>(n - 1)]);
    b.push_back(b2 > 0 ? std::sqrt(b2) : 0.0);
  }
  j["a"] = a;
  j["b"] = b;
  j["terminated"] = lc.terminated;
  j["precision_bits"] = lc.precision_bits;
  if (p == EmitPrecision::full) {
    Json af = Json::array(), bf = Json::array();
    for (const auto& x : lc.a) af.push_back(to_string_full(x));
    for (const auto& x : lc.b_squared) bf.push_back(to_string_full(x));
    j["a_full"] = af;
    j["b_squared_full"] = bf;
  }
  return j;
}

/// Reads {"a": [...], "b": [...], "terminated": bool}; "b_squared" may
/// replace "b". Entries are numbers or decimal/"p/q" strings.
LanczosCoefficients<double> lanczos_from_json(const Json& j);

template <class T>
Json to_json(const WorkSpectrum<T>& s) {
  Json lines = Json::array();
  for (const auto& l : s.lines()) lines.push_back(Json::array({to_double(l.energy), to_double(l.weight)}));
  return Json{{"convention", to_string(s.convention())}, {"tail_bound", to_double(s.tail_bound())}, {"lines", lines}};
}

/// A JSON number, or a string holding a decimal or "p/q" literal, read exactly.
Rational json_rational(const Json& v, const std::string& what);
std::vector<Rational> json_rational_array(const Json& v, const std::string& what);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);
void write_csv_file(const std::filesystem::path& path, const TimeSeries& ts);

/// Creates `dir` if needed; ArgumentError when it cannot be used.
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace qwork

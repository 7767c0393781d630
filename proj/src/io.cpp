#include "qwork/io.hpp"

#include <fstream>
#include <sstream>

namespace qwork {

EmitPrecision parse_emit_precision(const std::string& s) {
  if (s == "17" || s == "digits17") return EmitPrecision::digits17;
  if (s == "full") return EmitPrecision::full;
  throw ArgumentError("unknown emit precision '" + s + "' (expected 17|full)");
}

Rational json_rational(const Json& v, const std::string& what) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_number()) {
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ArgumentError(what + ": non-finite number");
    // Through the shortest decimal form, so 0.1 means 1/10.
    return parse_rational(Json(x).dump());
  }
  throw ArgumentError(what + ": expected a number or a numeric string");
}

std::vector<Rational> json_rational_array(const Json& v, const std::string& what) {
  if (!v.is_array()) throw ArgumentError(what + ": expected an array");
  std::vector<Rational> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(json_rational(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

LanczosCoefficients<double> lanczos_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("a")) throw ArgumentError("lanczos JSON: missing \"a\"");
  LanczosCoefficients<double> lc;
  for (const auto& x : json_rational_array(j.at("a"), "a")) lc.a.push_back(to_double(x));
  if (j.contains("b_squared")) {
    for (const auto& x : json_rational_array(j.at("b_squared"), "b_squared")) lc.b_squared.push_back(to_double(x));
  } else if (j.contains("b")) {
    for (const auto& x : json_rational_array(j.at("b"), "b")) {
      const double b = to_double(x);
      if (b < 0) throw DomainError("lanczos JSON: negative b");
      lc.b_squared.push_back(b * b);
    }
  }
  if (lc.a.empty()) throw ArgumentError("lanczos JSON: empty \"a\"");
  if (lc.b_squared.size() + 1 != lc.a.size()) {
    throw ArgumentError("lanczos JSON: need exactly one fewer b than a");
  }
  lc.terminated = j.value("terminated", false);
  lc.precision_bits = j.value("precision_bits", 53u);
  return lc;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ArgumentError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << text;
  if (!out) throw ArgumentError("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_csv_file(const std::filesystem::path& path, const TimeSeries& ts) {
  std::ostringstream os;
  ts.write_csv(os);
  write_text_file(path, os.str());
}

void prepare_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ArgumentError("output directory " + dir.string() + " is not usable");
  }
}

}  // namespace qwork

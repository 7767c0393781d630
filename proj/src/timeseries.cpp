#include "qwork/timeseries.hpp"

#include "qwork/errors.hpp"
#include "qwork/numeric.hpp"

#include <cmath>
#include <ostream>

namespace qwork {

void TimeSeries::add_channel(std::string name, std::vector<double> values) {
  if (values.size() != t_.size()) {
    throw ArgumentError("channel '" + name + "' has " + std::to_string(values.size()) + " points, grid has " +
                        std::to_string(t_.size()));
  }
  names_.push_back(std::move(name));
  channels_.push_back(std::move(values));
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return channels_[i];
  }
  throw ArgumentError("no channel named '" + name + "'");
}

void TimeSeries::write_csv(std::ostream& os) const {
  os << 't';
  for (const auto& n : names_) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < t_.size(); ++i) {
    os << format17(t_[i]);
    for (const auto& c : channels_) os << ',' << format17(c[i]);
    os << '\n';
  }
}

std::vector<double> uniform_grid(double tmax, double dt) {
  if (!(dt > 0) || !(tmax >= 0) || !std::isfinite(tmax)) throw ArgumentError("time grid needs dt > 0 and tmax >= 0");
  const auto steps = static_cast<long>(std::llround(tmax / dt));
  std::vector<double> t;
  t.reserve(static_cast<std::size_t>(steps + 1));
  for (long i = 0; i <= steps; ++i) t.push_back(static_cast<double>(i) * dt);
  return t;
}

}  // namespace qwork

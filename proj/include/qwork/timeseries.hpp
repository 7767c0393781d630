#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qwork {

/// Uniform time grid with named real channels, written as CSV.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<double> t) : t_(std::move(t)) {}

  const std::vector<double>& times() const { return t_; }
  std::size_t size() const { return t_.size(); }

  void add_channel(std::string name, std::vector<double> values);
  const std::vector<double>& channel(const std::string& name) const;
  const std::vector<std::string>& names() const { return names_; }

  /// Header `t,<names...>`; every value at 17 significant digits.
  void write_csv(std::ostream& os) const;

 private:
  std::vector<double> t_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> channels_;
};

/// t_i = i * dt for i = 0..round(tmax/dt); products, not accumulation, so
/// the grid is reproducible.
std::vector<double> uniform_grid(double tmax, double dt);

}  // namespace qwork

#include "qwork/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qwork {

void ChainQuench::validate() const {
  if (n < 1) throw ArgumentError("chain: N must be at least 1");
  if (!(lambda0 >= 0) || !(lambda1 >= 0) || !std::isfinite(lambda0) || !std::isfinite(lambda1)) {
    throw ArgumentError("chain: lambda0 and lambda1 must be finite and non-negative");
  }
  if (!(coupling >= 0) || !std::isfinite(coupling)) throw ArgumentError("chain: coupling must be finite and non-negative");
  if (lambda0 == 0 && lambda1 == 0) throw ArgumentError("chain: lambda0 = lambda1 = 0 (doubly critical) is not supported");
}

namespace {

// sin(w1 t)/w1, continuous at w1 = 0.
double sin_over_omega(double w1, double t) { return w1 > 0 ? std::sin(w1 * t) / w1 : t; }

}  // namespace

KrylovChain mode_chain(const ModePair<double>& m, Convention conv) {
  m.require_finite();
  const double big = m.big_omega_w1();
  const double small = std::abs(m.small_omega_w1());
  if (small == 0) return KrylovChain::from_coefficients(mode_lanczos(m, 1, conv));
  const double shift = conv == Convention::work ? m.omega0 / 2 : 0.0;
  return KrylovChain::from_generators([=](int n) { return (2.0 * n + 0.5) * big - shift; },
                                      [=](int n) { return 0.5 * std::sqrt(2.0 * (2.0 * n * n - n)) * small; });
}

ModeEnvelope mode_envelope(const ModePair<double>& m, double t) {
  m.require_finite();
  const double big = m.big_omega_w1();
  if (m.zero_mode()) {
    const double x = big * t;
    return {std::hypot(1.0, x), std::atan(x)};
  }
  // f = (-1)^k (cos s + i W1 sin s) with s = w1 t - k pi in [-pi/2, pi/2).
  const double tau = m.omega1 * t;
  const double k = std::floor((tau + M_PI / 2) / M_PI);
  const double s = tau - k * M_PI;
  const double re = std::cos(s);
  const double im = big * std::sin(s) / m.omega1;
  return {std::hypot(re, im), k * M_PI + std::atan2(im, re)};
}

std::complex<double> mode_autocorrelation(const ModePair<double>& m, double t) {
  const auto env = mode_envelope(m, t);
  return std::polar(1.0 / std::sqrt(env.modulus), env.phase / 2);
}

double su11_norm_squared(int n) {
  if (n < 0) throw ArgumentError("su11_norm_squared: n must be non-negative");
  return std::exp(std::lgamma(n + 0.5) - std::lgamma(n + 1.0) - 0.5 * std::log(M_PI));
}

std::complex<double> mode_phi(const ModePair<double>& m, double t, int n) {
  if (n < 0) throw ArgumentError("mode_phi: n must be non-negative");
  const auto env = mode_envelope(m, t);
  const std::complex<double> phi0 = std::polar(1.0 / std::sqrt(env.modulus), -env.phase / 2);
  if (n == 0) return phi0;
  // A+ = r i e^{-i theta}, r = W~1 w1 sin(w1 t)/(w1 |f|)
  const double r = m.small_omega_w1() * sin_over_omega(m.omega1, t) / env.modulus;
  const double norm = std::sqrt(su11_norm_squared(n));
  return norm * phi0 * std::pow(r, n) * std::polar(1.0, n * (M_PI / 2 - env.phase));
}

double mode_spread_complexity(const ModePair<double>& m, double t) {
  if (t == 0) return 0.0;
  m.require_finite();
  const double x = m.small_omega_w1() * sin_over_omega(m.omega1, t);
  return 0.5 * x * x;
}

TimeSeries total_spread_complexity(const ChainQuench& q, const std::vector<double>& t_grid) {
  auto modes = normal_modes<double>(q);
  for (const auto& m : modes) m.require_finite();
  std::vector<ModePair<double>> zero, rest;
  for (const auto& m : modes) (m.zero_mode() ? zero : rest).push_back(m);
  // Stable order: decreasing |W~1|, ties keep k order.
  std::stable_sort(rest.begin(), rest.end(), [](const auto& x, const auto& y) {
    return std::abs(x.small_omega()) > std::abs(y.small_omega());
  });

  auto kahan = [](const std::vector<ModePair<double>>& ms, double t) {
    double sum = 0.0, comp = 0.0;
    for (const auto& m : ms) {
      const double y = mode_spread_complexity(m, t) - comp;
      const double s = sum + y;
      comp = (s - sum) - y;
      sum = s;
    }
    return sum;
  };

  std::vector<double> c_zero, c_rest, c_total;
  for (double t : t_grid) {
    c_zero.push_back(kahan(zero, t));
    c_rest.push_back(kahan(rest, t));
    c_total.push_back(c_zero.back() + c_rest.back());
  }
  TimeSeries ts(t_grid);
  ts.add_channel("c_zero", std::move(c_zero));
  ts.add_channel("c_rest", std::move(c_rest));
  ts.add_channel("c_total", std::move(c_total));
  return ts;
}

double rest_complexity_bound(const ChainQuench& q) {
  double sum = 0.0;
  for (const auto& m : normal_modes<double>(q)) {
    if (m.zero_mode()) continue;
    m.require_finite();
    const double s = m.small_omega();
    sum += 0.5 * s * s;
  }
  return sum;
}

double zero_mode_coefficient(const ChainQuench& q) {
  double c = 0.0;
  for (const auto& m : normal_modes<double>(q)) {
    if (m.zero_mode()) {
      m.require_finite();
      c += m.omega0 * m.omega0 / 8;
    }
  }
  return c;
}

double zero_mode_dominance_time(const ChainQuench& q) {
  const double c = zero_mode_coefficient(q);
  if (c == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(rest_complexity_bound(q) / c);
}

}  // namespace qwork

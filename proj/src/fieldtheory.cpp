#include "qwork/fieldtheory.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <functional>

namespace qwork {

void FieldQuench::validate() const {
  if (d < 1) throw ArgumentError("field: dimension must be at least 1");
  if (!(m0 >= 0) || !(m1 >= 0) || !std::isfinite(m0) || !std::isfinite(m1)) {
    throw ArgumentError("field: masses must be finite and non-negative");
  }
  if (m0 == 0 && m1 == 0) throw ArgumentError("field: m0 = m1 = 0 is not supported");
  if (!(cutoff > 0) || !std::isfinite(cutoff)) throw ArgumentError("field: cutoff must be finite and positive");
  if (volume && (!(*volume > 0) || !std::isfinite(*volume))) throw ArgumentError("field: volume must be positive");
  if (!(rel_tol > 0)) throw ArgumentError("field: quadrature tolerance must be positive");
  if (!(panel_width > 0)) throw ArgumentError("field: panel width must be positive");
}

double FieldQuench::omega0(double k) const { return std::hypot(k, m0); }
double FieldQuench::omega1(double k) const { return std::hypot(k, m1); }

double momentum_measure(int d) {
  if (d < 1) throw ArgumentError("momentum_measure: d must be at least 1");
  const double solid_angle = 2 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
  return solid_angle / std::pow(2 * M_PI, d);
}

ModeSqueeze mode_squeeze(double w0, double w1) {
  const double s = w0 + w1;
  if (!(s > 0)) throw DomainError("mode_squeeze: w0 + w1 must be positive");
  return {(w0 - w1) / s, 4 * w0 * w1 / (s * s)};
}

namespace {

// 1 - eta^2 e^{-2i w1 t} = (1 - eta^2) + eta^2 * 2i sin(w1 t) e^{-i w1 t}
std::complex<double> squeeze_denominator(const ModeSqueeze& s, double w1, double t) {
  const double x = s.eta * s.eta;
  const std::complex<double> one_minus_phase = 2.0 * std::sin(w1 * t) * std::complex<double>(0.0, 1.0) * std::polar(1.0, -w1 * t);
  return s.one_minus_eta_sq + x * one_minus_phase;
}

void require_mode(double w0, double w1) {
  if (!(w1 > 0)) throw DomainError("mode_cf: w1 = 0 (massless zero mode) is excluded");
  if (!(w0 >= 0) || !std::isfinite(w0) || !std::isfinite(w1)) throw DomainError("mode_cf: invalid frequencies");
}

// x A_{n-1}(x) for the Eulerian polynomials: A_0 = 1,
// A(n, j) = (j + 1) A(n-1, j) + (n - j) A(n-1, j-1).
double x_eulerian(int n_minus_1, double x) {
  std::vector<double> row{1.0};
  for (int n = 1; n <= n_minus_1; ++n) {
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      if (j < static_cast<int>(row.size())) v += (j + 1) * row[static_cast<std::size_t>(j)];
      if (j >= 1) v += (n - j) * row[static_cast<std::size_t>(j - 1)];
      next[static_cast<std::size_t>(j)] = v;
    }
    row = std::move(next);
  }
  double acc = 0.0;
  for (auto it = row.rbegin(); it != row.rend(); ++it) acc = acc * x + *it;
  return x * acc;
}

template <class F>
auto integrate_panels(const FieldQuench& q, F f, const char* what) -> decltype(f(1.0)) {
  using R = decltype(f(1.0));
  using boost::math::quadrature::gauss_kronrod;
  const int panels = std::max(1, static_cast<int>(std::ceil(q.cutoff / q.panel_width)));
  const double w = q.cutoff / panels;
  R total{};
  for (int p = 0; p < panels; ++p) {
    const double a = p * w, b = (p + 1) * w;
    double err = 0.0, l1 = 0.0;
    const R piece = gauss_kronrod<double, 31>::integrate(f, a, b, 20, q.rel_tol, &err, &l1);
    if (!(err <= q.rel_tol * l1) && !(l1 == 0)) {
      throw PrecisionError(std::string(what) + ": quadrature did not converge on k in [" + format17(a) + ", " +
                           format17(b) + "] (error " + format17(err) + ", L1 " + format17(l1) + ")");
    }
    total += piece;
  }
  return total;
}

double radial_weight(int d, double k) { return d == 1 ? 1.0 : std::pow(k, d - 1); }

}  // namespace

std::complex<double> mode_cf(double w0, double w1, double t) { return std::exp(mode_log_cf(w0, w1, t)); }

std::complex<double> mode_cf(double k, const FieldQuench& q, double t) { return mode_cf(q.omega0(k), q.omega1(k), t); }

std::complex<double> mode_log_cf(double w0, double w1, double t) {
  require_mode(w0, w1);
  if (t == 0) return 0.0;
  const auto s = mode_squeeze(w0, w1);
  return std::complex<double>(0.5 * std::log(s.one_minus_eta_sq), 0.5 * (w0 - w1) * t) -
         0.5 * std::log(squeeze_denominator(s, w1, t));
}

double mode_cumulant(double w0, double w1, int n) {
  if (n < 1) throw ArgumentError("mode_cumulant: n must be at least 1");
  if (!(w0 > 0) || !(w1 >= 0)) throw DomainError("mode_cumulant: need w0 > 0 and w1 >= 0");
  const auto s = mode_squeeze(w0, w1);
  // 2 w1 / (1 - eta^2) = (w0 + w1)^2 / (2 w0), finite at w1 = 0.
  const double scale = (w0 + w1) * (w0 + w1) / (2 * w0);
  double beta = 0.5 * x_eulerian(n - 1, s.eta * s.eta) * std::pow(scale, n);
  if (n == 1) beta += 0.5 * (w1 - w0);
  return beta;
}

LogCfDecomposition log_cf_decomposition(const FieldQuench& q, double t) {
  q.validate();
  const double mu = momentum_measure(q.d);
  LogCfDecomposition out;
  out.f_b = 0.5 * mu * integrate_panels(q, [&](double k) {
    return radial_weight(q.d, k) * (q.omega1(k) - q.omega0(k));
  }, "f_b");
  out.f_s = -0.25 * mu * integrate_panels(q, [&](double k) {
    return radial_weight(q.d, k) * std::log(mode_squeeze(q.omega0(k), q.omega1(k)).one_minus_eta_sq);
  }, "f_s");
  out.f_c = 0.5 * mu * integrate_panels(q, [&](double k) {
    const double w1 = q.omega1(k);
    return radial_weight(q.d, k) * std::log(squeeze_denominator(mode_squeeze(q.omega0(k), w1), w1, t));
  }, "f_C");
  return out;
}

std::complex<double> log_cf_density(const FieldQuench& q, double t) {
  q.validate();
  if (q.m0 == q.m1) return 0.0;
  return momentum_measure(q.d) * integrate_panels(q, [&](double k) {
    return radial_weight(q.d, k) * mode_log_cf(q.omega0(k), q.omega1(k), t);
  }, "log_cf_density");
}

CumulantDensity cumulant_density(const FieldQuench& q, int n, double uv_tol) {
  q.validate();
  if (n < 1) throw ArgumentError("cumulant_density: n must be at least 1");
  CumulantDensity out;
  out.n = n;
  if (q.m0 == q.m1) return out;
  // From a massless field beta_n^{mode} ~ (m1^2 / 2k)^n (n-1)!/2 as k -> 0.
  if (q.m0 == 0 && n >= q.d) {
    throw DivergenceError("cumulant_density: beta_" + std::to_string(n) + " is infrared divergent for m0 = 0 in d = " +
                          std::to_string(q.d));
  }
  const double mu = momentum_measure(q.d);
  auto integrand = [&](double k) { return radial_weight(q.d, k) * mode_cumulant(q.omega0(k), q.omega1(k), n); };
  out.value = mu * integrate_panels(q, integrand, "cumulant_density");
  const double lam = q.cutoff;
  out.uv_sensitivity = mu * lam * integrand(lam);
  // Divergent: the cutoff still matters at this tolerance and the
  // sensitivity does not decay as the cutoff grows (log or power growth).
  const double next = mu * 2 * lam * integrand(2 * lam);
  const bool matters = std::abs(out.uv_sensitivity) > uv_tol * std::max(std::abs(out.value), 1e-300);
  const bool not_decaying = std::abs(next) >= 0.75 * std::abs(out.uv_sensitivity);
  out.divergent = matters && not_decaying;
  return out;
}

GaussianWorkLaw gaussian_limit(const FieldQuench& q, double uv_tol) {
  q.validate();
  if (!q.volume) throw ArgumentError("gaussian_limit: an explicit volume L^d is required");
  const auto b1 = cumulant_density(q, 1, uv_tol);
  const auto b2 = cumulant_density(q, 2, uv_tol);
  return {b1.value, b2.value, *q.volume, b1.divergent || b2.divergent};
}

std::complex<double> gaussian_cf(const GaussianWorkLaw& g, double t) {
  return std::exp(std::complex<double>(-0.5 * t * t * g.variance(), -t * g.gamma1));
}

LanczosCoefficients<double> gaussian_lanczos(const GaussianWorkLaw& g, int n_max) {
  if (!(g.gamma2 >= 0)) throw DomainError("gaussian_lanczos: gamma2 must be non-negative");
  if (!(g.volume > 0)) throw ArgumentError("gaussian_lanczos: volume must be positive");
  if (n_max < 1) throw ArgumentError("gaussian_lanczos: n_max must be at least 1");
  LanczosCoefficients<double> lc;
  lc.precision_bits = 53;
  lc.a.push_back(g.gamma1);
  if (g.gamma2 == 0) {
    lc.terminated = true;
    return lc;
  }
  for (int n = 1; n < n_max; ++n) {
    lc.a.push_back(g.gamma1);
    lc.b_squared.push_back(n * g.variance());
  }
  return lc;
}

KrylovChain gaussian_chain(const GaussianWorkLaw& g) {
  if (g.gamma2 == 0) return KrylovChain::from_coefficients(gaussian_lanczos(g, 1));
  if (!(g.gamma2 > 0)) throw DomainError("gaussian_chain: gamma2 must be non-negative");
  const double a = g.gamma1, var = g.variance();
  return KrylovChain::from_generators([a](int) { return a; }, [var](int n) { return std::sqrt(n * var); });
}

double gaussian_spread_complexity(const GaussianWorkLaw& g, double t) { return g.variance() * t * t; }

TimeSeries gaussian_complexity_series(const GaussianWorkLaw& g, const std::vector<double>& t_grid) {
  std::vector<double> c;
  c.reserve(t_grid.size());
  for (double t : t_grid) c.push_back(gaussian_spread_complexity(g, t));
  TimeSeries ts(t_grid);
  ts.add_channel("complexity", std::move(c));
  return ts;
}

}  // namespace qwork

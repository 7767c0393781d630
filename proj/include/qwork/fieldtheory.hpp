#pragma once

// Mass quench m0 -> m1 of a free scalar field in d spatial dimensions.
//
// Momentum modes decouple, so ln G is a momentum integral of per-mode
// log-CFs. Everything is returned per unit volume (a density); the volume
// L^d enters only where a caller supplies it explicitly. All integrals are
// cut off at |k| = cutoff and no divergence is regulated away.

#include "qwork/bell.hpp"
#include "qwork/errors.hpp"
#include "qwork/krylov.hpp"
#include "qwork/lanczos.hpp"
#include "qwork/numeric.hpp"
#include "qwork/sequences.hpp"
#include "qwork/timeseries.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace qwork {

struct FieldQuench {
  int d = 1;
  double m0 = 1.0;
  double m1 = 1.0;
  double cutoff = 10.0;
  std::optional<double> volume;  // L^d; nullopt = infinite system
  double rel_tol = 1e-8;         // per-panel quadrature target
  double panel_width = 1.0;      // [0, cutoff] is split into panels no wider than this

  void validate() const;
  double omega0(double k) const;
  double omega1(double k) const;
};

/// Omega_d / (2 pi)^d with Omega_d = 2 pi^{d/2} / Gamma(d/2).
double momentum_measure(int d);

/// eta = (w0 - w1)/(w0 + w1) and 1 - eta^2 = 4 w0 w1/(w0 + w1)^2, the latter
/// computed without cancellation.
struct ModeSqueeze {
  double eta;
  double one_minus_eta_sq;
};
ModeSqueeze mode_squeeze(double w0, double w1);

/// G_k(t) = e^{i(w0 - w1)t/2} sqrt((1 - eta^2)/(1 - eta^2 e^{-2i w1 t})),
/// in the work convention. Re(1 - eta^2 e^{i phi}) >= 1 - eta^2 > 0, so the
/// principal root is the branch continuous from G_k(0) = 1.
std::complex<double> mode_cf(double k, const FieldQuench& q, double t);
std::complex<double> mode_cf(double w0, double w1, double t);
/// ln G_k(t) on the same branch.
std::complex<double> mode_log_cf(double w0, double w1, double t);

/// Work cumulant of one mode,
///   beta_n = 1/2 sum_{m>=1} eta^{2m} (2 m w1)^n / m + delta_{n1} (w1 - w0)/2,
/// summed in closed form: sum_m m^{n-1} x^m = x A_{n-1}(x)/(1-x)^n with the
/// Eulerian polynomial A and x = eta^2.
double mode_cumulant(double w0, double w1, int n);

/// ln G(t)/L^d = -(i f_b t + 2 f_s + f_C(it)) with
///   f_b = 1/2 int (w1 - w0),
///   f_s = -1/4 int ln(1 - eta^2)        (= -ln|<0~|0>| per volume),
///   f_C = 1/2 int ln(1 - eta^2 e^{-2i w1 t}),
/// where int = momentum_measure(d) int_0^cutoff k^{d-1} dk. With this split
/// f_C(0) = -2 f_s, so ln G(0) = 0.
struct LogCfDecomposition {
  double f_b = 0.0;
  double f_s = 0.0;
  std::complex<double> f_c;

  std::complex<double> total(double t) const { return -(std::complex<double>(0.0, f_b * t) + 2 * f_s + f_c); }
};
LogCfDecomposition log_cf_decomposition(const FieldQuench& q, double t);
std::complex<double> log_cf_density(const FieldQuench& q, double t);

struct CumulantDensity {
  int n = 1;
  double value = 0.0;
  /// d value / d ln(cutoff) = measure * cutoff^d * beta_n^{mode}(cutoff).
  double uv_sensitivity = 0.0;
  /// |uv_sensitivity| > uv_tol |value| and the sensitivity does not decay
  /// when the cutoff doubles (log or power growth of the integral).
  bool divergent = false;
};
/// Throws DivergenceError for the infrared divergence at m0 = 0, n >= d.
CumulantDensity cumulant_density(const FieldQuench& q, int n, double uv_tol = 1e-3);

/// Large-volume limit: G(t) = exp(-i t gamma1 - t^2 gamma2 / (2 L^d)), with
/// the intensive work W/L^d in mind. gamma1, gamma2 are cumulant densities.
struct GaussianWorkLaw {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double volume = 1.0;
  bool divergent = false;  // either density flagged UV-divergent

  double variance() const { return gamma2 / volume; }
};
GaussianWorkLaw gaussian_limit(const FieldQuench& q, double uv_tol = 1e-3);

std::complex<double> gaussian_cf(const GaussianWorkLaw& g, double t);

/// M_0..M_{n_max} of the Gaussian law (all cumulants above the second vanish).
template <class T>
MomentSequence<Complex<T>> gaussian_moments(const T& gamma1, const T& variance, int n_max) {
  CumulantSequence<Complex<T>> c;
  c.convention = Convention::work;
  c.values.push_back(Complex<T>(gamma1));
  c.values.push_back(Complex<T>(variance));
  c = pad_cumulants(std::move(c), n_max);
  BellOptions opt;
  opt.max_order = std::max(opt.max_order, n_max);
  return moments_from_cumulants(c, n_max, opt);
}

/// a_n = gamma1, b_n = sqrt(n gamma2 / L^d), n < n_max.
///
/// These are the exact coefficients of a Gaussian law (Hermite polynomials):
/// the Weyl-Heisenberg chain whose n-dependent diagonal term vanishes in this
/// limit. A one-site chain when gamma2 = 0.
LanczosCoefficients<double> gaussian_lanczos(const GaussianWorkLaw& g, int n_max);

/// The same chain as generators (unbounded), for the Krylov solver.
KrylovChain gaussian_chain(const GaussianWorkLaw& g);

/// (gamma2 / L^d) t^2. Exact on the Gaussian chain: the state is a displaced
/// vacuum with Poisson Krylov weights.
double gaussian_spread_complexity(const GaussianWorkLaw& g, double t);

/// Channel complexity over a grid.
TimeSeries gaussian_complexity_series(const GaussianWorkLaw& g, const std::vector<double>& t_grid);

}  // namespace qwork

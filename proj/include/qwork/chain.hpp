#pragma once

// Sudden quench of a periodic harmonic chain.
//
// Each normal mode is an independent oscillator quenched from w0 to w1. The
// evolved mode is an su(1,1) coherent state (Bargmann index 1/4), which gives
// closed forms for the return amplitude, the Lanczos coefficients and the
// spread complexity. All closed forms are written in terms of the finite
// products W1 w1 and W~1 w1 so that a zero mode (w1 = 0) needs no limit.

#include "qwork/errors.hpp"
#include "qwork/krylov.hpp"
#include "qwork/lanczos.hpp"
#include "qwork/numeric.hpp"
#include "qwork/sequences.hpp"
#include "qwork/timeseries.hpp"

#include <cmath>
#include <complex>
#include <vector>

namespace qwork {

struct ChainQuench {
  int n = 1;
  double lambda0 = 1.0;
  double lambda1 = 1.0;
  double coupling = 0.0;  // k0 = k1

  void validate() const;
};

template <class T>
struct ModePair {
  T omega0{1};
  T omega1{1};

  bool zero_mode() const { return omega1 == 0; }

  /// W1 w1 = (w0^2 + w1^2) / (2 w0)
  T big_omega_w1() const { return T((omega0 * omega0 + omega1 * omega1) / (2 * omega0)); }
  /// W~1 w1 = (w0^2 - w1^2) / (2 w0)
  T small_omega_w1() const { return T((omega0 * omega0 - omega1 * omega1) / (2 * omega0)); }

  T big_omega() const { return T(big_omega_w1() / nonzero_omega1()); }
  T small_omega() const { return T(small_omega_w1() / nonzero_omega1()); }

  /// Bogoliubov coefficients U = (w1 + w0)/(2 sqrt(w1 w0)), V = (w1 - w0)/(2 sqrt(w1 w0)).
  T u() const {
    using std::sqrt;
    return T((omega1 + omega0) / (2 * sqrt(T(nonzero_omega1() * omega0))));
  }
  T v() const {
    using std::sqrt;
    return T((omega1 - omega0) / (2 * sqrt(T(nonzero_omega1() * omega0))));
  }

  void require_finite() const {
    if (!(omega0 > 0)) throw DivergenceError("pre-quench frequency w0 = 0: all Lanczos coefficients diverge");
    if (omega1 < 0) throw DomainError("negative post-quench frequency");
  }

 private:
  const T& nonzero_omega1() const {
    if (!(omega1 > 0)) throw DomainError("W1 and W~1 are undefined for a zero mode; use the products with w1");
    return omega1;
  }
};

/// (w_{0k}, w_{1k}) for k = 1..N with w^2 = lambda^2 + 4 k0 sin^2(pi k / N).
template <class T = double>
std::vector<ModePair<T>> normal_modes(const ChainQuench& q) {
  using std::sin;
  using std::sqrt;
  q.validate();
  std::vector<ModePair<T>> modes;
  modes.reserve(static_cast<std::size_t>(q.n));
  const T l0(q.lambda0), l1(q.lambda1), k0(q.coupling);
  for (int k = 1; k <= q.n; ++k) {
    T disp(0);
    if (k % q.n != 0) {
      T s = sin(T(pi_value<T>() * k / q.n));
      disp = 4 * k0 * s * s;
    }
    modes.push_back({T(sqrt(T(l0 * l0 + disp))), T(sqrt(T(l1 * l1 + disp)))});
  }
  return modes;
}

/// a_n = (2n + 1/2) W1 w1, b_l^2 = (2l^2 - l)/2 (W~1 w1)^2, for n, l < n_max.
///
/// In the work convention every a_n is lowered by E0 = w0/2. When w0 = w1 the
/// chain closes after a_0.
template <class T>
LanczosCoefficients<T> mode_lanczos(const ModePair<T>& m, int n_max, Convention conv = Convention::hamiltonian) {
  m.require_finite();
  if (n_max < 1) throw ArgumentError("mode_lanczos: n_max must be at least 1");
  const T big = m.big_omega_w1();
  const T small = m.small_omega_w1();
  const T shift = conv == Convention::work ? T(m.omega0 / 2) : T(0);
  LanczosCoefficients<T> lc;
  lc.precision_bits = precision_bits_v<T>;
  lc.a.push_back(T(big / 2 - shift));
  if (small == 0) {
    lc.terminated = true;
    return lc;
  }
  for (int n = 1; n < n_max; ++n) {
    lc.a.push_back(T((2 * T(n) + T(1) / 2) * big - shift));
    lc.b_squared.push_back(T(T(2 * n * n - n) / 2 * small * small));
  }
  return lc;
}

/// Taylor moments M_0..M_{n_max} of G(t) = f(t)^{-1/2},
/// f(t) = cos(w1 t) + i W1 w1 sin(w1 t)/w1, by the power-series recurrence
/// for f^alpha. Only w1^2 enters, so zero modes are covered.
template <class T>
MomentSequence<Complex<T>> mode_moments(const ModePair<T>& m, int n_max, Convention conv = Convention::hamiltonian) {
  m.require_finite();
  if (n_max < 0) throw ArgumentError("mode_moments: n_max must be non-negative");
  using C = Complex<T>;
  const T w1sq = m.omega1 * m.omega1;
  const T big = m.big_omega_w1();
  // Taylor coefficients of f.
  std::vector<C> f(static_cast<std::size_t>(n_max + 1));
  T w1pow(1), fact(1);  // w1^{2j}, k!
  for (int k = 0; k <= n_max; ++k) {
    if (k > 0) fact *= k;
    const int j = k / 2;
    const T sign = j % 2 ? T(-1) : T(1);
    if (k % 2 == 0) {
      f[static_cast<std::size_t>(k)] = C(T(sign * w1pow / fact));
    } else {
      f[static_cast<std::size_t>(k)] = C(T(0), T(sign * big * w1pow / fact));
      w1pow *= w1sq;
    }
  }
  // g = f^alpha with f_0 = 1:  n g_n = sum_k (alpha k - (n - k)) f_k g_{n-k}.
  const T alpha = T(-1) / 2;
  std::vector<C> g{C(T(1))};
  for (int n = 1; n <= n_max; ++n) {
    C acc(T(0));
    for (int k = 1; k <= n; ++k) {
      acc += T(alpha * k - (n - k)) * (f[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(n - k)]);
    }
    g.push_back(acc / T(n));
  }
  if (conv == Convention::work) {
    // G_work(t) = G(t) e^{i E0 t}: Cauchy product with the exponential series.
    const C ie0(T(0), T(m.omega0 / 2));
    std::vector<C> e{C(T(1))};
    for (int n = 1; n <= n_max; ++n) e.push_back(e.back() * ie0 / T(n));
    std::vector<C> prod;
    for (int n = 0; n <= n_max; ++n) {
      C acc(T(0));
      for (int k = 0; k <= n; ++k) acc += g[static_cast<std::size_t>(k)] * e[static_cast<std::size_t>(n - k)];
      prod.push_back(acc);
    }
    g = std::move(prod);
  }
  MomentSequence<Complex<T>> out;
  out.convention = conv;
  T nfact(1);
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) nfact *= n;
    out.values.push_back(g[static_cast<std::size_t>(n)] * nfact);
  }
  out.truncation_error.assign(out.values.size(), 0.0);
  return out;
}

/// The closed-form chain of one mode as generators, for the Krylov solver.
KrylovChain mode_chain(const ModePair<double>& m, Convention conv = Convention::hamiltonian);

/// f(t) = cos(w1 t) + i W1 w1 sin(w1 t)/w1 and its phase, continued from
/// arg f(0) = 0 without branch jumps.
struct ModeEnvelope {
  double modulus;
  double phase;
};
ModeEnvelope mode_envelope(const ModePair<double>& m, double t);

/// Return amplitude S(t) = <psi(t)|psi(0)> = conj(f(t)^{-1/2}) on the
/// continuous branch; its conjugate is the characteristic function G(t).
std::complex<double> mode_autocorrelation(const ModePair<double>& m, double t);

/// phi_n(t) = N_n phi_0 (A+)^n, phi_0 = f^{-1/2}, A+ = i W~1 sin(w1 t)/f,
/// N_n^2 = Gamma(n+1/2)/(n! sqrt(pi)).
///
/// This is the amplitude on the su(1,1) basis |K_n> proportional to
/// (K+)^n|0>. The tridiagonal chain with b_n > 0 uses
/// (-sign(W~1))^n |K_n> instead, so its amplitudes differ by that sign.
std::complex<double> mode_phi(const ModePair<double>& m, double t, int n);

/// N_n^2 = Gamma(n+1/2)/(n! sqrt(pi)) = C(2n, n)/4^n.
double su11_norm_squared(int n);

/// C(t) = (W~1 w1)^2 sin^2(w1 t)/(2 w1^2); w0^2 t^2/8 for a zero mode.
double mode_spread_complexity(const ModePair<double>& m, double t);

/// Channels c_zero, c_rest, c_total over the grid. Zero modes (w1 = 0) go to
/// c_zero; the rest are Kahan-summed in order of decreasing |W~1|.
TimeSeries total_spread_complexity(const ChainQuench& q, const std::vector<double>& t_grid);

/// Sum over non-zero modes of max_t C_k(t) = W~1k^2/2: a strict bound on c_rest.
double rest_complexity_bound(const ChainQuench& q);

/// Coefficient c of c_zero(t) = c t^2 (sum of w0^2/8 over zero modes).
double zero_mode_coefficient(const ChainQuench& q);

/// Time beyond which c_zero exceeds rest_complexity_bound, hence c_rest; infinite
/// without zero modes.
double zero_mode_dominance_time(const ChainQuench& q);

}  // namespace qwork

#include "doctest.h"

#include "qwork/bell.hpp"
#include "qwork/chain.hpp"
#include "qwork/fieldtheory.hpp"
#include "qwork/krylov.hpp"
#include "qwork/lanczos.hpp"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace qwork;
using qwork::testing::fd_weights;

namespace {

// Truncated m-series of the per-mode cumulant.
double series_cumulant(double w0, double w1, int n) {
  const double eta = (w0 - w1) / (w0 + w1);
  double sum = 0.0;
  for (int m = 1; m < 4000; ++m) {
    const double term = 0.5 * std::pow(eta * eta, m) * std::pow(2.0 * m * w1, n) / m;
    sum += term;
    if (term < 1e-18 * std::abs(sum)) break;
  }
  return n == 1 ? sum + 0.5 * (w1 - w0) : sum;
}

}  // namespace

TEST_CASE("momentum measure") {
  CHECK(momentum_measure(1) == doctest::Approx(1 / M_PI).epsilon(1e-15));
  CHECK(momentum_measure(2) == doctest::Approx(1 / (2 * M_PI)).epsilon(1e-15));
  CHECK(momentum_measure(3) == doctest::Approx(1 / (2 * M_PI * M_PI)).epsilon(1e-15));
  CHECK_THROWS_AS(momentum_measure(0), ArgumentError);
}

TEST_CASE("mode_cf against the oscillator return amplitude") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> w(0.2, 4.0), tt(0.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const ModePair<double> m{w(rng), w(rng)};
    const double t = tt(rng);
    const auto g = mode_cf(m.omega0, m.omega1, t);
    const auto s = mode_autocorrelation(m, t);
    CHECK(std::abs(std::norm(g) - std::norm(s)) < 1e-12);
    // Same branch: G_work = conj(S) e^{i w0 t / 2}.
    CHECK(std::abs(g - std::conj(s) * std::polar(1.0, m.omega0 * t / 2)) < 1e-11);
  }
  FieldQuench same{1, 1.3, 1.3, 10.0};
  for (double t : {0.0, 1.0, 17.0}) CHECK(std::abs(mode_cf(0.7, same, t) - 1.0) < 1e-15);
  FieldQuench q{1, 1.0, 2.0, 10.0};
  CHECK(std::abs(mode_cf(1e8, q, 3.0) - 1.0) < 1e-7);  // phase ~ 3t/(4k)
  CHECK(std::abs(mode_cf(0.3, q, 0.0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(mode_cf(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("mode_cumulant: examples, series and chain identities") {
  CHECK(mode_cumulant(2, 1, 1) == doctest::Approx(-0.375).epsilon(1e-15));
  CHECK(mode_cumulant(2, 1, 2) == doctest::Approx(9.0 / 32).epsilon(1e-15));
  CHECK(mode_cumulant(1.5, 1.5, 3) == 0.0);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    const ModePair<double> m{w(rng), w(rng)};
    const double b1sq = mode_lanczos(m, 2).b_squared[0];
    CHECK(std::abs(mode_cumulant(m.omega0, m.omega1, 2) - b1sq) <= 1e-12 * b1sq);
    const double mean = mode_lanczos(m, 1, Convention::work).a[0];
    CHECK(std::abs(mode_cumulant(m.omega0, m.omega1, 1) - mean) <= 1e-12 * std::max(1.0, std::abs(mean)));
  }
  for (auto m : {ModePair<double>{2, 1}, ModePair<double>{1, 3}, ModePair<double>{0.7, 0.2}}) {
    for (int n = 1; n <= 8; ++n) {
      const double series = series_cumulant(m.omega0, m.omega1, n);
      CHECK(mode_cumulant(m.omega0, m.omega1, n) == doctest::Approx(series).epsilon(1e-12));
    }
  }
}

TEST_CASE("mode_cumulant matches Bell cumulants of the oscillator Taylor moments") {
  using F = Float<256>;
  const ModePair<F> m{F(3) / 2, F(1) / 3};
  auto moments = mode_moments(m, 8, Convention::work);
  auto beta = cumulants_from_moments(moments, 8);
  for (int n = 1; n <= 8; ++n) {
    const double exact = to_double(beta.beta(n).re);
    CHECK(std::abs(to_double(beta.beta(n).im)) < 1e-40);
    CHECK(mode_cumulant(1.5, 1.0 / 3, n) == doctest::Approx(exact).epsilon(1e-12));
  }
}

TEST_CASE("mode_cumulant at a critical endpoint") {
  // w1 -> 0: beta_n -> 1/2 (n-1)! (w0/2)^n, plus -w0/2 for n = 1.
  const double w0 = 1.7;
  CHECK(mode_cumulant(w0, 0.0, 1) == doctest::Approx(0.5 * w0 / 2 - w0 / 2).epsilon(1e-15));
  CHECK(mode_cumulant(w0, 0.0, 3) == doctest::Approx(0.5 * 2 * std::pow(w0 / 2, 3)).epsilon(1e-14));
  CHECK(mode_cumulant(w0, 1e-9, 3) == doctest::Approx(mode_cumulant(w0, 0.0, 3)).epsilon(1e-8));
}

TEST_CASE("log_cf_density: trivial quench, t = 0 and the three-term split") {
  FieldQuench same{2, 0.8, 0.8, 10.0};
  CHECK(log_cf_density(same, 3.0) == std::complex<double>(0.0));
  for (int d : {1, 2, 3}) {
    FieldQuench q{d, 1.0, 2.0, 8.0};
    CHECK(std::abs(log_cf_density(q, 0.0)) < 1e-12);
    const auto split0 = log_cf_decomposition(q, 0.0);
    CHECK(std::abs(split0.f_c + 2 * split0.f_s) < 1e-10 * std::abs(split0.f_c));
    CHECK(std::abs(split0.f_c.imag()) < 1e-14);
    for (double t : {0.3, 2.0}) {
      const auto split = log_cf_decomposition(q, t);
      const auto direct = log_cf_density(q, t);
      CHECK(std::abs(split.total(t) - direct) < 1e-8 * std::abs(direct));
    }
    // f_b carries the mean shift of the zero-point energies.
    const double fb = log_cf_decomposition(q, 1.0).f_b;
    CHECK(fb > 0);
  }
}

TEST_CASE("cumulant densities equal finite-difference derivatives of the log-CF") {
  // beta_n = i^n d^n/dt^n ln G at t = 0 (G = <e^{-iWt}>).
  const int half = 6;
  const double h = 0.02;
  std::vector<double> nodes;
  for (int j = -half; j <= half; ++j) nodes.push_back(j * h);
  for (int d : {1, 2, 3}) {
    FieldQuench q{d, 1.0, 2.0, 5.0};
    q.rel_tol = 1e-13;
    std::vector<std::complex<double>> f;
    for (double t : nodes) f.push_back(log_cf_density(q, t));
    FieldQuench qc = q;
    qc.rel_tol = 1e-12;
    for (int n = 1; n <= 4; ++n) {
      const auto w = fd_weights(n, nodes);
      std::complex<double> deriv = 0.0;
      for (std::size_t j = 0; j < nodes.size(); ++j) deriv += w[j] * f[j];
      const double fd = times_i_pow(deriv, n).real();
      const double closed = cumulant_density(qc, n).value;
      CAPTURE(d);
      CAPTURE(n);
      CHECK(std::abs(fd - closed) < 1e-6 * std::abs(closed));
    }
  }
}

TEST_CASE("log-CF density matches a discretized product over modes") {
  // d = 1, k_j = 2 pi j / L, |j| <= J: (1/L) sum_j -> measure * int_0^cutoff.
  const int J = 5000;
  const double cutoff = 20.0;
  const double L = 2 * M_PI * J / cutoff;
  FieldQuench q{1, 1.0, 2.0, cutoff};
  q.rel_tol = 1e-12;
  for (double t : {0.4, 1.3}) {
    std::complex<double> log_product = 0.0;
    for (int j = -J; j <= J; ++j) {
      const double weight = (std::abs(j) == J) ? 0.5 : 1.0;  // trapezoid ends
      log_product += weight * mode_log_cf(q.omega0(2 * M_PI * j / L), q.omega1(2 * M_PI * j / L), t);
    }
    std::complex<double> product = 1.0;
    for (int j = -J; j <= J; ++j) {
      const auto g = mode_cf(std::abs(2 * M_PI * j / L), q, t);
      product *= (std::abs(j) == J) ? std::sqrt(g) : g;
    }
    const auto integral = std::exp(L * log_cf_density(q, t));
    CHECK(std::abs(product - std::exp(log_product)) < 1e-9 * std::abs(product));
    CHECK(std::abs(product - integral) < 1e-4 * std::abs(integral));
  }
}

TEST_CASE("cumulant_density: trivial quench, UV sensitivity and flags") {
  FieldQuench same{3, 1.0, 1.0, 50.0};
  for (int n = 1; n <= 4; ++n) {
    const auto c = cumulant_density(same, n);
    CHECK(c.value == 0.0);
    CHECK_FALSE(c.divergent);
  }
  // d = 3: the beta_1 integrand grows like k.
  FieldQuench q3{3, 1.0, 2.0, 50.0};
  CHECK(cumulant_density(q3, 1).divergent);
  // d = 1: beta_1 and beta_3 are log divergent, beta_2 converges.
  FieldQuench q1{1, 1.0, 2.0, 50.0};
  CHECK(cumulant_density(q1, 1).divergent);
  CHECK_FALSE(cumulant_density(q1, 2).divergent);
  CHECK(cumulant_density(q1, 3).divergent);

  // The sensitivity is the log-derivative in the cutoff.
  FieldQuench qa = q1, qb = q1;
  qa.rel_tol = qb.rel_tol = 1e-12;
  const double eps = 1e-4;
  qb.cutoff = q1.cutoff * std::exp(eps);
  const double slope = (cumulant_density(qb, 2).value - cumulant_density(qa, 2).value) / eps;
  CHECK(slope == doctest::Approx(cumulant_density(qa, 2).uv_sensitivity).epsilon(1e-3));

  // Massless pre- or post-quench field: the k -> 0 endpoint is integrable.
  FieldQuench critical{1, 1.0, 0.0, 10.0};
  const auto c2 = cumulant_density(critical, 2);
  CHECK(std::isfinite(c2.value));
  CHECK(c2.value > 0);
  FieldQuench from_massless{3, 0.0, 1.0, 10.0};
  CHECK(std::isfinite(cumulant_density(from_massless, 2).value));
  from_massless.d = 2;
  CHECK_THROWS_AS(cumulant_density(from_massless, 2), DivergenceError);

  CHECK_THROWS_AS(cumulant_density(q1, 0), ArgumentError);
  CHECK_THROWS_AS(cumulant_density(FieldQuench{0, 1.0, 2.0, 5.0}, 1), ArgumentError);
  CHECK_THROWS_AS(cumulant_density(FieldQuench{1, 0.0, 0.0, 5.0}, 1), ArgumentError);
}

TEST_CASE("quadrature failure names the panel") {
  FieldQuench q{1, 1.0, 2.0, 5.0};
  q.rel_tol = 1e-300;
  try {
    log_cf_density(q, 1.0);
    FAIL("expected PrecisionError");
  } catch (const PrecisionError& e) {
    CHECK(std::string(e.what()).find("k in [") != std::string::npos);
  }
}

TEST_CASE("Gaussian limit") {
  FieldQuench q{1, 1.0, 2.0, 50.0, 100.0};
  const auto g = gaussian_limit(q);
  CHECK(g.gamma1 == doctest::Approx(cumulant_density(q, 1).value));
  CHECK(g.gamma2 == doctest::Approx(cumulant_density(q, 2).value));
  CHECK(g.volume == 100.0);
  CHECK(g.divergent);  // beta_1 is log divergent in d = 1
  CHECK(gaussian_limit(FieldQuench{2, 1.0, 1.0, 10.0, 10.0}).gamma1 == 0.0);
  CHECK_THROWS_AS(gaussian_limit(FieldQuench{1, 1.0, 2.0, 5.0}), ArgumentError);

  const GaussianWorkLaw law{0.3, 2.0, 100.0};
  const double t = 1.7;
  CHECK(std::abs(gaussian_cf(law, t) - std::exp(std::complex<double>(-t * t * 0.01, -0.3 * t))) < 1e-15);
}

TEST_CASE("Gaussian moments: first-order coefficient is C(n, 2)") {
  // <W^n> = sum_k C(n, 2k) (2k-1)!! g^{n-2k} v^k; the O(v) term is C(n, 2) g^{n-2} v.
  const Rational g(3, 2), v(1, 7);
  auto m = gaussian_moments<Rational>(g, v, 8);
  for (int n = 0; n <= 8; ++n) {
    Rational expect(0), dfact(1);
    for (int k = 0; 2 * k <= n; ++k) {
      if (k > 0) dfact *= (2 * k - 1);
      Rational term = Rational(binomial(n, 2 * k)) * dfact;
      for (int j = 0; j < k; ++j) term *= v;
      for (int j = 0; j < n - 2 * k; ++j) term *= g;
      expect += term;
    }
    const auto w = times_i_pow(m[n], n);  // i^n M_n = <W^n>
    CHECK(w.re == expect);
    CHECK(w.im == 0);
  }
  // The linear coefficient in v: the paper-style polynomial would give 11/2 at n = 2.
  const Rational tiny(1, 1000000);
  auto m2 = gaussian_moments<Rational>(Rational(0), tiny, 2);
  CHECK(times_i_pow(m2[2], 2).re / tiny == Rational(binomial(2, 2)));
}

TEST_CASE("gaussian_lanczos and the recursion on the Gaussian moments") {
  const GaussianWorkLaw law{0.0, 2.0, 100.0};
  const auto lc = gaussian_lanczos(law, 4);
  REQUIRE(lc.b_squared.size() == 3);
  CHECK(lc.b(1) == doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));
  CHECK(lc.b(2) == doctest::Approx(std::sqrt(0.04)).epsilon(1e-15));
  CHECK(lc.b(3) == doctest::Approx(std::sqrt(0.06)).epsilon(1e-15));
  const auto flat = gaussian_lanczos(GaussianWorkLaw{1.0, 0.0, 10.0}, 5);
  CHECK(flat.terminated);
  CHECK(flat.size() == 1);
  CHECK(gaussian_spread_complexity(GaussianWorkLaw{1.0, 0.0, 10.0}, 5.0) == 0.0);
  CHECK(gaussian_spread_complexity(law, 10.0) == doctest::Approx(2.0).epsilon(1e-15));

  using F = Float<512>;
  const F gamma1 = F(7) / 5, var = F(1) / 50;
  const auto rec = lanczos_from_moments(hamiltonian_moments(gaussian_moments<F>(gamma1, var, 14)), 7);
  for (int n = 0; n < 7; ++n) CHECK(to_double(abs_value(F(rec.a[static_cast<std::size_t>(n)] - gamma1))) < 1e-100);
  for (int n = 1; n < 7; ++n) {
    CHECK(to_double(abs_value(F(rec.b_squared[static_cast<std::size_t>(n - 1)] - n * var))) < 1e-100);
  }
}

TEST_CASE("Krylov evolution on the Gaussian chain grows as (gamma2/L^d) t^2") {
  const GaussianWorkLaw law{0.5, 2.0, 100.0};
  const auto grid = uniform_grid(20.0, 0.5);
  KrylovOptions opt;
  opt.initial_truncation = 64;
  const auto run = evolve(gaussian_chain(law), grid, opt);
  double worst = 0.0;
  for (const auto& s : run.states) {
    if (s.t == 0) continue;
    worst = std::max(worst, std::abs(spread_complexity(s) / gaussian_spread_complexity(law, s.t) - 1.0));
  }
  MESSAGE("gaussian chain: truncation " << run.truncation << ", worst relative " << worst);
  CHECK(worst < 1e-3);
  const auto ts = gaussian_complexity_series(law, {1.0, 5.0, 20.0});
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(ts.channel("complexity")[i] / (ts.times()[i] * ts.times()[i]) == doctest::Approx(0.02).epsilon(1e-15));
  }
}

TEST_CASE("skewness of the total work narrows as (L^d)^{-1/2}") {
  FieldQuench q{1, 1.0, 2.0, 10.0};
  const double b2 = cumulant_density(q, 2).value, b3 = cumulant_density(q, 3).value;
  std::vector<double> skew;
  for (double vol : {1e2, 1e4, 1e6}) skew.push_back(vol * b3 / std::pow(vol * b2, 1.5));
  CHECK(skew[1] / skew[0] == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(skew[2] / skew[1] == doctest::Approx(0.1).epsilon(1e-12));
}

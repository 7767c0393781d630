#include "doctest.h"

#include "qwork/lanczos.hpp"
#include "qwork/workstats.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>

#include <random>

using namespace qwork;
using CQ = Complex<Rational>;

namespace {

template <class T>
HamiltonianMoments<T> raw_moments(const std::vector<T>& energies, const std::vector<T>& weights, int count) {
  HamiltonianMoments<T> h;
  for (int n = 0; n < count; ++n) {
    T sum(0);
    for (std::size_t j = 0; j < energies.size(); ++j) {
      T p = weights[j];
      for (int k = 0; k < n; ++k) p *= energies[j];
      sum += p;
    }
    h.values.push_back(sum);
  }
  return h;
}

struct RandomSpectrum {
  std::vector<Rational> energies;
  std::vector<Rational> weights;
};

// Distinct rational atoms with positive rational weights summing to one.
RandomSpectrum random_spectrum(std::mt19937_64& rng, int atoms) {
  RandomSpectrum s;
  std::uniform_int_distribution<int> e(-20, 20);
  while (static_cast<int>(s.energies.size()) < atoms) {
    Rational x(e(rng), 4);
    if (std::find(s.energies.begin(), s.energies.end(), x) == s.energies.end()) s.energies.push_back(x);
  }
  Rational total(0);
  for (int i = 0; i < atoms; ++i) {
    s.weights.push_back(qwork::testing::random_positive_rational(rng));
    total += s.weights.back();
  }
  for (auto& w : s.weights) w /= total;
  return s;
}

// Closed-form coefficients of the single-oscillator quench.
template <class T>
std::pair<T, T> oscillator_closed_form(const T& w0, const T& w1, int n) {
  const T big = (w0 * w0 + w1 * w1) / (2 * w0);   // Omega_1 w_1
  const T small = (w0 * w0 - w1 * w1) / (2 * w0); // Omega~_1 w_1
  T a = (2 * T(n) + T(0.5)) * big;
  T b2 = n >= 1 ? T(T(2) * (2 * n * n - n) * small * small / 4) : T(0);
  return {a, b2};
}

}  // namespace

TEST_CASE("hamiltonian_moments: rotates M_n into real h_n") {
  MomentSequence<CQ> m;
  const Rational c(5, 3);
  CQ p(Rational(1));
  for (int n = 0; n <= 5; ++n) {
    m.values.push_back(p);
    p = p * CQ(Rational(0), Rational(-c));
  }
  auto h = hamiltonian_moments(m);
  Rational cn(1);
  for (int n = 0; n <= 5; ++n, cn *= c) CHECK(h[n] == cn);

  WorkSpectrum<Rational> tp({{Rational(0), Rational(1, 2)}, {Rational(1), Rational(1, 2)}}, Convention::hamiltonian);
  auto h2 = hamiltonian_moments(work_moments(tp, 3));
  CHECK(h2[1] == Rational(1, 2));
  CHECK(h2[2] == Rational(1, 2));
  CHECK(h2[3] == Rational(1, 2));

  auto osc = hamiltonian_moments(work_moments(oscillator_overlaps<Real256>(Real256(2), Real256(1), Real256("1e-60")), 2));
  CHECK(to_double(osc[1]) == doctest::Approx(0.625).epsilon(1e-15));

  m.values[1] = CQ(Rational(1), Rational(0));  // i*M_1 would be imaginary
  CHECK_THROWS_AS(hamiltonian_moments(m), DomainError);
}

TEST_CASE("lanczos_from_moments: delta and two-point spectra") {
  const Rational c(-7, 2);
  auto delta = raw_moments<Rational>({c}, {Rational(1)}, 6);
  auto lc = lanczos_from_moments(delta, 3);
  CHECK(lc.terminated);
  REQUIRE(lc.size() == 1);
  CHECK(lc.a[0] == c);
  CHECK(lc.b_squared.empty());

  auto tp = raw_moments<Rational>({Rational(0), Rational(1)}, {Rational(1, 2), Rational(1, 2)}, 8);
  auto lc2 = lanczos_from_moments(tp, 4);
  CHECK(lc2.terminated);
  REQUIRE(lc2.size() == 2);
  CHECK(lc2.a[0] == Rational(1, 2));
  CHECK(lc2.a[1] == Rational(1, 2));
  CHECK(lc2.b_squared[0] == Rational(1, 4));

  auto tp_float = raw_moments<Real256>({Real256(0), Real256(1)}, {Real256(0.5), Real256(0.5)}, 8);
  auto lc3 = lanczos_from_moments(tp_float, 4);
  CHECK(lc3.terminated);
  CHECK(lc3.size() == 2);
  CHECK(to_double(lc3.b(1)) == doctest::Approx(0.5));
  CHECK(lc3.precision_bits == 256);
}

TEST_CASE("lanczos_from_moments: oscillator spectrum reproduces the closed form") {
  using R = Real256;
  auto spec = oscillator_overlaps<R>(R(2), R(1), R("1e-70"));
  auto h = hamiltonian_moments(work_moments(spec, 11, 1e-40));
  auto lc = lanczos_from_moments(h, 6);
  REQUIRE(lc.size() == 6);
  CHECK_FALSE(lc.terminated);
  for (int n = 0; n < 6; ++n) {
    auto [a, b2] = oscillator_closed_form<R>(R(2), R(1), n);
    CHECK(abs_value(R(lc.a[n] - a)) < R("1e-20") * a);
    if (n >= 1) CHECK(abs_value(R(lc.b_squared[n - 1] - b2)) < R("1e-20") * b2);
  }
  CHECK(to_double(lc.a[1]) == doctest::Approx(3.125));
  CHECK(to_double(lc.b(1)) == doctest::Approx(0.53033).epsilon(1e-5));
  CHECK(to_double(lc.b(2)) == doctest::Approx(1.29904).epsilon(1e-5));
  CHECK(to_double(lc.b(3)) == doctest::Approx(2.05396).epsilon(1e-5));
}

TEST_CASE("reconstruct_moments: small cases") {
  LanczosCoefficients<Rational> one;
  one.a = {Rational(3, 2)};
  for (int n = 0; n <= 5; ++n) {
    Rational p(1);
    for (int k = 0; k < n; ++k) p *= Rational(3, 2);
    CHECK(reconstruct_moments(one, n) == p);
  }
  LanczosCoefficients<Rational> two;
  two.a = {Rational(1, 2), Rational(1, 2)};
  two.b_squared = {Rational(1, 4)};
  CHECK(reconstruct_moments(two, 2) == Rational(1, 2));
}

TEST_CASE("reconstruct_moments agrees with dense Jacobi powers") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    LanczosCoefficients<double> lc;
    for (int i = 0; i < 6; ++i) lc.a.push_back(u(rng));
    for (int i = 1; i < 6; ++i) lc.b_squared.push_back(0.1 + std::abs(u(rng)));
    Eigen::MatrixXd j = JacobiMatrix<double>(lc).dense();
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(6, 6);
    auto all = reconstruct_moments_all(lc, 11);
    for (int n = 0; n <= 11; ++n) {
      CHECK(all[static_cast<std::size_t>(n)] == doctest::Approx(p(0, 0)).epsilon(1e-12));
      p = p * j;
    }
  }
}

TEST_CASE("lanczos round trip on random spectra is exact") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> atoms(1, 8);
  std::uniform_int_distribution<int> kdist(1, 8);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = random_spectrum(rng, atoms(rng));
    const int K = kdist(rng);
    auto h = raw_moments(s.energies, s.weights, 2 * K);
    auto lc = lanczos_from_moments(h, K);
    auto back = reconstruct_moments_all(lc, 2 * K - 1);
    for (int n = 0; n < 2 * K; ++n) CHECK(back[static_cast<std::size_t>(n)] == h[n]);
    if (static_cast<int>(s.energies.size()) < K) {
      CHECK(lc.terminated);
      CHECK(lc.size() == static_cast<int>(s.energies.size()));
    } else {
      CHECK(lc.size() == K);
    }
    for (const auto& b2 : lc.b_squared) CHECK(b2 > 0);
  }
}

TEST_CASE("lanczos identities in terms of the complex moments") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_spectrum(rng, 3 + trial % 6);
    WorkSpectrum<Rational> spec(
        [&] {
          std::vector<SpectralLine<Rational>> lines;
          for (std::size_t j = 0; j < s.energies.size(); ++j) lines.push_back({s.energies[j], s.weights[j]});
          return lines;
        }(),
        Convention::hamiltonian);
    auto m = work_moments(spec, 3);
    auto lc = lanczos_from_moments(hamiltonian_moments(m), 2);
    const CQ i(Rational(0), Rational(1));
    const CQ m1 = m[1], m2 = m[2], m3 = m[3];
    const CQ a0 = i * m1;
    const CQ b1sq = m1 * m1 - m2;
    REQUIRE(b1sq.im == 0);
    const CQ a1 = (i * m1 * m1 * m1 - i * m3) / b1sq.re - Rational(2) * (i * m1);
    CHECK(a0 == CQ(lc.a[0]));
    CHECK(b1sq == CQ(lc.b_squared[0]));
    CHECK(a1 == CQ(lc.a[1]));
    auto ids = lanczos_identities(hamiltonian_moments(m));
    CHECK(ids.a0 == lc.a[0]);
    CHECK(ids.b1_sq == lc.b_squared[0]);
    CHECK(ids.a1 == lc.a[1]);
  }
}

TEST_CASE("lanczos coefficients are shift and scale covariant") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = random_spectrum(rng, 5);
    const Rational shift = qwork::testing::random_rational(rng);
    const Rational scale = qwork::testing::random_positive_rational(rng);
    auto base = lanczos_from_moments(raw_moments(s.energies, s.weights, 10), 5);
    auto shifted_e = s.energies;
    auto scaled_e = s.energies;
    for (auto& e : shifted_e) e += shift;
    for (auto& e : scaled_e) e *= scale;
    auto shifted = lanczos_from_moments(raw_moments(shifted_e, s.weights, 10), 5);
    auto scaled = lanczos_from_moments(raw_moments(scaled_e, s.weights, 10), 5);
    for (int n = 0; n < base.size(); ++n) {
      CHECK(shifted.a[n] == base.a[n] + shift);
      CHECK(scaled.a[n] == base.a[n] * scale);
    }
    for (std::size_t n = 0; n < base.b_squared.size(); ++n) {
      CHECK(shifted.b_squared[n] == base.b_squared[n]);
      CHECK(scaled.b_squared[n] == base.b_squared[n] * scale * scale);
    }
  }
}

TEST_CASE("lanczos_from_cumulants") {
  using R = Real256;
  using CR = Complex<R>;
  CumulantSequence<CR> gauss;
  gauss.values = {CR(R(3)), CR(R(4))};
  auto lc = lanczos_from_cumulants(pad_cumulants(gauss, 3), 2);
  CHECK(to_double(lc.a[0]) == doctest::Approx(3.0));
  CHECK(to_double(lc.b(1)) == doctest::Approx(2.0));

  // Same path in exact arithmetic for the two-point law.
  WorkSpectrum<Rational> tp({{Rational(0), Rational(1, 2)}, {Rational(1), Rational(1, 2)}}, Convention::hamiltonian);
  auto direct = lanczos_from_moments(hamiltonian_moments(work_moments(tp, 7)), 4);
  auto via = lanczos_from_cumulants(cumulants(tp, 7), 4);
  CHECK(direct.a == via.a);
  CHECK(direct.b_squared == via.b_squared);
  CHECK(direct.terminated == via.terminated);

  // Oscillator: a_1 from beta_1..beta_3.
  auto osc = cumulants(oscillator_overlaps<R>(R(2), R(1), R("1e-70")), 3, 1e-30);
  auto lc_osc = lanczos_from_cumulants(osc, 2);
  CHECK(abs_value(R(lc_osc.a[1] - R("3.125"))) < R("1e-40"));
  CHECK(abs_value(R(lc_osc.a[0] - osc.beta(1).re)) < R("1e-60"));
  CHECK(abs_value(R(lc_osc.b_squared[0] - osc.beta(2).re)) < R("1e-60"));

  CHECK_THROWS_AS(lanczos_from_cumulants(gauss, 2), ArgumentError);
}

TEST_CASE("lanczos_from_moments: errors") {
  HamiltonianMoments<Rational> few{{Rational(1), Rational(0), Rational(1)}};
  CHECK_THROWS_AS(lanczos_from_moments(few, 2), ArgumentError);
  HamiltonianMoments<Rational> unnormalized{{Rational(2), Rational(0), Rational(1), Rational(0)}};
  CHECK_THROWS_AS(lanczos_from_moments(unnormalized, 2), DomainError);
  HamiltonianMoments<Rational> negative_variance{{Rational(1), Rational(0), Rational(-1), Rational(0)}};
  CHECK_THROWS_AS(lanczos_from_moments(negative_variance, 2), DomainError);
  HamiltonianMoments<Real256> negative_float{{Real256(1), Real256(0), Real256(-1), Real256(0)}};
  CHECK_THROWS_AS(lanczos_from_moments(negative_float, 2), DomainError);
}

namespace {

// Binomial(N, 1/2) law on {0..N}: exact rational moments, then rounded to Bits.
template <unsigned Bits>
std::pair<HamiltonianMoments<Rational>, HamiltonianMoments<Float<Bits>>> binomial_moments(int N, int count) {
  HamiltonianMoments<Rational> exact;
  HamiltonianMoments<Float<Bits>> rounded;
  for (int m = 0; m < count; ++m) {
    Rational s(0);
    for (int j = 0; j <= N; ++j) {
      Rational p(binomial(N, j));
      for (int q = 0; q < m; ++q) p *= j;
      s += p;
    }
    s /= Rational(Integer(1) << N);
    exact.values.push_back(s);
    rounded.values.push_back(Float<Bits>(s));
  }
  return {exact, rounded};
}

}  // namespace

TEST_CASE("lanczos_from_moments: precision doubles when 64 bits are not enough") {
  auto [exact, h64] = binomial_moments<64>(17, 34);
  auto lc = lanczos_from_moments(h64, 17);
  CHECK(lc.precision_bits > 64);
  REQUIRE(lc.size() == 17);
  // The oracle is the exact recursion on the rounded inputs: the answer must
  // belong to the moments we were given, not to the unrounded ones.
  HamiltonianMoments<Rational> as_given;
  for (const auto& x : h64.values) as_given.values.push_back(to_rational(x));
  auto oracle = lanczos_from_moments(as_given, 17);
  for (int n = 0; n < 17; ++n) {
    CHECK(to_double(lc.a[n]) == doctest::Approx(to_double(oracle.a[n])).epsilon(1e-12));
  }
  // Low orders are well conditioned and agree with the unrounded law.
  auto truth = lanczos_from_moments(exact, 17);
  CHECK(to_double(lc.a[1]) == doctest::Approx(to_double(truth.a[1])).epsilon(1e-12));
  CHECK(to_double(truth.a[0]) == doctest::Approx(8.5));

  CHECK_THROWS_AS(lanczos_from_moments(h64, 17, LanczosOptions{64}), PrecisionError);
}

TEST_CASE("lanczos_from_moments: rounding that breaks positivity is a domain error") {
  auto [exact, h64] = binomial_moments<64>(15, 32);
  CHECK_NOTHROW(lanczos_from_moments(exact, 16));
  CHECK_THROWS_AS(lanczos_from_moments(h64, 16), DomainError);
}

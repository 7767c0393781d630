#pragma once

// Lanczos coefficients from the moments of the return amplitude.
//
// Given h_n = <psi0|H^n|psi0>, the coefficients (a_n, b_n) are the entries of
// the Jacobi matrix J whose powers reproduce the moments: (J^n)_{00} = h_n.
// The tridiagonalization runs Chebyshev's modified-moment recursion on the
// raw moments. It loses digits roughly linearly in n, so floating inputs are
// processed in a wider type whenever a b_n^2 comes out negative.

#include "qwork/bell.hpp"
#include "qwork/errors.hpp"
#include "qwork/numeric.hpp"
#include "qwork/sequences.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace qwork {

/// h_0..h_{2K-1}, with h_0 = 1.
template <class T>
struct HamiltonianMoments {
  std::vector<T> values;

  int size() const { return static_cast<int>(values.size()); }
  const T& operator[](int n) const { return values.at(static_cast<std::size_t>(n)); }
};

template <class T>
struct LanczosCoefficients {
  std::vector<T> a;          // a_0 .. a_{K-1}
  std::vector<T> b_squared;  // b_1^2 .. b_{K-1}^2 (b_squared[0] is b_1^2)
  bool terminated = false;   // the chain closed: some b_n vanished
  unsigned precision_bits = 0;  // 0 = exact arithmetic

  int size() const { return static_cast<int>(a.size()); }

  /// b_n for n >= 1.
  T b(int n) const {
    if (n < 1 || n > static_cast<int>(b_squared.size())) throw ArgumentError("b index out of range");
    if constexpr (is_rational_v<T>) {
      throw ArgumentError("b_n is irrational in general; use b_squared for exact coefficients");
    } else {
      using std::sqrt;
      const T& b2 = b_squared[static_cast<std::size_t>(n - 1)];
      return b2 > 0 ? T(sqrt(b2)) : T(0);
    }
  }

  std::vector<T> b_values() const {
    std::vector<T> out;
    for (int n = 1; n <= static_cast<int>(b_squared.size()); ++n) out.push_back(b(n));
    return out;
  }
};

/// Symmetric tridiagonal matrix with diagonal a and off-diagonal b.
template <class T>
class JacobiMatrix {
 public:
  using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

  explicit JacobiMatrix(const LanczosCoefficients<T>& lc) : diag_(lc.size()), off_(std::max(lc.size() - 1, 0)) {
    for (int n = 0; n < lc.size(); ++n) diag_(n) = lc.a[static_cast<std::size_t>(n)];
    for (int n = 1; n < lc.size(); ++n) off_(n - 1) = lc.b(n);
  }
  JacobiMatrix(Vector diag, Vector off) : diag_(std::move(diag)), off_(std::move(off)) {}

  Eigen::Index size() const { return diag_.size(); }

  Vector apply(const Vector& v) const {
    const Eigen::Index n = size();
    Vector out(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      T acc = diag_(i) * v(i);
      if (i > 0) acc += off_(i - 1) * v(i - 1);
      if (i + 1 < n) acc += off_(i) * v(i + 1);
      out(i) = acc;
    }
    return out;
  }

  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = diag_(i);
    for (Eigen::Index i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = off_(i);
    return m;
  }

 private:
  Vector diag_;
  Vector off_;
};

/// (J^n)_{00} for n = 0..n_max by repeated tridiagonal products on e_0.
///
/// Works on b_n^2 directly, so it stays exact for rational coefficients: the
/// iteration is carried out on the symmetrized vector w_i = v_i * (b_1...b_i),
/// for which J v becomes a product with the non-symmetric matrix
/// [a_i on the diagonal, 1 above, b_i^2 below].
template <class T>
std::vector<T> reconstruct_moments_all(const LanczosCoefficients<T>& lc, int n_max) {
  const int dim = lc.size();
  if (dim == 0) throw ArgumentError("reconstruct_moments: empty coefficient set");
  Eigen::Matrix<T, Eigen::Dynamic, 1> w = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(dim);
  w(0) = T(1);
  std::vector<T> out{T(1)};
  for (int n = 1; n <= n_max; ++n) {
    Eigen::Matrix<T, Eigen::Dynamic, 1> next(dim);
    for (int i = 0; i < dim; ++i) {
      T acc = lc.a[static_cast<std::size_t>(i)] * w(i);
      if (i + 1 < dim) acc += w(i + 1);
      if (i > 0) acc += lc.b_squared[static_cast<std::size_t>(i - 1)] * w(i - 1);
      next(i) = acc;
    }
    w = std::move(next);
    out.push_back(w(0));
  }
  return out;
}

template <class T>
T reconstruct_moments(const LanczosCoefficients<T>& lc, int n) {
  if (n < 0) throw ArgumentError("reconstruct_moments: n must be non-negative");
  return reconstruct_moments_all(lc, n).back();
}

struct LanczosOptions {
  /// Upper bound for the automatic precision doubling.
  unsigned max_precision_bits = kMaxPrecisionBits;
};

/// h_n = i^n M_n; imaginary residue above the working tolerance is an error.
template <class T>
HamiltonianMoments<T> hamiltonian_moments(const MomentSequence<Complex<T>>& moments) {
  if (moments.values.empty()) throw ArgumentError("hamiltonian_moments: empty moment sequence");
  std::vector<Complex<T>> rotated;
  rotated.reserve(moments.values.size());
  for (int n = 0; n <= moments.order(); ++n) rotated.push_back(times_i_pow(moments[n], n));
  HamiltonianMoments<T> h{real_parts(rotated, half_precision_tolerance<T>(), "hamiltonian_moments")};
  if (abs_value(T(h.values[0] - 1)) > half_precision_tolerance<T>()) {
    throw DomainError("hamiltonian_moments: M_0 must equal 1");
  }
  return h;
}

namespace detail {

enum class RecursionStatus { ok, negative };

/// Chebyshev recursion in working type W. Returns `negative` (and the index)
/// when some b_k^2 is below -threshold.
template <class W>
RecursionStatus chebyshev_recursion(std::span<const W> h, int K, LanczosCoefficients<W>& out, int& failing_index,
                                    W& failing_value) {
  const W threshold = [&] {
    W h2 = h.size() > 2 ? abs_value(h[2]) : W(1);
    if (h2 < W(1)) h2 = W(1);
    return W(half_precision_tolerance<W>() * h2);
  }();

  const int L = 2 * K;  // moments h_0..h_{2K-1}
  std::vector<W> prev(static_cast<std::size_t>(L), W(0));  // sigma_{k-2,l}
  std::vector<W> cur(h.begin(), h.begin() + L);             // sigma_{k-1,l}
  out.a.clear();
  out.b_squared.clear();
  out.terminated = false;

  out.a.push_back(cur[1] / cur[0]);
  W b2_prev(0);  // b_0^2 multiplies sigma_{-1} = 0
  for (int k = 1; k < K; ++k) {
    std::vector<W> next(static_cast<std::size_t>(L), W(0));
    const W& a_prev = out.a.back();
    for (int l = k; l <= L - k - 1; ++l) {
      next[l] = cur[l + 1] - a_prev * cur[l] - b2_prev * prev[l];
    }
    W b2 = next[k] / cur[k - 1];
    if (b2 < -threshold) {
      failing_index = k;
      failing_value = b2;
      return RecursionStatus::negative;
    }
    if (b2 <= threshold) {
      out.terminated = true;
      break;
    }
    out.b_squared.push_back(b2);
    out.a.push_back(next[k + 1] / next[k] - cur[k] / cur[k - 1]);
    prev = std::move(cur);
    cur = std::move(next);
    b2_prev = b2;
  }
  return RecursionStatus::ok;
}

/// max_n |(J^n)_00 - h_n| / R^n, with R = max(1, max_k h_{2k}^{1/2k}) a
/// spectral-radius proxy so that odd moments near zero do not blow up the ratio.
template <class W>
W reconstruction_residual(std::span<const W> h, const LanczosCoefficients<W>& lc) {
  using std::pow;
  const int n_max = static_cast<int>(h.size()) - 1;
  W radius(1);
  for (int k = 1; 2 * k <= n_max; ++k) {
    const W& h2k = h[static_cast<std::size_t>(2 * k)];
    if (h2k > 0) {
      W r = pow(h2k, W(1) / W(2 * k));
      if (r > radius) radius = r;
    }
  }
  auto rec = reconstruct_moments_all(lc, n_max);
  W worst(0), scale(1);
  for (int n = 0; n <= n_max; ++n) {
    W dev = abs_value(W(rec[static_cast<std::size_t>(n)] - h[static_cast<std::size_t>(n)])) / scale;
    if (dev > worst) worst = dev;
    scale *= radius;
  }
  return worst;
}

template <class To, class From>
LanczosCoefficients<To> convert_coefficients(const LanczosCoefficients<From>& in) {
  LanczosCoefficients<To> out;
  out.terminated = in.terminated;
  out.precision_bits = in.precision_bits;
  for (const auto& x : in.a) out.a.push_back(scalar_cast<To>(x));
  for (const auto& x : in.b_squared) out.b_squared.push_back(scalar_cast<To>(x));
  return out;
}

template <unsigned Bits, class T>
LanczosCoefficients<T> lanczos_at_precision(std::span<const T> h, int K, const LanczosOptions& opt,
                                            std::optional<Rational> previous_failure) {
  using W = Float<Bits>;
  std::vector<W> hw;
  hw.reserve(h.size());
  for (const auto& x : h) hw.push_back(scalar_cast<W>(x));
  LanczosCoefficients<W> result;
  int index = 0;
  W value(0);
  auto status = chebyshev_recursion<W>(hw, K, result, index, value);
  if (status == RecursionStatus::ok) {
    // Only h_0..h_{2K-1} determine the K coefficients; extra moments are not checked.
    const W residual = reconstruction_residual<W>(std::span<const W>(hw).first(static_cast<std::size_t>(2 * K)), result);
    if (residual <= half_precision_tolerance<W>()) {
      result.precision_bits = Bits;
      return convert_coefficients<T>(result);
    }
    // Positive but inaccurate: the recursion cancelled away too many digits.
    if constexpr (Bits * 2 <= kMaxPrecisionBits) {
      if (Bits * 2 <= opt.max_precision_bits) return lanczos_at_precision<Bits * 2, T>(h, K, opt, std::nullopt);
    }
    throw PrecisionError("lanczos_from_moments: reconstructed moments deviate by " + format17(to_double(residual)) +
                         " (relative) at " + std::to_string(Bits) + " bits; increase the precision of the input moments");
  }
  // A negative b^2 that survives a precision doubling unchanged is a property of
  // the input, not round-off.
  Rational here = to_rational(value);
  if (previous_failure) {
    Rational diff = here - *previous_failure;
    if (diff < 0) diff = -diff;
    Rational scale = here < 0 ? Rational(-here) : here;
    if (diff <= scale * Rational(1, 1000000)) {
      throw DomainError("lanczos_from_moments: moment sequence violates Hankel positivity (b_" +
                        std::to_string(index) + "^2 = " + format17(to_double(value)) + ")");
    }
  }
  if constexpr (Bits * 2 <= kMaxPrecisionBits) {
    if (Bits * 2 <= opt.max_precision_bits) {
      return lanczos_at_precision<Bits * 2, T>(h, K, opt, here);
    }
  }
  throw PrecisionError("lanczos_from_moments: b_" + std::to_string(index) + "^2 = " + format17(to_double(value)) +
                       " is negative at " + std::to_string(Bits) +
                       " bits; increase the precision of the input moments");
}

}  // namespace detail

/// Tridiagonalizes moments h_0..h_{2K-1} (h_0 = 1) into K Lanczos coefficients.
///
/// Exact for rational T. For floating T the recursion starts at T's precision
/// and doubles (up to opt.max_precision_bits) whenever a b_n^2 turns negative;
/// b_n^2 below 2^{-bits/2} max(1, h_2) ends the chain with `terminated` set.
template <class T>
LanczosCoefficients<T> lanczos_from_moments(const HamiltonianMoments<T>& h, int K, LanczosOptions opt = {}) {
  if (K < 1) throw ArgumentError("lanczos_from_moments: K must be at least 1");
  if (h.size() < 2 * K) {
    throw ArgumentError("lanczos_from_moments: K=" + std::to_string(K) + " needs " + std::to_string(2 * K) +
                        " moments, got " + std::to_string(h.size()));
  }
  if (abs_value(T(h[0] - 1)) > half_precision_tolerance<T>()) {
    throw DomainError("lanczos_from_moments: h_0 must equal 1");
  }
  std::span<const T> hs(h.values);
  if constexpr (is_rational_v<T>) {
    LanczosCoefficients<T> out;
    int index = 0;
    T value(0);
    if (detail::chebyshev_recursion<T>(hs, K, out, index, value) == detail::RecursionStatus::negative) {
      throw DomainError("lanczos_from_moments: moment sequence violates Hankel positivity (b_" +
                        std::to_string(index) + "^2 = " + value.str() + ")");
    }
    out.precision_bits = 0;
    return out;
  } else if constexpr (std::is_same_v<T, double>) {
    return detail::lanczos_at_precision<128, T>(hs, K, opt, std::nullopt);
  } else {
    constexpr unsigned bits = precision_bits_v<T>;
    static_assert(bits >= 64 && bits <= kMaxPrecisionBits);
    return detail::lanczos_at_precision<bits, T>(hs, K, opt, std::nullopt);
  }
}

/// Convenience: cumulants -> moments -> h_n -> (a, b). Needs beta_1..beta_{2K-1};
/// use pad_cumulants to declare vanishing higher cumulants.
template <class T>
LanczosCoefficients<T> lanczos_from_cumulants(const CumulantSequence<Complex<T>>& beta, int K,
                                              LanczosOptions opt = {}) {
  const int needed = 2 * K - 1;
  auto moments = moments_from_cumulants(beta, needed, BellOptions{std::max(64, needed)});
  return lanczos_from_moments(hamiltonian_moments(moments), K, opt);
}

/// Closed-form values the first coefficients must take, from the raw moments.
template <class T>
struct LanczosIdentities {
  T a0;       // <W>
  T b1_sq;    // Var W
  T a1;       // (<W^3> - <W>^3)/Var W - 2<W>
};

template <class T>
LanczosIdentities<T> lanczos_identities(const HamiltonianMoments<T>& h) {
  if (h.size() < 4) throw ArgumentError("lanczos_identities: need h_0..h_3");
  const T& m1 = h[1];
  const T var = h[2] - m1 * m1;
  return {m1, var, T((h[3] - m1 * m1 * m1) / var - 2 * m1)};
}

}  // namespace qwork

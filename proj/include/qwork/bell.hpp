#pragma once

// Partial and complete Bell polynomials, and the moment <-> cumulant maps
// they induce (Faa di Bruno).
//
// Everything here is generic over a commutative ring V: exact rationals give
// exact results, multiprecision floats give results at their working
// precision. Only ring operations are used; no division by data.

#include "qwork/errors.hpp"
#include "qwork/numeric.hpp"
#include "qwork/sequences.hpp"

#include <span>
#include <vector>

namespace qwork {

struct BellOptions {
  /// Largest n accepted. Bell values overflow fixed-width floats quickly;
  /// raise it deliberately for multiprecision or exact inputs.
  int max_order = 64;
};

inline Integer binomial(int n, int k) {
  if (k < 0 || k > n) return Integer(0);
  if (k > n - k) k = n - k;
  Integer r(1);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// Table of B_{m,j}(g_1, ...) for 0 <= j <= m <= n, built with the recurrence
///   B_{m,j} = sum_{i=1}^{m-j+1} C(m-1, i-1) g_i B_{m-i, j-1},
/// B_{0,0} = 1 and B_{m,0} = 0 for m > 0.
template <class V>
class BellTable {
 public:
  /// `g[0]` holds g_1. Needs at least n entries (fewer is fine when only
  /// low j are queried; missing g_i are never read for j large enough).
  BellTable(int n, std::span<const V> g, BellOptions opt = {}) : n_(n) {
    if (n < 0) throw ArgumentError("Bell order must be non-negative");
    if (n > opt.max_order) {
      throw ArgumentError("Bell order " + std::to_string(n) + " exceeds max_order " +
                          std::to_string(opt.max_order));
    }
    const V zero = RingTraits<V>::from_integer(Integer(0));
    table_.assign(static_cast<std::size_t>((n + 1) * (n + 1)), zero);
    at(0, 0) = RingTraits<V>::from_integer(Integer(1));
    for (int m = 1; m <= n; ++m) {
      for (int j = 1; j <= m; ++j) {
        const int imax = m - j + 1;
        if (imax > static_cast<int>(g.size())) continue;  // undefined, left at zero
        V acc = zero;
        for (int i = 1; i <= imax; ++i) {
          const V& lower = at(m - i, j - 1);
          if (lower == zero) continue;
          acc += RingTraits<V>::from_integer(binomial(m - 1, i - 1)) * g[static_cast<std::size_t>(i - 1)] * lower;
        }
        at(m, j) = acc;
      }
    }
  }

  const V& operator()(int m, int j) const {
    if (m < 0 || m > n_ || j < 0 || j > m) throw ArgumentError("Bell index out of range");
    return table_[static_cast<std::size_t>(m * (n_ + 1) + j)];
  }

  int order() const { return n_; }

 private:
  V& at(int m, int j) { return table_[static_cast<std::size_t>(m * (n_ + 1) + j)]; }

  int n_;
  std::vector<V> table_;
};

/// Partial Bell polynomial B_{n,k}(g_1, ..., g_{n-k+1}); g[0] is g_1.
template <class V>
V partial_bell(int n, int k, std::span<const V> g, BellOptions opt = {}) {
  if (n < 0 || k < 0 || k > n) {
    throw ArgumentError("partial_bell: need 0 <= k <= n, got n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
  if (k == 0) return RingTraits<V>::from_integer(Integer(n == 0 ? 1 : 0));
  if (static_cast<int>(g.size()) < n - k + 1) {
    throw ArgumentError("partial_bell: B_{" + std::to_string(n) + "," + std::to_string(k) + "} needs " +
                        std::to_string(n - k + 1) + " coefficients, got " + std::to_string(g.size()));
  }
  return BellTable<V>(n, g.first(static_cast<std::size_t>(n - k + 1)), opt)(n, k);
}

/// Complete Bell polynomial Y_n = sum_{k=1}^n B_{n,k}; Y_0 = 1.
template <class V>
V complete_bell(int n, std::span<const V> g, BellOptions opt = {}) {
  if (n < 0) throw ArgumentError("complete_bell: n must be non-negative");
  if (n == 0) return RingTraits<V>::from_integer(Integer(1));
  if (static_cast<int>(g.size()) < n) {
    throw ArgumentError("complete_bell: Y_" + std::to_string(n) + " needs " + std::to_string(n) +
                        " coefficients, got " + std::to_string(g.size()));
  }
  BellTable<V> table(n, g.first(static_cast<std::size_t>(n)), opt);
  V sum = table(n, 1);
  for (int k = 2; k <= n; ++k) sum += table(n, k);
  return sum;
}

namespace detail {

template <class V>
bool is_unit(const V& v) {
  using R = typename RingTraits<V>::real_type;
  const V one = RingTraits<V>::from_integer(Integer(1));
  return RingTraits<V>::magnitude(v - one) <= half_precision_tolerance<R>();
}

}  // namespace detail

/// beta_n = sum_{k=1}^n (-1)^{k-1} (k-1)! (-i)^{-n} B_{n,k}(M_1, ..., M_{n-k+1}).
template <class V>
CumulantSequence<V> cumulants_from_moments(const MomentSequence<V>& moments, int n_max, BellOptions opt = {}) {
  if (moments.values.empty() || !detail::is_unit(moments[0])) {
    throw DomainError("cumulants_from_moments: M_0 must equal 1 (G(0) = 1)");
  }
  if (n_max < 0 || n_max > moments.order()) {
    throw ArgumentError("cumulants_from_moments: n_max " + std::to_string(n_max) + " exceeds available order " +
                        std::to_string(moments.order()));
  }
  CumulantSequence<V> out;
  out.convention = moments.convention;
  if (n_max == 0) return out;

  std::span<const V> g(moments.values.data() + 1, static_cast<std::size_t>(n_max));
  BellTable<V> table(n_max, g, opt);
  Integer factorial(1);  // (k-1)!
  for (int n = 1; n <= n_max; ++n) {
    V sum = RingTraits<V>::from_integer(Integer(0));
    factorial = 1;
    for (int k = 1; k <= n; ++k) {
      if (k > 1) factorial *= (k - 1);
      V term = RingTraits<V>::from_integer(factorial) * table(n, k);
      if (k % 2 == 0) term = -term;
      sum += term;
    }
    out.values.push_back(times_i_pow(sum, n));  // (-i)^{-n} = i^n
  }
  return out;
}

/// M_n = (-i)^n Y_n(beta_1, ..., beta_n); M_0 = 1.
template <class V>
MomentSequence<V> moments_from_cumulants(const CumulantSequence<V>& cumulants, int n_max, BellOptions opt = {}) {
  if (n_max < 0 || n_max > cumulants.order()) {
    // Missing higher cumulants are not assumed zero; the caller must say so.
    throw ArgumentError("moments_from_cumulants: n_max " + std::to_string(n_max) + " exceeds available order " +
                        std::to_string(cumulants.order()));
  }
  MomentSequence<V> out;
  out.convention = cumulants.convention;
  out.values.push_back(RingTraits<V>::from_integer(Integer(1)));
  if (n_max == 0) return out;

  std::span<const V> g(cumulants.values.data(), static_cast<std::size_t>(n_max));
  BellTable<V> table(n_max, g, opt);
  for (int n = 1; n <= n_max; ++n) {
    V y = table(n, 1);
    for (int k = 2; k <= n; ++k) y += table(n, k);
    out.values.push_back(times_i_pow(y, -n));
  }
  return out;
}

/// Pads a cumulant sequence with zeros up to order n (declares the missing
/// cumulants to vanish, e.g. for a Gaussian law).
template <class V>
CumulantSequence<V> pad_cumulants(CumulantSequence<V> c, int n) {
  while (c.order() < n) c.values.push_back(RingTraits<V>::from_integer(Integer(0)));
  return c;
}

}  // namespace qwork

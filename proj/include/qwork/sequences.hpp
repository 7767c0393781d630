#pragma once

#include "qwork/errors.hpp"
#include "qwork/numeric.hpp"

#include <complex>
#include <string>
#include <vector>

namespace qwork {

/// Which zero the work is measured from.
///
/// `hamiltonian`: energies are the post-quench eigenvalues themselves, so the
/// mean work equals <H1> (the pre-quench ground-state phase is dropped).
/// `work`: the pre-quench ground energy E0 is subtracted from every line.
enum class Convention { hamiltonian, work };

inline const char* to_string(Convention c) {
  return c == Convention::hamiltonian ? "hamiltonian" : "work";
}

inline Convention parse_convention(const std::string& s) {
  if (s == "hamiltonian") return Convention::hamiltonian;
  if (s == "work") return Convention::work;
  throw ArgumentError("unknown convention '" + s + "' (expected hamiltonian|work)");
}

/// Ring-level hooks used by the generic moment algebra.
template <class V>
struct RingTraits {
  using real_type = V;
  static V from_integer(const Integer& n) { return V(n); }
  static real_type magnitude(const V& v) { return abs_value(v); }
};

template <>
struct RingTraits<double> {
  using real_type = double;
  static double from_integer(const Integer& n) { return n.convert_to<double>(); }
  static double magnitude(double v) { return std::abs(v); }
};

template <class T>
struct RingTraits<Complex<T>> {
  using real_type = T;
  static Complex<T> from_integer(const Integer& n) { return Complex<T>(RingTraits<T>::from_integer(n)); }
  static T magnitude(const Complex<T>& v) { return abs_value(v.re) + abs_value(v.im); }
};

template <>
struct RingTraits<std::complex<double>> {
  using real_type = double;
  static std::complex<double> from_integer(const Integer& n) { return n.convert_to<double>(); }
  static double magnitude(const std::complex<double>& v) { return std::abs(v); }
};

inline std::complex<double> times_i_pow(const std::complex<double>& z, int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return -z;
    default: return {z.imag(), -z.real()};
  }
}

/// Moments M_0..M_K of the characteristic function G(t) = sum_n M_n t^n / n!,
/// so M_n = (-i)^n <W^n>.
template <class V>
struct MomentSequence {
  std::vector<V> values;
  Convention convention = Convention::hamiltonian;
  /// Optional per-order truncation error estimate (absolute, on <W^n>).
  std::vector<double> truncation_error;

  int order() const { return static_cast<int>(values.size()) - 1; }
  const V& operator[](int n) const { return values.at(static_cast<std::size_t>(n)); }
};

/// Cumulants beta_1..beta_K of the work distribution.
template <class V>
struct CumulantSequence {
  std::vector<V> values;  // values[n-1] = beta_n
  Convention convention = Convention::hamiltonian;

  int order() const { return static_cast<int>(values.size()); }
  const V& beta(int n) const {
    if (n < 1 || n > order()) throw ArgumentError("cumulant index out of range");
    return values[static_cast<std::size_t>(n - 1)];
  }
};

/// Real parts, after checking the imaginary parts vanish within `tol`
/// relative to max(1, |Re|).
template <class T>
std::vector<T> real_parts(const std::vector<Complex<T>>& zs, const T& tol, const char* what) {
  std::vector<T> out;
  out.reserve(zs.size());
  for (std::size_t n = 0; n < zs.size(); ++n) {
    T scale = abs_value(zs[n].re);
    if (scale < T(1)) scale = T(1);
    if (abs_value(zs[n].im) > tol * scale) {
      throw DomainError(std::string(what) + ": entry " + std::to_string(n) + " has imaginary part " +
                        to_string_full(zs[n].im) + " above tolerance");
    }
    out.push_back(zs[n].re);
  }
  return out;
}

}  // namespace qwork

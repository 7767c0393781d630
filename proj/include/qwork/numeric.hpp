#pragma once

// Scalar types shared by every module.
//
// Exact work uses `Rational`; high-precision floating work uses `Float<Bits>`
// with the bit count fixed at compile time so values never silently change
// precision across threads. Plain `double` is used by the time-domain code.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>

namespace qwork {

namespace bmp = boost::multiprecision;

template <unsigned Bits>
using Float = bmp::number<bmp::cpp_bin_float<Bits, bmp::digit_base_2>, bmp::et_off>;

using Rational = bmp::number<bmp::cpp_rational_backend, bmp::et_off>;
using Integer = bmp::number<bmp::cpp_int_backend<>, bmp::et_off>;

using Real128 = Float<128>;
using Real256 = Float<256>;
using Real512 = Float<512>;

inline constexpr unsigned kDefaultPrecisionBits = 256;
inline constexpr unsigned kMaxPrecisionBits = 4096;

template <class T>
struct is_rational : std::false_type {};
template <>
struct is_rational<Rational> : std::true_type {};
template <class T>
inline constexpr bool is_rational_v = is_rational<T>::value;

template <class T>
struct float_bits : std::integral_constant<unsigned, 0> {};
template <unsigned B>
struct float_bits<Float<B>> : std::integral_constant<unsigned, B> {};
template <>
struct float_bits<double> : std::integral_constant<unsigned, 53> {};

/// Working precision of T in bits; 0 means exact.
template <class T>
inline constexpr unsigned precision_bits_v = float_bits<T>::value;

/// 2^{-bits/2}: the agreement we promise for results computed at this precision.
/// Exact types get zero.
template <class T>
T half_precision_tolerance() {
  if constexpr (is_rational_v<T>) {
    return T(0);
  } else if constexpr (std::is_same_v<T, double>) {
    return 1e-8;
  } else {
    return ldexp(T(1), -static_cast<int>(precision_bits_v<T> / 2));
  }
}

template <class T>
double to_double(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) {
    return static_cast<double>(x);
  } else {
    return x.template convert_to<double>();
  }
}

template <class T>
T abs_value(const T& x) {
  if constexpr (std::is_arithmetic_v<T>) {
    return std::abs(x);
  } else {
    return x < 0 ? T(-x) : x;
  }
}

/// Parses "p/q", integers and decimal literals into an exact rational.
/// Decimal literals are read exactly ("0.1" is 1/10, not the nearest double).
Rational parse_rational(const std::string& text);

/// Lossless conversion of any supported scalar to an exact rational.
template <class T>
Rational to_rational(const T& x) {
  if constexpr (is_rational_v<T>) {
    return x;
  } else if constexpr (std::is_same_v<T, double>) {
    return Rational(Float<64>(x));
  } else {
    return Rational(x);
  }
}

/// Conversion between scalar types; rounds to the target precision.
template <class To, class From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<To, double>) {
    return to_double(x);
  } else if constexpr (is_rational_v<To>) {
    return to_rational(x);
  } else {
    return To(x);
  }
}

/// Full-precision decimal rendering ("p/q" for rationals).
template <class T>
std::string to_string_full(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  } else if constexpr (is_rational_v<T>) {
    return x.str();
  } else {
    // digits10 + 2 guarantees a round trip
    return x.str(std::numeric_limits<T>::digits10 + 2, std::ios_base::scientific);
  }
}

/// 17 significant digits: the fixed output format of every CSV/JSON writer.
std::string format17(double x);

/// Minimal complex type over an arbitrary ring.
///
/// std::complex is only specified for the built-in floating types; this
/// covers exact rationals and multiprecision floats for the moment algebra,
/// which only needs ring operations.
template <class T>
struct Complex {
  T re{0};
  T im{0};

  Complex() = default;
  Complex(T r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
  Complex(T r, T i) : re(std::move(r)), im(std::move(i)) {}
  Complex(int r) : re(r) {}  // NOLINT(google-explicit-constructor)

  friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
  friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend Complex operator*(const T& s, const Complex& a) { return {s * a.re, s * a.im}; }
  friend Complex operator*(const Complex& a, const T& s) { return {s * a.re, s * a.im}; }
  friend Complex operator/(const Complex& a, const T& s) { return {a.re / s, a.im / s}; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

  Complex& operator+=(const Complex& b) { return *this = *this + b; }
  Complex& operator-=(const Complex& b) { return *this = *this - b; }
  Complex& operator*=(const Complex& b) { return *this = *this * b; }

  Complex conj() const { return {re, -im}; }
  T norm() const { return re * re + im * im; }
};

/// z * i^p for any integer p (exact; no trigonometry).
template <class T>
Complex<T> times_i_pow(const Complex<T>& z, int p) {
  switch (((p % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.im, z.re};
    case 2: return {-z.re, -z.im};
    default: return {z.im, -z.re};
  }
}

template <class T>
std::complex<double> to_std_complex(const Complex<T>& z) {
  return {to_double(z.re), to_double(z.im)};
}

/// Runs `fn.template operator()<Float<B>>()` with B the smallest supported
/// precision >= bits. Supported: 128, 256, 512, 1024.
template <class Fn>
decltype(auto) with_precision(unsigned bits, Fn&& fn) {
  if (bits <= 128) return fn.template operator()<Float<128>>();
  if (bits <= 256) return fn.template operator()<Float<256>>();
  if (bits <= 512) return fn.template operator()<Float<512>>();
  return fn.template operator()<Float<1024>>();
}

inline unsigned rounded_precision_bits(unsigned bits) {
  if (bits <= 128) return 128;
  if (bits <= 256) return 256;
  if (bits <= 512) return 512;
  return 1024;
}

template <class T>
T pi_value() {
  if constexpr (std::is_same_v<T, double>) {
    return M_PI;
  } else {
    return boost::math::constants::pi<T>();
  }
}

}  // namespace qwork

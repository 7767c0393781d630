#pragma once

// Work statistics of a sudden quench started from the pre-quench ground state:
// discrete work spectra, the characteristic function G(t) = <exp(-iWt)>,
// its moments and cumulants, and the survival probability |G(t)|^2.

#include "qwork/bell.hpp"
#include "qwork/errors.hpp"
#include "qwork/numeric.hpp"
#include "qwork/sequences.hpp"

#include <algorithm>
#include <complex>
#include <optional>
#include <vector>

namespace qwork {

template <class T>
struct SpectralLine {
  T energy;
  T weight;
};

/// Bounds the weights beyond the last retained line: further lines sit at
/// last.energy + m * spacing with weight <= last.weight * ratio^m, m >= 1.
template <class T>
struct TailEnvelope {
  T spacing;
  T ratio;
};

/// Ground-state work distribution P(W) = sum_j p_j delta(W - W_j), possibly
/// truncated. `tail_bound` bounds the discarded probability.
template <class T>
class WorkSpectrum {
 public:
  WorkSpectrum(std::vector<SpectralLine<T>> lines, Convention convention, T tail_bound = T(0),
               std::optional<TailEnvelope<T>> envelope = std::nullopt)
      : lines_(std::move(lines)), convention_(convention), tail_bound_(std::move(tail_bound)),
        envelope_(std::move(envelope)) {
    if (lines_.empty()) throw ArgumentError("work spectrum needs at least one line");
    if (tail_bound_ < 0) throw ArgumentError("tail bound must be non-negative");
    T total(0);
    for (const auto& l : lines_) {
      if (l.weight < 0) throw DomainError("negative spectral weight");
      total += l.weight;
    }
    T slack = half_precision_tolerance<T>();
    if (total > T(1) + slack) throw DomainError("spectral weights sum to more than one");
    std::stable_sort(lines_.begin(), lines_.end(),
                     [](const SpectralLine<T>& a, const SpectralLine<T>& b) { return a.energy < b.energy; });
  }

  const std::vector<SpectralLine<T>>& lines() const { return lines_; }
  Convention convention() const { return convention_; }
  const T& tail_bound() const { return tail_bound_; }
  const std::optional<TailEnvelope<T>>& envelope() const { return envelope_; }

  T total_weight() const {
    T total(0);
    for (const auto& l : lines_) total += l.weight;
    return total;
  }

  /// Same weights, every energy moved by `delta`.
  WorkSpectrum shifted(const T& delta, Convention convention) const {
    auto lines = lines_;
    for (auto& l : lines) l.energy += delta;
    return WorkSpectrum(std::move(lines), convention, tail_bound_, envelope_);
  }

 private:
  std::vector<SpectralLine<T>> lines_;
  Convention convention_;
  T tail_bound_;
  std::optional<TailEnvelope<T>> envelope_;
};

/// Spectrum of a single oscillator quenched from frequency omega0 to omega1.
///
/// Only even levels are populated:
///   p_j = (|eta|^j / U) (j-1)!! / j!!,  eta = (w0-w1)/(w0+w1),  U = (w0+w1)/(2 sqrt(w0 w1)),
/// generated with p_{j+2} = p_j eta^2 (j+1)/(j+2). Since the ratio stays below
/// eta^2 the discarded weight after level J is at most p_J eta^2/(1-eta^2);
/// levels are added until that bound drops below `tail_tol`.
template <class T>
WorkSpectrum<T> oscillator_overlaps(const T& omega0, const T& omega1, const T& tail_tol,
                                    Convention convention = Convention::hamiltonian) {
  if (!(omega0 > 0) || !(omega1 > 0)) {
    throw DomainError("oscillator_overlaps: frequencies must be positive (zero modes are handled by the chain module)");
  }
  if (!(tail_tol > 0) || !(tail_tol < 1)) throw ArgumentError("oscillator_overlaps: tail_tol must lie in (0,1)");

  const T eta = (omega0 - omega1) / (omega0 + omega1);
  const T eta2 = eta * eta;
  const T u = (omega0 + omega1) / (2 * sqrt(omega0 * omega1));
  const T offset = convention == Convention::work ? T(omega0 / 2) : T(0);

  std::vector<SpectralLine<T>> lines;
  T p = 1 / u;
  T tail(0);
  for (long j = 0;; j += 2) {
    lines.push_back({(T(j) + T(0.5)) * omega1 - offset, p});
    if (eta2 == 0) break;
    tail = p * eta2 / (1 - eta2);
    if (tail < tail_tol) break;
    p = p * eta2 * T(j + 1) / T(j + 2);
  }
  return WorkSpectrum<T>(std::move(lines), convention, tail, TailEnvelope<T>{2 * omega1, eta2});
}

namespace detail {

/// Upper bound on sum over discarded lines of p |W|^n, in double.
template <class T>
double moment_tail_bound(const WorkSpectrum<T>& spec, int n) {
  const double tail = to_double(spec.tail_bound());
  if (tail == 0.0) return 0.0;
  const auto& last = spec.lines().back();
  if (!spec.envelope()) {
    double wmax = 0.0;
    for (const auto& l : spec.lines()) wmax = std::max(wmax, std::abs(to_double(l.energy)));
    return tail * std::pow(wmax, n);
  }
  const double p = to_double(last.weight);
  const double w = to_double(last.energy);
  const double s = to_double(spec.envelope()->spacing);
  const double r = to_double(spec.envelope()->ratio);
  double sum = 0.0;
  double weight = p;
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 1; m < 1'000'000; ++m) {
    weight *= r;
    double term = weight * std::pow(std::abs(w + m * s), n);
    sum += term;
    if (term < prev && term <= 1e-17 * sum) break;
    prev = term;
  }
  return sum;
}

}  // namespace detail

/// M_n = (-i)^n sum_j p_j W_j^n for n = 0..n_max.
///
/// `rel_tol` is the largest accepted truncation error relative to
/// max(1, |<W^n>|); a larger error raises PrecisionError naming n.
template <class T>
MomentSequence<Complex<T>> work_moments(const WorkSpectrum<T>& spec, int n_max, double rel_tol = 1e-10) {
  if (n_max < 0) throw ArgumentError("work_moments: n_max must be non-negative");
  MomentSequence<Complex<T>> out;
  out.convention = spec.convention();
  std::vector<T> powers;
  powers.reserve(spec.lines().size());
  for (const auto& l : spec.lines()) powers.push_back(l.weight);
  for (int n = 0; n <= n_max; ++n) {
    T raw(0);
    for (std::size_t j = 0; j < powers.size(); ++j) {
      raw += powers[j];
      powers[j] *= spec.lines()[j].energy;
    }
    double err = detail::moment_tail_bound(spec, n);
    if (err > rel_tol * std::max(1.0, std::abs(to_double(raw)))) {
      throw PrecisionError("work_moments: truncation error " + format17(err) + " of moment n=" + std::to_string(n) +
                           " exceeds tolerance; tighten the spectrum tail");
    }
    out.truncation_error.push_back(err);
    out.values.push_back(times_i_pow(Complex<T>(raw), -n));
  }
  return out;
}

/// G(t) = sum_j p_j exp(-i W_j t), evaluated in double precision.
template <class T>
std::complex<double> characteristic_function(const WorkSpectrum<T>& spec, double t) {
  std::complex<double> g = 0.0;
  for (const auto& l : spec.lines()) {
    g += to_double(l.weight) * std::exp(std::complex<double>(0.0, -to_double(l.energy) * t));
  }
  return g;
}

/// Survival probability |G(t)|^2.
template <class T>
double survival_probability(const WorkSpectrum<T>& spec, double t) {
  return std::norm(characteristic_function(spec, t));
}

template <class V>
CumulantSequence<V> cumulants(const MomentSequence<V>& moments, int n_max) {
  return cumulants_from_moments(moments, n_max);
}

template <class T>
CumulantSequence<Complex<T>> cumulants(const WorkSpectrum<T>& spec, int n_max, double rel_tol = 1e-10) {
  return cumulants_from_moments(work_moments(spec, n_max, rel_tol), n_max);
}

/// Mean <W> and variance of a spectrum, directly from the weights.
template <class T>
std::pair<T, T> mean_and_variance(const WorkSpectrum<T>& spec) {
  T total(0), m1(0), m2(0);
  for (const auto& l : spec.lines()) {
    total += l.weight;
    m1 += l.weight * l.energy;
    m2 += l.weight * l.energy * l.energy;
  }
  m1 /= total;
  m2 /= total;
  return {m1, m2 - m1 * m1};
}

}  // namespace qwork

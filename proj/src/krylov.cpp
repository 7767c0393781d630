#include "qwork/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace qwork {

KrylovChain::KrylovChain(std::vector<double> a, std::vector<double> b, bool closed)
    : length_(static_cast<int>(a.size())), closed_(closed) {
  if (a.empty()) throw ArgumentError("KrylovChain: empty coefficient set");
  auto av = std::make_shared<std::vector<double>>(std::move(a));
  auto bv = std::make_shared<std::vector<double>>(std::move(b));
  a_gen_ = [av](int n) { return (*av)[static_cast<std::size_t>(n)]; };
  b_gen_ = [bv](int n) { return (*bv)[static_cast<std::size_t>(n - 1)]; };
}

KrylovChain KrylovChain::from_generators(Generator a, Generator b) {
  if (!a || !b) throw ArgumentError("KrylovChain: missing generator");
  KrylovChain c;
  c.a_gen_ = std::move(a);
  c.b_gen_ = std::move(b);
  return c;
}

double KrylovChain::a(int n) const {
  if (n < 0 || (length_ && n >= *length_)) throw ArgumentError("KrylovChain: a index out of range");
  return sign_ * a_gen_(n);
}

double KrylovChain::b(int n) const {
  if (n < 1 || (length_ && n >= *length_)) throw ArgumentError("KrylovChain: b index out of range");
  return sign_ * b_gen_(n);
}

KrylovChain KrylovChain::negated() const {
  KrylovChain c = *this;
  c.sign_ = -sign_;
  return c;
}

namespace {

using Vec = Eigen::VectorXcd;

struct Tridiagonal {
  Eigen::VectorXd a, b;  // b(i) couples sites i and i+1

  // out = -i J y
  void rhs(const Vec& y, Vec& out) const {
    const Eigen::Index n = a.size();
    const std::complex<double>* yp = y.data();
    std::complex<double>* op = out.data();
    const double* ap = a.data();
    const double* bp = b.data();
    auto minus_i = [](std::complex<double> z) { return std::complex<double>(z.imag(), -z.real()); };
    if (n == 1) {
      op[0] = minus_i(ap[0] * yp[0]);
      return;
    }
    op[0] = minus_i(ap[0] * yp[0] + bp[0] * yp[1]);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
      op[i] = minus_i(bp[i - 1] * yp[i - 1] + ap[i] * yp[i] + bp[i] * yp[i + 1]);
    }
    op[n - 1] = minus_i(bp[n - 2] * yp[n - 2] + ap[n - 1] * yp[n - 1]);
  }
};

Tridiagonal truncated(const KrylovChain& chain, int n) {
  Tridiagonal j{Eigen::VectorXd(n), Eigen::VectorXd(std::max(n - 1, 0))};
  for (int i = 0; i < n; ++i) {
    j.a(i) = chain.a(i);
    if (i > 0) j.b(i - 1) = chain.b(i);
  }
  if (!j.a.allFinite() || !j.b.allFinite()) {
    throw DomainError("krylov: Lanczos coefficients are not finite (divergent chain)");
  }
  return j;
}

double norm_defect(const Vec& y) { return std::abs(1.0 - y.squaredNorm()); }

}  // namespace

namespace {

// One RK4 pass at fixed truncation n. Returns nullopt as soon as the tail
// weight reaches tol (unless the chain genuinely ends at n).
std::optional<KrylovRun> integrate(const KrylovChain& chain, const std::vector<double>& t_grid, const KrylovOptions& opt,
                                   const std::vector<std::complex<double>>& initial, int n) {
  const Tridiagonal j = truncated(chain, n);
  // Gershgorin bound on the spectral radius of the truncated chain; it is at
  // least max(|a|, |b|), so h * radius <= 0.01 also meets that bound.
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = std::abs(j.a(i));
    if (i > 0) r += std::abs(j.b(i - 1));
    if (i + 1 < n) r += std::abs(j.b(i));
    radius = std::max(radius, r);
  }
  double h_cap = radius > 0 ? 0.01 / radius : std::numeric_limits<double>::infinity();
  if (opt.max_step > 0) h_cap = std::min(h_cap, opt.max_step);
  const auto length = chain.length();
  const bool chain_ends_here = length && n == *length && chain.closed();

  Vec y = Vec::Zero(n);
  if (initial.empty()) {
    y(0) = 1.0;
  } else {
    for (std::size_t i = 0; i < initial.size(); ++i) y(static_cast<Eigen::Index>(i)) = initial[i];
  }
  Vec k1(n), k2(n), k3(n), k4(n), tmp(n);

  KrylovRun run;
  run.truncation = n;
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0) {
      const auto steps = static_cast<long>(std::ceil(span / h_cap));
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        j.rhs(y, k1);
        tmp = y + (h / 2) * k1;
        j.rhs(tmp, k2);
        tmp = y + (h / 2) * k2;
        j.rhs(tmp, k3);
        tmp = y + h * k3;
        j.rhs(tmp, k4);
        y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      run.rk4_steps += steps;
    }
    t = target;
    KrylovState st;
    st.t = target;
    st.phi.assign(y.data(), y.data() + n);
    st.norm_defect = norm_defect(y);
    run.max_norm_defect = std::max(run.max_norm_defect, st.norm_defect);
    if (!chain_ends_here && st.tail_weight() >= opt.tol) return std::nullopt;
    run.states.push_back(std::move(st));
  }
  return run;
}

double max_complexity_change(const KrylovRun& a, const KrylovRun& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    worst = std::max(worst, std::abs(spread_complexity(a.states[i]) - spread_complexity(b.states[i])));
  }
  return worst;
}

}  // namespace

KrylovRun evolve(const KrylovChain& chain, const std::vector<double>& t_grid, const KrylovOptions& opt,
                 const std::vector<std::complex<double>>& initial) {
  if (t_grid.empty()) throw ArgumentError("krylov: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0) || !std::isfinite(t_grid[i]) || (i > 0 && t_grid[i] < t_grid[i - 1])) {
      throw ArgumentError("krylov: time grid must be finite, non-negative and sorted");
    }
  }
  if (!(opt.tol > 0)) throw ArgumentError("krylov: tol must be positive");
  if (opt.initial_truncation < 1 || opt.max_truncation < opt.initial_truncation) {
    throw ArgumentError("krylov: invalid truncation limits");
  }
  const auto length = chain.length();
  const int start_size = initial.empty() ? 1 : static_cast<int>(initial.size());
  if (length && start_size > *length) throw ArgumentError("krylov: initial state longer than the chain");

  auto clamp = [&](int n) { return length ? std::min(n, *length) : n; };
  auto grow = [&](int n) {
    if (length && n == *length) {
      throw TruncationError("krylov: the wavefunction reaches the end of the known coefficients (K=" +
                            std::to_string(n) + "); supply more coefficients or a generator");
    }
    if (2 * n > opt.max_truncation) {
      throw TruncationError("krylov: tail weight above tol at truncation cap " + std::to_string(opt.max_truncation));
    }
    return clamp(2 * n);
  };

  int n = clamp(std::max(opt.initial_truncation, start_size));
  std::optional<KrylovRun> run;
  while (!(run = integrate(chain, t_grid, opt, initial, n))) n = grow(n);

  // A small last-site weight still lets reflections from the cut reach the
  // low sites. Confirm by doubling until the complexity stops moving.
  while (!(length && n == *length) && 2 * n <= opt.max_truncation) {
    const int wider = clamp(2 * n);
    auto next = integrate(chain, t_grid, opt, initial, wider);
    if (!next) {
      n = wider;
      continue;
    }
    const double change = max_complexity_change(*run, *next);
    next->truncation_change = change;
    run = std::move(next);
    n = wider;
    if (change < opt.tol) break;
  }
  if (run->truncation_change >= opt.tol && !(length && n == *length)) {
    throw TruncationError("krylov: complexity still changes by " + format17(run->truncation_change) +
                          " at truncation cap " + std::to_string(opt.max_truncation));
  }
  if (run->max_norm_defect >= 10 * opt.tol) {
    throw PrecisionError("krylov: norm defect " + format17(run->max_norm_defect) + " exceeds 10*tol");
  }
  return std::move(*run);
}

double spread_complexity(const KrylovState& s) {
  double c = 0.0;
  for (std::size_t n = 1; n < s.phi.size(); ++n) c += static_cast<double>(n) * std::norm(s.phi[n]);
  return c;
}

double survival_from_phi(const KrylovState& s) { return s.phi.empty() ? 0.0 : std::norm(s.phi[0]); }

double complexity_error_bar(const KrylovState& s) {
  return static_cast<double>(s.phi.size()) * (s.tail_weight() + s.norm_defect);
}

TimeSeries to_timeseries(const KrylovRun& run) {
  std::vector<double> t, c, p, d;
  for (const auto& s : run.states) {
    t.push_back(s.t);
    c.push_back(spread_complexity(s));
    p.push_back(survival_from_phi(s));
    d.push_back(s.norm_defect);
  }
  TimeSeries ts(std::move(t));
  ts.add_channel("complexity", std::move(c));
  ts.add_channel("survival", std::move(p));
  ts.add_channel("norm_defect", std::move(d));
  return ts;
}

}  // namespace qwork

#include "cli.hpp"

#include "qwork/bell.hpp"
#include "qwork/chain.hpp"
#include "qwork/fieldtheory.hpp"
#include "qwork/io.hpp"
#include "qwork/krylov.hpp"
#include "qwork/lanczos.hpp"
#include "qwork/workstats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace qwork::cli {

namespace {

namespace fs = std::filesystem;

class CrossCheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string out = ".";
  unsigned precision_bits = kDefaultPrecisionBits;
  double tol = 1e-10;
  std::string convention = "hamiltonian";
  std::uint64_t seed = 0;
  std::string config;
  std::string emit_precision = "17";
  bool emit_lanczos = false;

  Convention conv() const { return parse_convention(convention); }
  EmitPrecision emit() const { return parse_emit_precision(emit_precision); }
  fs::path dir() const { return fs::path(out); }
};

Json optional_number(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

/// The identity-check block carried by every summary.json: the first
/// Lanczos coefficients against <W>, Var W and the third-moment formula for
/// a_1. Entries are null where the identity is undefined (zero variance, or
/// too few moments).
struct IdentityCheck {
  std::optional<double> a0_minus_mean;
  std::optional<double> b1sq_minus_var;
  std::optional<double> a1_check;

  void merge(const IdentityCheck& o) {
    auto worst = [](std::optional<double>& x, const std::optional<double>& y) {
      if (y && (!x || std::abs(*y) > std::abs(*x))) x = y;
    };
    worst(a0_minus_mean, o.a0_minus_mean);
    worst(b1sq_minus_var, o.b1sq_minus_var);
    worst(a1_check, o.a1_check);
  }

  Json json() const {
    return Json{{"a0_minus_meanW", optional_number(a0_minus_mean)},
                {"b1sq_minus_varW", optional_number(b1sq_minus_var)},
                {"a1_check", optional_number(a1_check)}};
  }

  void require_below(double tol) const {
    for (const auto& x : {a0_minus_mean, b1sq_minus_var, a1_check}) {
      if (x && !(std::abs(*x) <= tol)) {
        throw CrossCheckFailure("identity check failed: " + json().dump() + " exceeds tol " + format17(tol));
      }
    }
  }
};

/// Compares coefficients against the identities evaluated on h_0..h_3.
template <class T>
IdentityCheck identity_check(const HamiltonianMoments<T>& h, const LanczosCoefficients<T>& lc) {
  IdentityCheck c;
  if (h.size() < 2 || lc.a.empty()) return c;
  c.a0_minus_mean = to_double(T(lc.a[0] - h[1]));
  if (h.size() < 3) return c;
  const T var = h[2] - h[1] * h[1];
  const T b1sq = lc.b_squared.empty() ? T(0) : lc.b_squared[0];
  c.b1sq_minus_var = to_double(T(b1sq - var));
  if (h.size() < 4 || !(var > half_precision_tolerance<T>()) || lc.a.size() < 2) return c;
  const auto id = lanczos_identities(h);
  c.a1_check = to_double(T(lc.a[1] - id.a1));
  return c;
}

template <class T>
HamiltonianMoments<T> spectrum_moments(const WorkSpectrum<T>& spec, int n_max) {
  HamiltonianMoments<T> h;
  const T total = spec.total_weight();
  for (int n = 0; n <= n_max; ++n) {
    T s(0);
    for (const auto& l : spec.lines()) {
      T p = l.weight;
      for (int k = 0; k < n; ++k) p *= l.energy;
      s += p;
    }
    h.values.push_back(T(s / total));
  }
  return h;
}

std::vector<double> make_grid(double tmax, double dt) {
  if (!(tmax >= 0) || !(dt > 0) || !std::isfinite(tmax) || !std::isfinite(dt)) {
    throw ArgumentError("time grid: need tmax >= 0 and dt > 0");
  }
  return uniform_grid(tmax, dt);
}

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

// ---------------------------------------------------------------- chain

struct ChainArgs {
  int n = 1;
  double lambda0 = 1.0, lambda1 = 1.0, coupling = 0.0;
  double tmax = 6.0, dt = 0.01;
  int kmax = 8;
};

int cmd_chain(const Common& c, const ChainArgs& a, std::ostream& out) {
  ChainQuench q{a.n, a.lambda0, a.lambda1, a.coupling};
  q.validate();
  if (a.kmax < 2) throw ArgumentError("chain: --kmax must be at least 2");
  const auto conv = c.conv();
  const auto ep = c.emit();
  prepare_output_dir(c.dir());

  IdentityCheck worst;
  Json modes = Json::array();
  Json lanczos_modes = Json::array();
  with_precision(c.precision_bits, [&]<class T>() {
    const auto ms = normal_modes<T>(q);
    int k = 0;
    for (const auto& m : ms) {
      ++k;
      m.require_finite();
      // <W>, Var W and a_1 from the Taylor moments, against the closed-form chain.
      const auto h = hamiltonian_moments(mode_moments(m, 3, conv));
      const auto closed = mode_lanczos(m, std::max(a.kmax, 2), conv);
      worst.merge(identity_check(h, closed));
      modes.push_back(Json{{"k", k},
                           {"omega0", to_double(m.omega0)},
                           {"omega1", to_double(m.omega1)},
                           {"mean_w", to_double(h[1])},
                           {"var_w", to_double(T(h[2] - h[1] * h[1]))}});
      if (c.emit_lanczos) {
        Json entry{{"k", k}, {"omega0", to_double(m.omega0)}, {"omega1", to_double(m.omega1)}};
        entry["lanczos"] = to_json(closed, ep);
        lanczos_modes.push_back(entry);
      }
    }
  });

  const auto grid = make_grid(a.tmax, a.dt);
  write_csv_file(c.dir() / "complexity.csv", total_spread_complexity(q, grid));
  if (c.emit_lanczos) {
    write_json_file(c.dir() / "lanczos.json", Json{{"convention", to_string(conv)}, {"modes", lanczos_modes}});
  }

  Json summary;
  summary["command"] = "chain";
  summary["parameters"] = Json{{"n", a.n},           {"lambda0", a.lambda0}, {"lambda1", a.lambda1},
                               {"coupling", a.coupling}, {"tmax", a.tmax},     {"dt", a.dt},
                               {"convention", to_string(conv)}, {"precision_bits", rounded_precision_bits(c.precision_bits)}};
  summary["zero_mode_coefficient"] = zero_mode_coefficient(q);
  summary["rest_complexity_bound"] = rest_complexity_bound(q);
  summary["zero_mode_dominance_time"] = number_or_null(zero_mode_dominance_time(q));
  summary["identity_check"] = worst.json();
  summary["modes"] = modes;
  write_json_file(c.dir() / "summary.json", summary);
  worst.require_below(c.tol);
  out << "chain: " << a.n << " modes, " << grid.size() << " time points -> " << c.out << "\n";
  return kSuccess;
}

// ----------------------------------------------------------- oscillator

struct OscillatorArgs {
  double omega0 = 2.0, omega1 = 1.0;
  int kmax = 8;
  double tmax = 10.0, dt = 0.05;
};

int cmd_oscillator(const Common& c, const OscillatorArgs& a, std::ostream& out) {
  if (a.kmax < 1) throw ArgumentError("oscillator: --kmax must be at least 1");
  const auto conv = c.conv();
  const auto ep = c.emit();
  prepare_output_dir(c.dir());

  Json summary;
  summary["command"] = "oscillator";
  summary["parameters"] = Json{{"omega0", a.omega0}, {"omega1", a.omega1}, {"kmax", a.kmax},
                               {"convention", to_string(conv)}, {"precision_bits", rounded_precision_bits(c.precision_bits)}};
  IdentityCheck ids;
  double route_deviation = 0.0;
  std::optional<WorkSpectrum<double>> spectrum_d;

  with_precision(c.precision_bits, [&]<class T>() {
    const ModePair<T> m{T(a.omega0), T(a.omega1)};
    m.require_finite();
    const int n_mom = 2 * a.kmax - 1;
    const auto moments = mode_moments(m, n_mom, conv);
    const auto h = hamiltonian_moments(moments);
    const auto closed = mode_lanczos(m, a.kmax, conv);
    const auto recursion = lanczos_from_moments(h, a.kmax);

    // Routes must agree entry by entry, relative to max(1, |value|).
    if (closed.a.size() != recursion.a.size() || closed.terminated != recursion.terminated) {
      route_deviation = std::numeric_limits<double>::infinity();
    } else {
      auto rel = [](const T& x, const T& y) {
        T scale = abs_value(x);
        if (scale < T(1)) scale = T(1);
        return to_double(T(abs_value(T(x - y)) / scale));
      };
      for (std::size_t i = 0; i < closed.a.size(); ++i) route_deviation = std::max(route_deviation, rel(closed.a[i], recursion.a[i]));
      for (std::size_t i = 0; i < closed.b_squared.size(); ++i) {
        route_deviation = std::max(route_deviation, rel(closed.b_squared[i], recursion.b_squared[i]));
      }
    }
    write_json_file(c.dir() / "lanczos.json",
                    Json{{"closed_form", to_json(closed, ep)}, {"recursion", to_json(recursion, ep)},
                         {"max_relative_deviation", number_or_null(route_deviation)}});

    const auto beta = cumulants_from_moments(moments, n_mom);
    Json mj = Json::array(), bj = Json::array();
    for (int n = 0; n <= n_mom; ++n) mj.push_back(to_double(h[n]));
    for (int n = 1; n <= n_mom; ++n) bj.push_back(to_double(beta.beta(n).re));
    Json moments_json{{"convention", to_string(conv)}, {"moments", mj}, {"cumulants", bj}};

    if (m.zero_mode()) {
      ids = identity_check(h, closed);
    } else {
      // Independent route: the exact overlaps, truncated well below tol.
      const T tail_tol = T(std::min(c.tol, 1e-3)) * T(1e-12);
      const auto spec = oscillator_overlaps(m.omega0, m.omega1, tail_tol, conv);
      const auto hs = spectrum_moments(spec, 3);
      ids = identity_check(hs, closed);
      Json sm = Json::array();
      for (int n = 0; n <= 3; ++n) sm.push_back(to_double(hs[n]));
      moments_json["spectrum_moments"] = sm;
      write_json_file(c.dir() / "spectrum.json", to_json(spec));
      summary["spectrum"] = Json{{"lines", spec.lines().size()},
                                 {"total_weight", to_double(spec.total_weight())},
                                 {"tail_bound", to_double(spec.tail_bound())}};
      std::vector<SpectralLine<double>> lines;
      for (const auto& l : spec.lines()) lines.push_back({to_double(l.energy), to_double(l.weight)});
      spectrum_d.emplace(std::move(lines), conv, to_double(spec.tail_bound()));
    }
    summary["mean_w"] = to_double(h[1]);
    summary["var_w"] = to_double(T(h[2] - h[1] * h[1]));
    write_json_file(c.dir() / "moments.json", moments_json);
  });

  const auto grid = make_grid(a.tmax, a.dt);
  const ModePair<double> md{a.omega0, a.omega1};
  std::vector<double> surv, surv_spec, cplx;
  for (double t : grid) {
    surv.push_back(std::norm(mode_autocorrelation(md, t)));
    cplx.push_back(mode_spread_complexity(md, t));
    if (spectrum_d) surv_spec.push_back(survival_probability(*spectrum_d, t));
  }
  TimeSeries ts(grid);
  ts.add_channel("survival", std::move(surv));
  if (spectrum_d) ts.add_channel("survival_spectrum", std::move(surv_spec));
  ts.add_channel("complexity", std::move(cplx));
  write_csv_file(c.dir() / "survival.csv", ts);

  summary["route_max_relative_deviation"] = number_or_null(route_deviation);
  summary["identity_check"] = ids.json();
  write_json_file(c.dir() / "summary.json", summary);
  if (!(route_deviation <= c.tol)) {
    throw CrossCheckFailure("closed-form and recursion Lanczos coefficients differ by " + format17(route_deviation));
  }
  ids.require_below(c.tol);
  out << "oscillator: routes agree to " << format17(route_deviation) << " -> " << c.out << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------- field

struct FieldArgs {
  int dim = 1;
  double m0 = 1.0, m1 = 2.0, cutoff = 50.0, volume = 100.0;
  int nmax = 4, kmax = 8;
  double tmax = 20.0, dt = 0.1;
  double uv_tol = 1e-3, quad_tol = 1e-8;
};

int cmd_field(const Common& c, const FieldArgs& a, std::ostream& out, std::ostream& err) {
  FieldQuench q{a.dim, a.m0, a.m1, a.cutoff, a.volume, a.quad_tol};
  q.validate();
  if (a.nmax < 2) throw ArgumentError("field: --nmax must be at least 2");
  if (a.kmax < 1) throw ArgumentError("field: --kmax must be at least 1");
  const auto ep = c.emit();
  prepare_output_dir(c.dir());

  Json dens = Json::array(), sens = Json::array(), flags = Json::array();
  std::ostringstream csv;
  csv << "n,density,uv_sensitivity,divergent\n";
  for (int n = 1; n <= a.nmax; ++n) {
    const auto cd = cumulant_density(q, n, a.uv_tol);
    dens.push_back(cd.value);
    sens.push_back(cd.uv_sensitivity);
    flags.push_back(cd.divergent);
    csv << n << "," << format17(cd.value) << "," << format17(cd.uv_sensitivity) << "," << (cd.divergent ? 1 : 0) << "\n";
    if (cd.divergent) {
      err << "warning: beta_" << n << " density is UV divergent in d=" << a.dim << " (d beta/d ln cutoff = "
          << format17(cd.uv_sensitivity) << ")\n";
    }
  }
  write_text_file(c.dir() / "cumulants.csv", csv.str());

  const auto g = gaussian_limit(q, a.uv_tol);
  const auto lc = gaussian_lanczos(g, a.kmax);
  write_json_file(c.dir() / "lanczos.json", to_json(lc, ep));
  const auto grid = make_grid(a.tmax, a.dt);
  write_csv_file(c.dir() / "complexity.csv", gaussian_complexity_series(g, grid));

  IdentityCheck ids;
  with_precision(c.precision_bits, [&]<class T>() {
    const auto h = hamiltonian_moments(gaussian_moments<T>(T(g.gamma1), T(g.variance()), 3));
    LanczosCoefficients<T> lt;
    for (const auto& x : lc.a) lt.a.push_back(T(x));
    for (const auto& x : lc.b_squared) lt.b_squared.push_back(T(x));
    ids = identity_check(h, lt);
  });

  Json field{{"d", a.dim},
             {"m0", a.m0},
             {"m1", a.m1},
             {"cutoff", a.cutoff},
             {"volume", a.volume},
             {"cumulant_densities", dens},
             {"uv_sensitivity", sens},
             {"uv_divergent", flags},
             {"gaussian", Json{{"gamma1", g.gamma1},
                               {"gamma2", g.gamma2},
                               {"volume", g.volume},
                               {"complexity_coefficient", g.variance()},
                               {"divergent", g.divergent}}}};
  write_json_file(c.dir() / "field.json", field);

  Json summary{{"command", "field"}, {"parameters", Json{{"d", a.dim}, {"m0", a.m0}, {"m1", a.m1}, {"cutoff", a.cutoff},
                                                          {"volume", a.volume}, {"uv_tol", a.uv_tol}, {"quad_tol", a.quad_tol}}}};
  summary["gamma1"] = g.gamma1;
  summary["gamma2"] = g.gamma2;
  summary["complexity_coefficient"] = g.variance();
  summary["identity_check"] = ids.json();
  write_json_file(c.dir() / "summary.json", summary);
  ids.require_below(c.tol);
  out << "field: gamma1=" << format17(g.gamma1) << " gamma2=" << format17(g.gamma2) << " -> " << c.out << "\n";
  return kSuccess;
}

// -------------------------------------------------------------- lanczos

struct LanczosArgs {
  std::string input;
  int kmax = 0;
};

// <W^n>, n = 0..N, from {"h": [...]}, {"moments": [...]}, {"cumulants": [...]}
// or {"lines": [[W, p], ...]} (weights are normalized).
std::vector<Rational> read_raw_moments(const Json& j) {
  if (!j.is_object()) throw ArgumentError("lanczos input: expected a JSON object");
  if (j.contains("h") || j.contains("moments")) {
    auto h = json_rational_array(j.contains("h") ? j.at("h") : j.at("moments"), "moments");
    if (h.empty() || h[0] != 1) throw DomainError("lanczos input: the zeroth moment must equal 1");
    return h;
  }
  if (j.contains("cumulants")) {
    CumulantSequence<Complex<Rational>> c;
    for (const auto& b : json_rational_array(j.at("cumulants"), "cumulants")) c.values.emplace_back(b);
    const auto m = moments_from_cumulants(c, c.order(), BellOptions{std::max(64, c.order())});
    std::vector<Rational> h;
    for (int n = 0; n <= m.order(); ++n) h.push_back(times_i_pow(m[n], n).re);
    return h;
  }
  if (j.contains("lines")) {
    const int n_max = j.value("n_max", 16);
    std::vector<std::pair<Rational, Rational>> lines;
    Rational total(0);
    for (const auto& l : j.at("lines")) {
      if (!l.is_array() || l.size() != 2) throw ArgumentError("lanczos input: lines are [W, p] pairs");
      lines.emplace_back(json_rational(l[0], "W"), json_rational(l[1], "p"));
      if (lines.back().second < 0) throw DomainError("lanczos input: negative weight");
      total += lines.back().second;
    }
    if (total <= 0) throw DomainError("lanczos input: weights sum to zero");
    std::vector<Rational> h;
    for (int n = 0; n <= n_max; ++n) {
      Rational s(0);
      for (const auto& [w, p] : lines) {
        Rational x = p / total;
        for (int k = 0; k < n; ++k) x *= w;
        s += x;
      }
      h.push_back(s);
    }
    return h;
  }
  throw ArgumentError("lanczos input: need one of \"h\", \"moments\", \"cumulants\", \"lines\"");
}

int cmd_lanczos(const Common& c, const LanczosArgs& a, std::ostream& out) {
  const auto raw = read_raw_moments(read_json_file(a.input));
  const int available = static_cast<int>(raw.size()) / 2;
  const int K = a.kmax > 0 ? a.kmax : available;
  if (K < 1 || K > available) {
    throw ArgumentError("lanczos: K=" + std::to_string(K) + " needs " + std::to_string(2 * K) + " moments, got " +
                        std::to_string(raw.size()));
  }
  const auto ep = c.emit();
  prepare_output_dir(c.dir());

  Json coeffs;
  IdentityCheck ids;
  std::ostringstream csv;
  csv << "n,h,reconstructed,residual\n";
  Json residuals = Json::array();
  auto run = [&]<class T>() {
    HamiltonianMoments<T> h;
    for (const auto& x : raw) h.values.push_back(scalar_cast<T>(x));
    const auto lc = lanczos_from_moments(h, K);
    const auto rec = reconstruct_moments_all(lc, 2 * K - 1);
    for (int n = 0; n < 2 * K; ++n) {
      T scale = abs_value(h[n]);
      if (scale < T(1)) scale = T(1);
      const T r = abs_value(T(rec[static_cast<std::size_t>(n)] - h[n])) / scale;
      residuals.push_back(to_double(r));
      csv << n << "," << format17(to_double(h[n])) << "," << format17(to_double(rec[static_cast<std::size_t>(n)])) << ","
          << format17(to_double(r)) << "\n";
    }
    coeffs = to_json(lc, ep);
    ids = identity_check(h, lc);
  };
  if (c.precision_bits == 0) {
    run.template operator()<Rational>();
  } else {
    with_precision(c.precision_bits, run);
  }
  coeffs["residuals"] = residuals;
  double max_residual = 0.0;
  for (const auto& r : residuals) max_residual = std::max(max_residual, r.get<double>());
  write_json_file(c.dir() / "lanczos.json", coeffs);
  write_text_file(c.dir() / "residuals.csv", csv.str());
  write_json_file(c.dir() / "summary.json",
                  Json{{"command", "lanczos"},
                       {"parameters", Json{{"input", a.input}, {"k", K}, {"precision_bits", c.precision_bits == 0 ? 0u : rounded_precision_bits(c.precision_bits)}}},
                       {"max_residual", max_residual},
                       {"identity_check", ids.json()}});
  ids.require_below(c.tol);
  out << "lanczos: " << coeffs["a"].size() << " coefficients -> " << c.out << "\n";
  return kSuccess;
}

// -------------------------------------------------------- krylov-evolve

struct KrylovArgs {
  std::string input;
  std::optional<double> omega0, omega1;
  double tmax = 10.0, dt = 0.05;
  int initial_truncation = 32, max_truncation = 4096;
  double max_step = 0.0;
};

int cmd_krylov(const Common& c, const KrylovArgs& a, std::ostream& out) {
  const bool from_file = !a.input.empty();
  if (from_file == (a.omega0 || a.omega1)) {
    throw ArgumentError("krylov-evolve: give either --input or both --omega0 and --omega1");
  }
  if (!from_file && !(a.omega0 && a.omega1)) throw ArgumentError("krylov-evolve: need both --omega0 and --omega1");
  const auto conv = c.conv();
  prepare_output_dir(c.dir());

  std::optional<KrylovChain> chain;
  IdentityCheck ids;
  Json params{{"tmax", a.tmax}, {"dt", a.dt}, {"tol", c.tol}};
  if (from_file) {
    const auto lc = lanczos_from_json(read_json_file(a.input));
    chain = KrylovChain::from_coefficients(lc);
    params["input"] = a.input;
    // Moments implied by the coefficients themselves.
    HamiltonianMoments<double> h{reconstruct_moments_all(lc, std::min(3, 2 * lc.size() - 1))};
    ids = identity_check(h, lc);
  } else {
    const ModePair<double> m{*a.omega0, *a.omega1};
    chain = mode_chain(m, conv);
    params["omega0"] = m.omega0;
    params["omega1"] = m.omega1;
    params["convention"] = to_string(conv);
    with_precision(c.precision_bits, [&]<class T>() {
      const ModePair<T> mt{T(m.omega0), T(m.omega1)};
      ids = identity_check(hamiltonian_moments(mode_moments(mt, 3, conv)), mode_lanczos(mt, 2, conv));
    });
  }
  KrylovOptions opt;
  opt.tol = c.tol;
  opt.initial_truncation = a.initial_truncation;
  opt.max_truncation = a.max_truncation;
  opt.max_step = a.max_step;
  const auto run = evolve(*chain, make_grid(a.tmax, a.dt), opt);
  write_csv_file(c.dir() / "complexity.csv", to_timeseries(run));

  Json summary{{"command", "krylov-evolve"},
               {"parameters", params},
               {"truncation", run.truncation},
               {"rk4_steps", run.rk4_steps},
               {"max_norm_defect", run.max_norm_defect},
               {"truncation_change", run.truncation_change},
               {"identity_check", ids.json()}};
  if (!from_file) {
    const ModePair<double> m{*a.omega0, *a.omega1};
    double worst = 0.0;
    for (const auto& s : run.states) worst = std::max(worst, std::abs(spread_complexity(s) - mode_spread_complexity(m, s.t)));
    summary["closed_form_max_abs_error"] = worst;
  }
  write_json_file(c.dir() / "summary.json", summary);
  ids.require_below(c.tol);
  out << "krylov-evolve: truncation " << run.truncation << ", " << run.rk4_steps << " RK4 steps -> " << c.out << "\n";
  return kSuccess;
}

// ----------------------------------------------------------------- bell

struct BellArgs {
  std::vector<std::string> cumulants;
  std::vector<std::string> moments;
  int random = 0;
  int order = 12;
};

int cmd_bell(const Common& c, const BellArgs& a, std::ostream& out) {
  using V = Complex<Rational>;
  if (a.cumulants.empty() == a.moments.empty() && a.random == 0) {
    throw ArgumentError("bell: give exactly one of --cumulants or --moments (or --random N)");
  }
  if (!a.cumulants.empty() && !a.moments.empty()) throw ArgumentError("bell: --cumulants and --moments are exclusive");
  prepare_output_dir(c.dir());

  Json result{{"command", "bell"}};
  IdentityCheck ids;
  if (!a.cumulants.empty() || !a.moments.empty()) {
    CumulantSequence<V> beta;
    MomentSequence<V> m;
    if (!a.cumulants.empty()) {
      for (const auto& s : a.cumulants) beta.values.emplace_back(parse_rational(s));
      m = moments_from_cumulants(beta, beta.order(), BellOptions{std::max(64, beta.order())});
    } else {
      m.values.emplace_back(Rational(1));
      for (std::size_t n = 0; n < a.moments.size(); ++n) {
        // <W^n> -> M_n = (-i)^n <W^n>
        m.values.push_back(times_i_pow(V(parse_rational(a.moments[n])), -static_cast<int>(n + 1)));
      }
      beta = cumulants_from_moments(m, m.order(), BellOptions{std::max(64, m.order())});
    }
    Json bj = Json::array(), bx = Json::array(), mj = Json::array(), mx = Json::array();
    HamiltonianMoments<Rational> h;
    for (int n = 1; n <= beta.order(); ++n) {
      const auto& b = beta.beta(n);
      if (b.im != 0) throw DomainError("bell: cumulant " + std::to_string(n) + " is not real");
      bj.push_back(to_double(b.re));
      bx.push_back(b.re.str());
    }
    for (int n = 0; n <= m.order(); ++n) {
      const V w = times_i_pow(m[n], n);
      if (w.im != 0) throw DomainError("bell: moment " + std::to_string(n) + " is not real");
      h.values.push_back(w.re);
      mj.push_back(to_double(w.re));
      mx.push_back(w.re.str());
    }
    result["cumulants"] = bj;
    result["cumulants_exact"] = bx;
    result["moments"] = mj;
    result["moments_exact"] = mx;
    if (h.size() >= 4 && h[2] - h[1] * h[1] > 0) {
      ids = identity_check(h, lanczos_from_moments(h, 2));
    }
  }
  if (a.random > 0) {
    // Exact round trips on random rational cumulant sequences.
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    const BellOptions opt{std::max(64, a.order)};
    for (int trial = 0; trial < a.random; ++trial) {
      CumulantSequence<V> beta;
      for (int n = 0; n < a.order; ++n) beta.values.emplace_back(Rational(num(rng), den(rng)));
      const auto back = cumulants_from_moments(moments_from_cumulants(beta, a.order, opt), a.order, opt);
      if (!(back.values == beta.values)) {
        throw CrossCheckFailure("bell: round trip failed on random sequence " + std::to_string(trial));
      }
    }
    result["random_round_trips"] = a.random;
    result["seed"] = c.seed;
  }
  write_json_file(c.dir() / "bell.json", result);
  Json summary{{"command", "bell"}, {"identity_check", ids.json()}};
  if (a.random > 0) summary["random_round_trips"] = a.random;
  write_json_file(c.dir() / "summary.json", summary);
  ids.require_below(c.tol);
  out << "bell: done -> " << c.out << "\n";
  return kSuccess;
}

// --------------------------------------------------------------- config

// Turns a JSON config object into flags placed right after the subcommand,
// so explicit flags (which come later) override them.
std::vector<std::string> config_flags(const Json& j) {
  if (!j.is_object()) throw ArgumentError("config: expected a JSON object");
  std::vector<std::string> flags;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw ArgumentError("config: nested \"config\" is not allowed");
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    auto scalar = [&](const Json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return v.dump();
      throw ArgumentError("config: unsupported value for \"" + key + "\"");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) flags.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        flags.push_back(flag);
        flags.push_back(scalar(v));
      }
    } else {
      flags.push_back(flag);
      flags.push_back(scalar(value));
    }
  }
  return flags;
}

const std::vector<std::string> kSubcommands{"chain", "oscillator", "field", "lanczos", "krylov-evolve", "bell"};

std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const auto flags = config_flags(read_json_file(path));
  auto sub = std::find_first_of(args.begin(), args.end(), kSubcommands.begin(), kSubcommands.end());
  if (sub == args.end()) throw ArgumentError("config: no subcommand given");
  args.insert(sub + 1, flags.begin(), flags.end());
  return args;
}

void add_common(CLI::App& app, Common& c) {
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--precision-bits", c.precision_bits, "Working precision in bits (128, 256, 512, 1024; lanczos also 0 = exact)");
  app.add_option("--tol", c.tol, "Tolerance for solver targets and identity checks");
  app.add_option("--convention", c.convention, "Energy origin: hamiltonian|work")->check(CLI::IsMember({"hamiltonian", "work"}));
  app.add_option("--seed", c.seed, "Seed for property sampling");
  app.add_option("--config", c.config, "JSON config file; explicit flags override it");
  app.add_option("--emit-precision", c.emit_precision, "17 (default) or full")->check(CLI::IsMember({"17", "full"}));
  app.add_flag("--emit-lanczos", c.emit_lanczos, "Also write per-mode Lanczos coefficients");
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Work statistics, Lanczos coefficients and spread complexity of quantum quenches", "qwork"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Common common;
  add_common(app, common);

  ChainArgs chain_args;
  auto* chain = app.add_subcommand("chain", "Periodic harmonic chain: total spread complexity per mode and summed");
  chain->fallthrough();
  chain->add_option("--n", chain_args.n, "Number of sites N");
  chain->add_option("--lambda0", chain_args.lambda0, "Pre-quench on-site frequency");
  chain->add_option("--lambda1", chain_args.lambda1, "Post-quench on-site frequency");
  chain->add_option("--coupling", chain_args.coupling, "Spring constant k0 = k1");
  chain->add_option("--tmax", chain_args.tmax);
  chain->add_option("--dt", chain_args.dt);
  chain->add_option("--kmax", chain_args.kmax, "Lanczos coefficients per mode");

  OscillatorArgs osc_args;
  auto* osc = app.add_subcommand("oscillator", "Single oscillator: spectrum, moments, cumulants, Lanczos on two routes");
  osc->fallthrough();
  osc->add_option("--omega0", osc_args.omega0);
  osc->add_option("--omega1", osc_args.omega1);
  osc->add_option("--kmax", osc_args.kmax);
  osc->add_option("--tmax", osc_args.tmax);
  osc->add_option("--dt", osc_args.dt);

  FieldArgs field_args;
  auto* field = app.add_subcommand("field", "Free-field mass quench: cumulant densities and the Gaussian limit");
  field->fallthrough();
  field->add_option("--dim", field_args.dim);
  field->add_option("--m0", field_args.m0);
  field->add_option("--m1", field_args.m1);
  field->add_option("--cutoff", field_args.cutoff);
  field->add_option("--volume", field_args.volume, "L^d");
  field->add_option("--nmax", field_args.nmax, "Highest cumulant density");
  field->add_option("--kmax", field_args.kmax, "Gaussian Lanczos coefficients to emit");
  field->add_option("--tmax", field_args.tmax);
  field->add_option("--dt", field_args.dt);
  field->add_option("--uv-tol", field_args.uv_tol);
  field->add_option("--quad-tol", field_args.quad_tol);

  LanczosArgs lanczos_args;
  auto* lanczos = app.add_subcommand("lanczos", "Lanczos coefficients from a moments JSON file");
  lanczos->fallthrough();
  lanczos->add_option("--input", lanczos_args.input)->required();
  lanczos->add_option("--kmax", lanczos_args.kmax, "Number of coefficients (default: all the moments allow)");

  KrylovArgs krylov_args;
  auto* krylov = app.add_subcommand("krylov-evolve", "RK4 evolution on a Lanczos chain");
  krylov->fallthrough();
  krylov->add_option("--input", krylov_args.input, "Lanczos coefficients JSON");
  krylov->add_option("--omega0", krylov_args.omega0, "Closed-form oscillator chain instead of --input");
  krylov->add_option("--omega1", krylov_args.omega1);
  krylov->add_option("--tmax", krylov_args.tmax);
  krylov->add_option("--dt", krylov_args.dt);
  krylov->add_option("--initial-truncation", krylov_args.initial_truncation);
  krylov->add_option("--max-truncation", krylov_args.max_truncation);
  krylov->add_option("--max-step", krylov_args.max_step);

  BellArgs bell_args;
  auto* bell = app.add_subcommand("bell", "Moments <-> cumulants in exact arithmetic");
  bell->fallthrough();
  bell->add_option("--cumulants", bell_args.cumulants, "beta_1, beta_2, ... (decimals or p/q)")->delimiter(',');
  bell->add_option("--moments", bell_args.moments, "<W>, <W^2>, ... (decimals or p/q)")->delimiter(',');
  bell->add_option("--random", bell_args.random, "Round-trip this many random sequences");
  bell->add_option("--order", bell_args.order, "Length of the random sequences");
  // Multi-valued options keep every value.
  bell->get_option("--cumulants")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  bell->get_option("--moments")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

  try {
    auto args = expand_config(args_in);
    std::reverse(args.begin(), args.end());
    app.parse(args);
    if (common.precision_bits != 0 && common.precision_bits < 64) throw ArgumentError("--precision-bits must be at least 64");
    if (common.precision_bits == 0 && !lanczos->parsed()) throw ArgumentError("--precision-bits 0 is only for lanczos");
    if (common.precision_bits > 1024) throw ArgumentError("--precision-bits above 1024 is not supported");
    if (!(common.tol > 0)) throw ArgumentError("--tol must be positive");
    if (chain->parsed()) return cmd_chain(common, chain_args, out);
    if (osc->parsed()) return cmd_oscillator(common, osc_args, out);
    if (field->parsed()) return cmd_field(common, field_args, out, err);
    if (lanczos->parsed()) return cmd_lanczos(common, lanczos_args, out);
    if (krylov->parsed()) return cmd_krylov(common, krylov_args, out);
    if (bell->parsed()) return cmd_bell(common, bell_args, out);
    return kInvalidInput;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const PrecisionError& e) {
    err << "precision failure: " << e.what() << "\n";
    return kPrecisionFailure;
  } catch (const CrossCheckFailure& e) {
    err << "cross-check mismatch: " << e.what() << "\n";
    return kCrossCheckMismatch;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace qwork::cli

#pragma once

// Time evolution on the Krylov chain: i dphi_n/dt = a_n phi_n + b_n phi_{n-1} + b_{n+1} phi_{n+1},
// phi(0) = e_0, by classical RK4 on an adaptively truncated chain.

#include "qwork/errors.hpp"
#include "qwork/lanczos.hpp"
#include "qwork/numeric.hpp"
#include "qwork/timeseries.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace qwork {

/// Coefficients of a (possibly infinite) Jacobi chain.
class KrylovChain {
 public:
  using Generator = std::function<double(int)>;

  /// Finite chain from computed coefficients. A chain that did not terminate
  /// is known only up to its length; evolution fails with TruncationError if
  /// the wavefunction reaches its end.
  template <class T>
  static KrylovChain from_coefficients(const LanczosCoefficients<T>& lc) {
    std::vector<double> a, b;
    for (const auto& x : lc.a) a.push_back(to_double(x));
    for (int n = 1; n <= static_cast<int>(lc.b_squared.size()); ++n) {
      const double b2 = to_double(lc.b_squared[static_cast<std::size_t>(n - 1)]);
      b.push_back(b2 > 0 ? std::sqrt(b2) : 0.0);
    }
    return KrylovChain(std::move(a), std::move(b), lc.terminated);
  }

  /// Infinite chain from closed-form generators a(n), n >= 0 and b(n), n >= 1.
  static KrylovChain from_generators(Generator a, Generator b);

  double a(int n) const;
  double b(int n) const;
  /// Number of sites, or nullopt for an infinite chain.
  std::optional<int> length() const { return length_; }
  /// True when the chain ends because the Krylov space is exhausted.
  bool closed() const { return closed_; }

  /// Chain of -H: evolving with it undoes evolution with *this.
  KrylovChain negated() const;

 private:
  KrylovChain(std::vector<double> a, std::vector<double> b, bool closed);
  KrylovChain() = default;

  Generator a_gen_, b_gen_;
  std::optional<int> length_;
  bool closed_ = false;
  double sign_ = 1.0;
};

struct KrylovOptions {
  double tol = 1e-10;           // tail weight and norm-defect target
  int initial_truncation = 32;  // doubled until the tail criterion holds
  int max_truncation = 4096;
  double max_step = 0.0;        // extra cap on the RK4 step; 0 = grid spacing only
};

struct KrylovState {
  std::vector<std::complex<double>> phi;
  double t = 0.0;
  double norm_defect = 0.0;  // |1 - sum |phi_n|^2|

  double tail_weight() const { return phi.empty() ? 0.0 : std::norm(phi.back()); }
};

struct KrylovRun {
  std::vector<KrylovState> states;
  int truncation = 0;
  long rk4_steps = 0;
  double max_norm_defect = 0.0;
  double truncation_change = 0.0;  // max |dC| against the run at half this truncation
};

/// Evolves from phi(0) = `initial` (default e_0) through the sorted grid
/// (t >= 0, starting anywhere). The step obeys h <= min(grid spacing,
/// 0.01 / spectral-radius bound), which is below 0.01 / max|coefficient|.
/// Truncation doubles until |phi_{n-1}|^2 < tol at every grid point, then
/// once more (or further) until doubling changes C(t) by less than tol; the
/// wider run is returned. Beyond max_truncation -> TruncationError.
KrylovRun evolve(const KrylovChain& chain, const std::vector<double>& t_grid, const KrylovOptions& opt = {},
                 const std::vector<std::complex<double>>& initial = {});

/// sum_n n |phi_n|^2
double spread_complexity(const KrylovState& s);

/// |phi_0|^2
double survival_from_phi(const KrylovState& s);

/// Upper estimate of the complexity lost to truncation: n_trunc * (tail weight + norm defect).
double complexity_error_bar(const KrylovState& s);

/// Channels complexity, survival, norm_defect.
TimeSeries to_timeseries(const KrylovRun& run);

}  // namespace qwork

#include "rtpinn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rtpinn/errors.hpp"
#include "rtpinn/random.hpp"

namespace rtpinn {
namespace {

double sobol_term(std::size_t n, int power) {
  return std::pow(std::log(static_cast<double>(n)), power) / static_cast<double>(n);
}

void validate_common(const BoundInputs& in) {
  for (double v : {in.e_tb, in.e_sb, in.e_int, in.sigma_sup, in.psi_sup, in.v_tb, in.v_sb, in.v_int, in.c_bar}) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("bound inputs must be finite and >= 0");
  }
  if (in.n_tb < 1 || in.n_sb < 1 || in.n_int < 1 || in.n_s < 1) throw ConfigError("bound counts must be >= 1");
  if (in.s < 1) throw ConfigError("quadrature order must be >= 1");
  if (in.d < 1) throw ConfigError("spatial dimension must be >= 1");
  if (!(in.s_d > 0.0)) throw ConfigError("s_d must be > 0");
}

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw ConfigError(std::string("bound input '") + name + "' is required");
  if (!(*v >= 0.0) || !std::isfinite(*v)) throw ConfigError(std::string("bound input '") + name + "' must be >= 0");
  return *v;
}

Direction sample_direction(int dim, double a, double b) {
  if (dim == 1) return Direction::slab(2.0 * a - 1.0);
  return Direction::angles(2.0 * a - 1.0, 2.0 * std::numbers::pi * b);
}

}  // namespace

double c_hat(double sigma_sup, double psi_sup, double s_d) { return 2.0 + 2.0 * (sigma_sup + psi_sup) / s_d; }

BoundValue time_dependent_bound(const BoundInputs& in) {
  validate_common(in);
  const double T = require(in.horizon, "T");
  const double c = require(in.light_speed, "c");
  BoundValue b;
  b.c_hat = c_hat(in.sigma_sup, in.psi_sup, in.s_d);
  b.constant = T + c * b.c_hat * T * T * std::exp(c * b.c_hat * T);
  b.c_star = std::max({in.v_tb, in.v_sb, in.v_int, in.c_bar});
  b.training_part = b.constant * (in.e_tb * in.e_tb + c * in.e_sb * in.e_sb + c * in.e_int * in.e_int);
  const double q = sobol_term(in.n_tb, 2 * in.d) + c * sobol_term(in.n_sb, 2 * in.d) +
                   c * sobol_term(in.n_int, 2 * in.d + 1) +
                   c * std::pow(static_cast<double>(in.n_s), -2.0 * in.s);
  b.quadrature_part = b.constant * b.c_star * q;
  b.total = b.training_part + b.quadrature_part;
  return b;
}

AssumptionCheck check_assumption(const BoundInputs& in) {
  if (!(in.s_d > 0.0)) throw ConfigError("s_d must be > 0");
  AssumptionCheck a;
  a.kappa = require(in.k_min, "k_min") + require(in.sigma_min, "sigma_min") -
            (require(in.sigma_max, "sigma_max") + in.psi_sup) / in.s_d;
  a.holds = a.kappa > 0.0;
  return a;
}

BoundValue steady_bound(const BoundInputs& in) {
  validate_common(in);
  const auto check = check_assumption(in);
  BoundValue b;
  b.kappa = check.kappa;
  if (!check.holds) {
    b.applicable = false;
    b.message = "coercivity assumption violated: kappa = " + std::to_string(check.kappa) + " <= 0";
    return b;
  }
  if (in.kappa) {
    if (!(*in.kappa > 0.0) || *in.kappa > check.kappa) {
      throw ConfigError("kappa must lie in (0, " + std::to_string(check.kappa) + "]");
    }
    b.kappa = *in.kappa;
  }
  const double kappa = b.kappa;
  const double c_eps = in.c_epsilon ? require(in.c_epsilon, "c_epsilon") : 2.0 / kappa;
  const double ns = std::pow(static_cast<double>(in.n_s), -2.0 * in.s);
  b.constant = std::max({2.0 / kappa, 2.0 / kappa * in.v_sb, 2.0 * c_eps / kappa * in.v_int,
                         2.0 * c_eps / kappa * in.c_bar * ns});
  b.training_part = b.constant * (in.e_sb * in.e_sb + in.e_int * in.e_int);
  b.quadrature_part =
      b.constant * (sobol_term(in.n_sb, 2 * in.d - 1) + sobol_term(in.n_int, 2 * in.d) + ns);
  b.total = b.training_part + b.quadrature_part;
  return b;
}

double psi_sup(const ScatteringKernel& kernel, const SphereRule& rule, Interval band, std::size_t samples) {
  CounterRng rng(0x951, 7);
  double best = 0.0;
  const bool poly = rule.has_frequency_nodes();
  for (std::size_t k = 0; k < samples; ++k) {
    const Direction w = sample_direction(rule.dim, rng.uniform(3 * k), rng.uniform(3 * k + 1));
    const double nu = poly ? band.lo + (band.hi - band.lo) * rng.uniform(3 * k + 2) : 0.0;
    double psi = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) psi += rule.weights[i] * kernel(w, rule.directions[i], nu, rule.frequency(i, nu));
    best = std::max(best, std::abs(psi));
  }
  return best;
}

double kernel_asymmetry(const ScatteringKernel& kernel, int dim, Interval band, std::size_t pairs,
                        std::uint64_t seed) {
  CounterRng rng(seed, 11);
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto u = [&](int j) { return rng.uniform(6 * k + j); };
    const Direction w = sample_direction(dim, u(0), u(1));
    const Direction wp = sample_direction(dim, u(2), u(3));
    const double nu = band.lo + (band.hi - band.lo) * u(4);
    const double nup = band.lo + (band.hi - band.lo) * u(5);
    worst = std::max(worst, std::abs(kernel(w, wp, nu, nup) - kernel(wp, w, nup, nu)));
  }
  return worst;
}

GeneralizationError empirical_generalization_error(const PhaseFn& approx, const PhaseFn& oracle,
                                                   const DomainDescriptor& domain, const SphereRule& rule, int n_x,
                                                   int n_nu, double t) {
  const int d = domain.spatial_dim();
  std::vector<GaussRule> axes;
  for (int a = 0; a < d; ++a) axes.push_back(gauss_legendre(n_x, domain.box()[a].lo, domain.box()[a].hi));
  GaussRule freq;
  if (domain.monochromatic()) {
    freq.nodes = {0.0};
    freq.weights = {1.0};
  } else {
    freq = gauss_legendre(n_nu, domain.frequency().lo, domain.frequency().hi);
  }
  double err = 0.0;
  double ref = 0.0;
  std::vector<int> idx(d, 0);
  const std::size_t total = static_cast<std::size_t>(std::pow(n_x, d));
  PhasePoint z;
  z.t = t;
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t r = flat;
    double wx = 1.0;
    for (int a = 0; a < d; ++a) {
      const std::size_t j = r % n_x;
      r /= n_x;
      z.x[a] = axes[a].nodes[j];
      wx *= axes[a].weights[j];
    }
    for (std::size_t f = 0; f < freq.order(); ++f) {
      z.nu = freq.nodes[f];
      for (std::size_t i = 0; i < rule.size(); ++i) {
        z.omega = rule.directions[i];
        const double w = wx * freq.weights[f] * rule.weights[i];
        const double exact = oracle(z);
        const double diff = approx(z) - exact;
        err += w * diff * diff;
        ref += w * exact * exact;
      }
    }
  }
  return {std::sqrt(err), std::sqrt(ref)};
}

}  // namespace rtpinn

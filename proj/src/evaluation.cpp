#include "rtpinn/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "rtpinn/bounds.hpp"
#include "rtpinn/errors.hpp"
#include "rtpinn/residuals.hpp"

namespace rtpinn {

SlabBoundaryCheck slab_boundary_check(const MlpNetwork& u, const RteProblem& problem, int n_mu, int n_x) {
  if (problem.domain.spatial_dim() != 1) throw ConfigError("slab boundary check needs a 1D problem");
  const NetworkField f(u, problem.domain, problem.intensity_scale);
  const auto gm = gauss_legendre(n_mu);
  SlabBoundaryCheck out;
  double err = 0.0;
  double ref = 0.0;
  for (int i = 0; i < n_mu; ++i) {
    const double mu = gm.nodes[i];
    PhasePoint z;
    z.omega = Direction::slab(mu);
    z.x = {mu > 0.0 ? 0.0 : 1.0, 0.0, 0.0};
    const Vec3 normal{mu > 0.0 ? -1.0 : 1.0, 0.0, 0.0};
    const double target = problem.inflow(z, normal);
    const double d = f.value(z) - target;
    err += gm.weights[i] * d * d;
    ref += gm.weights[i] * target * target;
  }
  out.inflow_l2_relative = std::sqrt(err / ref);
  out.min_value = f.value(PhasePoint{});
  out.max_value = out.min_value;
  for (int j = 0; j < n_x; ++j) {
    for (int i = 0; i < n_mu; ++i) {
      PhasePoint z;
      z.x = {static_cast<double>(j) / (n_x - 1), 0.0, 0.0};
      z.omega = Direction::slab(gm.nodes[i]);
      const double v = f.value(z);
      out.min_value = std::min(out.min_value, v);
      out.max_value = std::max(out.max_value, v);
    }
  }
  return out;
}

double radial_flux_error(const MlpNetwork& u, const RteProblem& problem, int n_x, int n_nu, const SphereRule& rule) {
  if (problem.domain.spatial_dim() != 3 || problem.domain.monochromatic()) {
    throw ConfigError("radial flux error needs the polychromatic cube");
  }
  const NetworkField f(u, problem.domain, problem.intensity_scale);
  const auto gx = gauss_legendre(n_x, 0.0, 1.0);
  const auto& band = problem.domain.frequency();
  const auto gn = gauss_legendre(n_nu, band.lo, band.hi);
  double err = 0.0;
  double ref = 0.0;
  for (int i = 0; i < n_x; ++i) {
    for (int j = 0; j < n_x; ++j) {
      for (int k = 0; k < n_x; ++k) {
        const Vec3 x{gx.nodes[i], gx.nodes[j], gx.nodes[k]};
        const Vec3 d{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
        const double r = norm(d);
        for (int l = 0; l < n_nu; ++l) {
          const double nu = gn.nodes[l];
          const double w = gx.weights[i] * gx.weights[j] * gx.weights[k] * gn.weights[l];
          const double fr = dot(heat_flux(f, rule, 0.0, x, nu), d) / r;
          const double exact = radial_flux_oracle(r, nu);
          err += w * (fr - exact) * (fr - exact);
          ref += w * exact * exact;
        }
      }
    }
  }
  return std::sqrt(err / ref);
}

double ShellComparison::max_relative() const {
  return relative_l2.empty() ? 0.0 : *std::max_element(relative_l2.begin(), relative_l2.end());
}

ShellComparison shell_comparison(const MlpNetwork& u, const RteProblem& problem, double k_nu, double tau,
                                 const std::vector<double>& radii, int n_nu, const SphereRule& rule) {
  if (!problem.shell) throw ConfigError("shell comparison needs the shell problem");
  const auto& shell = *problem.shell;
  const NetworkField f(u, problem.domain, problem.intensity_scale);
  const auto gs = gauss_legendre(n_nu, 0.0, 1.0);
  ShellComparison out;
  out.tau = tau;
  out.radii = radii;
  for (int l = 0; l < n_nu; ++l) out.frequencies.push_back(problem.domain.frequency_from_unit(gs.nodes[l]));
  static const Vec3 axes[6] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  for (double r : radii) {
    if (r < shell.inner_radius || r > shell.outer_radius) throw ConfigError("comparison radius outside the shell");
    double err = 0.0;
    double ref = 0.0;
    for (int l = 0; l < n_nu; ++l) {
      const double nu = out.frequencies[l];
      double g = 0.0;
      for (const auto& a : axes) {
        const Vec3 x{shell.center[0] + r * a[0], shell.center[1] + r * a[1], shell.center[2] + r * a[2]};
        g += incident_radiation(f, rule, tau, x, nu) / 6.0;
      }
      const double exact = diffusion_oracle(tau, r, nu, k_nu, shell_source_temperature(), shell_medium_temperature(),
                                            shell.inner_radius, problem.light_speed);
      out.g_model.push_back(g);
      out.g_oracle.push_back(exact);
      err += gs.weights[l] * (g - exact) * (g - exact);
      ref += gs.weights[l] * exact * exact;
    }
    out.relative_l2.push_back(std::sqrt(err / ref));
  }
  return out;
}

InverseErrors inverse_errors(const MlpNetwork& u, const MlpNetwork& k, const InverseFixture& fixture,
                             const SphereRule& rule, int n_x) {
  const auto& p = fixture.problem;
  const NetworkField f(u, p.domain, p.intensity_scale);
  InverseErrors out;
  out.u = empirical_generalization_error([&](const PhasePoint& z) { return f.value(z); }, fixture.true_intensity,
                                         p.domain, rule, n_x)
              .relative();
  const auto gx = gauss_legendre(n_x, 0.0, 1.0);
  double ek = 0.0, rk = 0.0, eg = 0.0, rg = 0.0;
  for (int i = 0; i < n_x; ++i) {
    for (int j = 0; j < n_x; ++j) {
      for (int l = 0; l < n_x; ++l) {
        const Vec3 x{gx.nodes[i], gx.nodes[j], gx.nodes[l]};
        const double w = gx.weights[i] * gx.weights[j] * gx.weights[l];
        const double kk = absorption_network_value(k, p.domain, x, 0.0);
        const double ke = fixture.true_absorption(x, 0.0);
        ek += w * (kk - ke) * (kk - ke);
        rk += w * ke * ke;
        const double g = incident_radiation(f, rule, 0.0, x, 0.0);
        const double ge = fixture.measured_incident(x);
        eg += w * (g - ge) * (g - ge);
        rg += w * ge * ge;
      }
    }
  }
  out.k = std::sqrt(ek / rk);
  out.g = std::sqrt(eg / rg);
  return out;
}

}  // namespace rtpinn

#pragma once

#include <vector>

#include "rtpinn/network.hpp"
#include "rtpinn/problems.hpp"
#include "rtpinn/quadrature.hpp"

namespace rtpinn {

// Trained slab intensity against the imposed inflow data on Gamma_-:
// u(0, mu > 0) = 1 and u(1, mu < 0) = 0.
struct SlabBoundaryCheck {
  double inflow_l2_relative = 0.0;  // ||u - u_b||_{Gamma_-} / ||u_b||_{Gamma_-}
  double min_value = 0.0;           // over the (x, mu) evaluation grid
  double max_value = 0.0;
};
SlabBoundaryCheck slab_boundary_check(const MlpNetwork& u, const RteProblem& problem, int n_mu = 64, int n_x = 101);

// Relative L2 error of the radial heat flux F . (x - c) / |x - c| against the
// closed-form profile, over a Gauss grid in x (n_x per axis) and nu (n_nu).
double radial_flux_error(const MlpNetwork& u, const RteProblem& problem, int n_x = 8, int n_nu = 16,
                         const SphereRule& rule = sphere_rule(3, 12, 12));

// Incident radiation of the trained shell model against the diffusion
// profile at time tau, for each radius, over Gauss nodes of the rescaled
// frequency coordinate. G at a radius is averaged over the six axis points.
struct ShellComparison {
  double tau = 1.0;
  std::vector<double> radii;
  std::vector<double> frequencies;
  std::vector<double> g_model;   // radius-major
  std::vector<double> g_oracle;  // radius-major
  std::vector<double> relative_l2;  // per radius, over frequency

  double max_relative() const;
};
ShellComparison shell_comparison(const MlpNetwork& u, const RteProblem& problem, double k_nu, double tau,
                                 const std::vector<double>& radii, int n_nu = 16,
                                 const SphereRule& rule = sphere_rule(3, 8, 8));

struct InverseErrors {
  double u = 0.0;  // relative L2 over D x S
  double k = 0.0;  // relative L2 over D
  double g = 0.0;  // relative L2 of the incident radiation over D
};
InverseErrors inverse_errors(const MlpNetwork& u, const MlpNetwork& k, const InverseFixture& fixture,
                             const SphereRule& rule, int n_x = 12);

}  // namespace rtpinn

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtpinn/geometry.hpp"
#include "rtpinn/quadrature.hpp"

namespace rtpinn {

using CoefficientFn = std::function<double(const Vec3& x, double nu)>;
using PhaseFn = std::function<double(const PhasePoint& z)>;
// Inflow data u_b(z) at a boundary point with outward normal n.
using BoundaryFn = std::function<double(const PhasePoint& z, const Vec3& normal)>;

// (1/c) du/dt + omega . grad u + k u + sigma (u - (1/s_d) int Phi u) = f
// with u = u0 at t = 0 and u = u_b on the inflow boundary.
struct RteProblem {
  std::string name;
  DomainDescriptor domain{1, {{0.0, 1.0}}};
  std::optional<ShellGeometry> shell;
  double light_speed = 1.0;
  ScatteringKernel kernel;
  bool scattering_free = false;  // sigma identically zero
  CoefficientFn absorption;
  CoefficientFn scattering;
  PhaseFn source;
  PhaseFn initial;
  BoundaryFn inflow;
  int n_mu = 10;
  int n_phi = 10;
  // The trained network represents u / intensity_scale; losses and training
  // errors are in these units, evaluated fields in physical units.
  double intensity_scale = 1.0;

  SphereRule default_rule() const { return sphere_rule(domain.spatial_dim(), n_mu, n_phi); }
  double surface_area() const { return domain.surface_area(); }

  // Throws DomainError when the kernel is not normalized under `rule` or when
  // k or sigma is negative at one of `probes` interior-like sample points.
  void validate(const SphereRule& rule, std::size_t probes = 256) const;
};

// Slab coefficients d_l of the Legendre scattering kernel.
const std::vector<double>& slab_kernel_coefficients();

RteProblem slab_problem();
RteProblem cube_mono_problem();
// sigma is not fixed for this scenario; 0 keeps the radial-flux oracle exact.
RteProblem cube_poly_problem(double sigma = 0.0);
RteProblem shell_time_problem(double k_nu);

struct InverseFixture {
  RteProblem problem;  // with the true absorption, used to build f
  CoefficientFn true_absorption;
  PhaseFn true_intensity;
  std::function<double(const Vec3& x)> measured_incident;  // G-bar
  std::function<Vec3(const PhasePoint& z)> true_intensity_gradient;
};

InverseFixture inverse_problem_fixture();

// Problem by CLI name: slab1d, cube3d-mono, cube3d-poly, shell-time, inverse-cube.
struct ProblemOptions {
  double sigma = 0.0;  // cube3d-poly only
  double k_nu = 10.0;  // shell-time only
  double intensity_scale = 1.0;
};
RteProblem make_problem(const std::string& name, const ProblemOptions& options = {});
std::vector<std::string> problem_names();

// ---- closed-form reference values ----

// Emission profile I_b(x) = max(0.5 - |x - c|, 0) with c the cube center.
double cube_blackbody(const Vec3& x);
// phi(nu) = exp(-nu^2) / sqrt(pi)
double frequency_profile(double nu);
// Source of the polychromatic cube: sqrt(pi) phi(nu) (1 - 2r) for r <= 0.5.
double cube_poly_source(double r, double nu);
// Radial flux of the polychromatic cube with zero absorption and scattering.
double radial_flux_oracle(double r, double nu);

// Planck spectral radiance B(T, nu) in SI units (T in kelvin, nu in Hz).
double planck(double temperature, double nu);

enum class DiffusionFormula { consistent, printed };

// Incident radiation of the radially symmetric diffusion approximation
// around a sphere of radius R_i held at b(T_s) in a medium at b(T_m):
//   G = b_m + (R_i / r)(b_s - b_m) F(t, r)
// `consistent` uses the solution of the diffusion equation,
//   F = 1/2 [e^{-s d} erfc(a - b) + e^{s d} erfc(a + b)],
// s = sqrt(3) k, a = d sqrt(3k/(4ct)), b = sqrt(k c t), d = r - R_i.
// `printed` uses the common factor e^{-3k d} in front of both erfc terms.
double diffusion_oracle(double t, double r, double nu, double k_nu, double t_s, double t_m, double r_i,
                        double light_speed = 1.0, DiffusionFormula formula = DiffusionFormula::consistent);
double diffusion_profile(double t, double d, double k_nu, double light_speed,
                         DiffusionFormula formula = DiffusionFormula::consistent);

// exp(x^2) erfc(x), accurate for large x.
double erfcx(double x);

// Temperatures of the shell scenario, in kelvin.
double shell_source_temperature();
double shell_medium_temperature();

}  // namespace rtpinn

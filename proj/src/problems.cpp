#include "rtpinn/problems.hpp"

#include <cmath>
#include <numbers>

#include "rtpinn/constants.hpp"
#include "rtpinn/errors.hpp"
#include "rtpinn/random.hpp"

namespace rtpinn {
namespace {

constexpr double kPi = std::numbers::pi;

double distance_to_center(const Vec3& x) {
  const Vec3 d{x[0] - 0.5, x[1] - 0.5, x[2] - 0.5};
  return norm(d);
}

double cube_product(const Vec3& x) { return x[0] * (x[0] - 1.0) * x[1] * (x[1] - 1.0) * x[2] * (x[2] - 1.0); }

const Vec3 kInverseDirection{1.0 / std::numbers::sqrt3, 1.0 / std::numbers::sqrt3, 1.0 / std::numbers::sqrt3};

double inverse_angular(const Direction& w) {
  const double c = dot(w.v, kInverseDirection);
  return 3.0 / (16.0 * kPi) * (1.0 + c * c);
}

DomainDescriptor unit_cube(Interval frequency = {}) {
  return DomainDescriptor(3, {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, 0.0, frequency);
}

}  // namespace

void RteProblem::validate(const SphereRule& rule, std::size_t probes) const {
  CounterRng rng(0x5eed, 0xc0ef);
  std::uint64_t counter = 0;
  std::vector<double> y(domain.input_dim());
  for (std::size_t i = 0; i < probes; ++i) {
    for (auto& v : y) v = rng.uniform(counter++);
    const PhasePoint z = domain.from_unit(y);
    if (absorption(z.x, z.nu) < 0.0) throw DomainError(name + ": negative absorption coefficient");
    if (scattering(z.x, z.nu) < 0.0) throw DomainError(name + ": negative scattering coefficient");
    if (i < 16) {
      const double norm = kernel_normalization(kernel, rule, z.omega, z.nu, surface_area());
      if (std::abs(norm - 1.0) > 1e-8) {
        throw DomainError(name + ": scattering kernel is not normalized (got " + std::to_string(norm) + ")");
      }
    }
  }
}

const std::vector<double>& slab_kernel_coefficients() {
  static const std::vector<double> d = {1.0, 1.98398, 1.50823, 0.70075, 0.23489, 0.05133, 0.00760, 0.00048};
  return d;
}

RteProblem slab_problem() {
  RteProblem p;
  p.name = "slab1d";
  p.domain = DomainDescriptor(1, {{0.0, 1.0}});
  p.kernel = ScatteringKernel::legendre(slab_kernel_coefficients());
  p.absorption = [](const Vec3&, double) { return 0.0; };
  p.scattering = [](const Vec3& x, double) { return x[0]; };
  p.source = [](const PhasePoint&) { return 0.0; };
  p.initial = [](const PhasePoint&) { return 0.0; };
  p.inflow = [](const PhasePoint& z, const Vec3&) { return z.x[0] < 0.5 && z.omega.mu > 0.0 ? 1.0 : 0.0; };
  p.n_mu = 10;
  p.n_phi = 1;
  p.validate(p.default_rule());
  return p;
}

double cube_blackbody(const Vec3& x) { return std::max(0.5 - distance_to_center(x), 0.0); }

RteProblem cube_mono_problem() {
  RteProblem p;
  p.name = "cube3d-mono";
  p.domain = unit_cube();
  p.kernel = ScatteringKernel::isotropic();
  p.absorption = [](const Vec3& x, double) { return cube_blackbody(x); };
  p.scattering = [](const Vec3&, double) { return 1.0; };
  p.source = [](const PhasePoint& z) {
    const double ib = cube_blackbody(z.x);
    return ib * ib;
  };
  p.initial = [](const PhasePoint&) { return 0.0; };
  p.inflow = [](const PhasePoint&, const Vec3&) { return 0.0; };
  p.validate(p.default_rule());
  return p;
}

double frequency_profile(double nu) { return std::exp(-nu * nu) / std::sqrt(kPi); }

double cube_poly_source(double r, double nu) {
  return r <= 0.5 ? std::sqrt(kPi) * frequency_profile(nu) * (1.0 - 2.0 * r) : 0.0;
}

double radial_flux_oracle(double r, double nu) {
  if (r < 0.0) throw DomainError("radial flux needs r >= 0");
  const double scale = 4.0 * std::pow(std::sqrt(kPi), 3) * frequency_profile(nu);
  if (r <= 0.5) return scale * (r / 3.0 - r * r / 2.0);
  return scale / (96.0 * r * r);
}

RteProblem cube_poly_problem(double sigma) {
  if (!(sigma >= 0.0)) throw ConfigError("scattering coefficient must be >= 0");
  RteProblem p;
  p.name = "cube3d-poly";
  p.domain = unit_cube({-6.0, 6.0});
  p.kernel = ScatteringKernel::isotropic();
  p.scattering_free = sigma == 0.0;
  p.absorption = [](const Vec3&, double) { return 0.0; };
  p.scattering = [sigma](const Vec3&, double) { return sigma; };
  p.source = [](const PhasePoint& z) { return cube_poly_source(distance_to_center(z.x), z.nu); };
  p.initial = [](const PhasePoint&) { return 0.0; };
  p.inflow = [](const PhasePoint&, const Vec3&) { return 0.0; };
  p.validate(p.default_rule());
  return p;
}

double planck(double temperature, double nu) {
  if (!(temperature > 0.0) || !(nu > 0.0)) throw DomainError("Planck function needs T > 0 and nu > 0");
  const double h = constants::planck;
  const double c = constants::speed_of_light;
  const double x = h * nu / (constants::boltzmann * temperature);
  return 2.0 * h * nu * nu * nu / (c * c) / std::expm1(x);
}

double shell_source_temperature() { return constants::ev_to_kelvin(150.0); }
double shell_medium_temperature() { return constants::ev_to_kelvin(120.0); }

RteProblem shell_time_problem(double k_nu) {
  if (!(k_nu > 0.0)) throw ConfigError("absorption coefficient k_nu must be > 0");
  RteProblem p;
  p.name = "shell-time";
  p.domain = DomainDescriptor(3, {{-4.0, 4.0}, {-4.0, 4.0}, {-4.0, 4.0}}, 1.0, {1e15, 1e18},
                              FrequencyScale::logarithmic);
  p.shell = ShellGeometry{{0.0, 0.0, 0.0}, 2.0, 4.0};
  // Time is the rescaled variable tau = c t, so the speed is 1 in these units.
  p.light_speed = 1.0;
  p.kernel = ScatteringKernel::isotropic();
  p.scattering_free = true;
  const double tm = shell_medium_temperature();
  const double ts = shell_source_temperature();
  p.absorption = [k_nu](const Vec3&, double) { return k_nu; };
  p.scattering = [](const Vec3&, double) { return 0.0; };
  p.source = [k_nu, tm](const PhasePoint& z) { return k_nu * planck(tm, z.nu); };
  p.initial = [tm](const PhasePoint& z) { return planck(tm, z.nu); };
  p.inflow = [tm, ts](const PhasePoint& z, const Vec3&) { return planck(norm(z.x) < 3.0 ? ts : tm, z.nu); };
  p.validate(p.default_rule());
  return p;
}

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; the first omitted term is below 1e-10 relative here.
  const double t = 1.0 / (2.0 * x * x);
  return (1.0 - t + 3.0 * t * t - 15.0 * t * t * t + 105.0 * t * t * t * t) / (x * std::sqrt(kPi));
}

double diffusion_profile(double t, double d, double k_nu, double light_speed, DiffusionFormula formula) {
  if (t < 0.0 || d < 0.0) throw DomainError("diffusion profile needs t >= 0 and r >= R_i");
  if (d == 0.0) return 1.0;
  if (t == 0.0) return 0.0;
  const double a = d * std::sqrt(3.0 * k_nu / (4.0 * light_speed * t));
  const double b = std::sqrt(k_nu * light_speed * t);
  if (formula == DiffusionFormula::printed) {
    return 0.5 * std::exp(-3.0 * k_nu * d) * (std::erfc(a - b) + std::erfc(a + b));
  }
  // With s = sqrt(3) k: s d = 2ab, so s d - (a + b)^2 = -(a^2 + b^2).
  const double s = std::sqrt(3.0) * k_nu;
  const double damp = std::exp(-(a * a + b * b));
  const double first = a - b > 0.0 ? damp * erfcx(a - b) : std::exp(-s * d) * std::erfc(a - b);
  const double second = damp * erfcx(a + b);
  return 0.5 * (first + second);
}

double diffusion_oracle(double t, double r, double nu, double k_nu, double t_s, double t_m, double r_i,
                        double light_speed, DiffusionFormula formula) {
  if (r < r_i) throw DomainError("diffusion oracle needs r >= R_i");
  const double bm = 4.0 * kPi * planck(t_m, nu);
  const double bs = 4.0 * kPi * planck(t_s, nu);
  return bm + r_i / r * (bs - bm) * diffusion_profile(t, r - r_i, k_nu, light_speed, formula);
}

InverseFixture inverse_problem_fixture() {
  constexpr double sigma = 0.5;
  InverseFixture fx;
  fx.true_absorption = [](const Vec3& x, double) { return x[0] * x[0] * x[1] * x[1] * x[2] * x[2]; };
  fx.true_intensity = [](const PhasePoint& z) { return inverse_angular(z.omega) * cube_product(z.x); };
  fx.true_intensity_gradient = [](const PhasePoint& z) {
    const auto& x = z.x;
    const double a = inverse_angular(z.omega);
    const double px = x[0] * (x[0] - 1.0);
    const double py = x[1] * (x[1] - 1.0);
    const double pz = x[2] * (x[2] - 1.0);
    return Vec3{a * (2.0 * x[0] - 1.0) * py * pz, a * px * (2.0 * x[1] - 1.0) * pz, a * px * py * (2.0 * x[2] - 1.0)};
  };
  fx.measured_incident = [](const Vec3& x) { return cube_product(x); };

  RteProblem& p = fx.problem;
  p.name = "inverse-cube";
  p.domain = unit_cube();
  p.kernel = ScatteringKernel::isotropic();
  p.absorption = fx.true_absorption;
  p.scattering = [](const Vec3&, double) { return sigma; };
  // f = omega . grad u + k u + sigma (u - G / (4 pi)) with the exact angular integral G.
  p.source = [k = fx.true_absorption, u = fx.true_intensity, grad = fx.true_intensity_gradient](const PhasePoint& z) {
    const double uz = u(z);
    const double g = cube_product(z.x);
    return dot(z.omega.v, grad(z)) + k(z.x, z.nu) * uz + sigma * (uz - g / (4.0 * kPi));
  };
  p.initial = [](const PhasePoint&) { return 0.0; };
  p.inflow = [](const PhasePoint&, const Vec3&) { return 0.0; };
  p.validate(p.default_rule());
  return fx;
}

RteProblem make_problem(const std::string& name, const ProblemOptions& options) {
  if (!(options.intensity_scale > 0.0) || !std::isfinite(options.intensity_scale)) {
    throw ConfigError("intensity_scale must be a positive number");
  }
  RteProblem p;
  if (name == "slab1d") {
    p = slab_problem();
  } else if (name == "cube3d-mono") {
    p = cube_mono_problem();
  } else if (name == "cube3d-poly") {
    p = cube_poly_problem(options.sigma);
  } else if (name == "shell-time") {
    p = shell_time_problem(options.k_nu);
  } else if (name == "inverse-cube") {
    p = inverse_problem_fixture().problem;
  } else {
    throw ConfigError("unknown problem '" + name + "'");
  }
  p.intensity_scale = options.intensity_scale;
  return p;
}

std::vector<std::string> problem_names() {
  return {"slab1d", "cube3d-mono", "cube3d-poly", "shell-time", "inverse-cube"};
}

}  // namespace rtpinn

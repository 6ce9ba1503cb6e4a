#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rtpinn/constants.hpp"
#include "rtpinn/errors.hpp"
#include "rtpinn/problems.hpp"

using namespace rtpinn;

namespace {
constexpr double kPi = std::numbers::pi;

PhasePoint point(Vec3 x, Direction w, double nu = 0.0, double t = 0.0) {
  PhasePoint z;
  z.x = x;
  z.omega = w;
  z.nu = nu;
  z.t = t;
  return z;
}
}  // namespace

TEST_CASE("slab problem") {
  const auto p = slab_problem();
  CHECK(slab_kernel_coefficients()[0] == 1.0);
  CHECK(slab_kernel_coefficients().size() == 8);
  CHECK(p.scattering({0.7, 0, 0}, 0.0) == 0.7);
  CHECK(p.absorption({0.7, 0, 0}, 0.0) == 0.0);
  CHECK(p.inflow(point({0, 0, 0}, Direction::slab(0.3)), {-1, 0, 0}) == 1.0);
  CHECK(p.inflow(point({1, 0, 0}, Direction::slab(-0.3)), {1, 0, 0}) == 0.0);
  CHECK(p.default_rule().size() == 10);
  CHECK(kernel_normalization(p.kernel, sphere_rule(1, 32, 0), Direction::slab(0.77), 0.0, 2.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("monochromatic cube") {
  const auto p = cube_mono_problem();
  CHECK(cube_blackbody({0.5, 0.5, 0.5}) == 0.5);
  CHECK(cube_blackbody({0.5, 0.5, 1.1}) == 0.0);
  CHECK(p.source(point({0.5, 0.5, 0.5}, Direction::angles(0.1, 0.2))) == 0.25);
  CHECK(p.absorption({0.5, 0.5, 0.5}, 0.0) == 0.5);
  CHECK(p.scattering({0.2, 0.5, 0.9}, 0.0) == 1.0);
}

TEST_CASE("polychromatic cube and radial flux") {
  CHECK(radial_flux_oracle(0.5, 0.0) == doctest::Approx(kPi / 6.0).epsilon(1e-15));
  // Both branches meet at r = 0.5.
  const double scale = 4.0 * std::pow(kPi, 1.5) / std::sqrt(kPi);
  CHECK(std::abs(scale * (0.5 / 3.0 - 0.125) - scale / 24.0) < 1e-15);
  CHECK(std::abs(radial_flux_oracle(1e-9, 1.0)) < 1e-8);
  // (1/r^2) d(r^2 F_r)/dr = 4 pi f
  for (double r : {0.1, 0.25, 0.4, 0.7}) {
    for (double nu : {0.0, 0.8}) {
      const double h = 1e-3;
      const auto q = [nu](double s) { return s * s * radial_flux_oracle(s, nu); };
      const double dq = (q(r - 2 * h) - 8 * q(r - h) + 8 * q(r + h) - q(r + 2 * h)) / (12 * h);
      const double div = dq / (r * r);
      CHECK(std::abs(div - 4.0 * kPi * cube_poly_source(r, nu)) < 1e-8);
    }
  }
  const auto p = cube_poly_problem();
  CHECK(p.scattering_free);
  CHECK(p.domain.input_dim() == 6);
  CHECK(p.source(point({0.5, 0.5, 0.5}, Direction::angles(0.0, 0.0), 0.0)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(cube_poly_problem(-1.0), ConfigError);
}

TEST_CASE("planck function") {
  const double t = 1.0e6;
  const double nu = 50.0 * constants::boltzmann * t / constants::planck;
  const double wien = 2.0 * constants::planck * nu * nu * nu / (constants::speed_of_light * constants::speed_of_light);
  CHECK(std::abs(planck(t, nu) * std::exp(50.0) / wien - 1.0) < 1e-10);
  double prev = 0.0;
  for (double temp = 1e5; temp < 1e7; temp *= 1.5) {
    const double b = planck(temp, 1e16);
    CHECK(b > prev);
    prev = b;
  }
  CHECK_THROWS_AS(planck(0.0, 1e15), DomainError);
  CHECK_THROWS_AS(planck(100.0, -1.0), DomainError);
  CHECK(shell_source_temperature() == doctest::Approx(150.0 * 11604.518121550082).epsilon(1e-12));
}

TEST_CASE("shell problem") {
  const auto p = shell_time_problem(10.0);
  const double tm = shell_medium_temperature();
  const double ts = shell_source_temperature();
  CHECK(p.domain.input_dim() == 7);
  CHECK(p.shell.has_value());
  const auto z = point({2.0, 0.0, 0.0}, Direction::cartesian({1.0, 0.2, 0.0}), 3e16);
  CHECK(p.inflow(z, {-1.0, 0.0, 0.0}) == planck(ts, 3e16));
  const auto zo = point({0.0, 4.0, 0.0}, Direction::cartesian({0.0, -1.0, 0.1}), 3e16);
  CHECK(p.inflow(zo, {0.0, 1.0, 0.0}) == planck(tm, 3e16));
  CHECK(p.initial(z) == planck(tm, 3e16));
  CHECK(p.source(z) == 10.0 * planck(tm, 3e16));
  CHECK_THROWS_AS(shell_time_problem(0.0), ConfigError);
}

TEST_CASE("diffusion oracle limits") {
  const double ts = shell_source_temperature();
  const double tm = shell_medium_temperature();
  for (double k : {1.0, 10.0}) {
    for (double nu : {1e15, 1e16, 1e17, 5e17}) {
      const double bs = 4.0 * kPi * planck(ts, nu);
      const double bm = 4.0 * kPi * planck(tm, nu);
      for (double t : {1e-3, 0.3, 1.0}) {
        CHECK(std::abs(diffusion_oracle(t, 2.0, nu, k, ts, tm, 2.0) - bs) <= 1e-10 * bs);
        CHECK(std::abs(diffusion_oracle(t, 2.0, nu, k, ts, tm, 2.0, 1.0, DiffusionFormula::printed) - bs) <=
              1e-10 * bs);
        CHECK(std::abs(diffusion_oracle(t, 1e4, nu, k, ts, tm, 2.0) - bm) <= 1e-10 * bm);
      }
      CHECK(std::abs(diffusion_oracle(1e-14, 2.5, nu, k, ts, tm, 2.0) - bm) <= 1e-10 * bm);
      CHECK(diffusion_oracle(0.0, 2.5, nu, k, ts, tm, 2.0) == bm);
    }
  }
  CHECK_THROWS_AS(diffusion_oracle(1.0, 1.0, 1e16, 1.0, ts, tm, 2.0), DomainError);
  CHECK(erfcx(30.0) == doctest::Approx(0.018795888861416751).epsilon(1e-10));
  CHECK(erfcx(24.0) == doctest::Approx(0.0234875460636826).epsilon(1e-10));
}

TEST_CASE("consistent diffusion profile solves the radial diffusion equation") {
  // w = (R/r) (b_s - b_m) F solves (1/c) w_t = (1/(3k)) (1/r) (r w)_rr - k w.
  const double c = 1.0;
  for (double k : {1.0, 10.0}) {
    for (double t : {0.2, 1.0}) {
      for (double d : {0.1, 0.5, 1.0}) {
        const double r = 2.0 + d;
        const auto v = [&](double tt, double rr) { return 2.0 / rr * diffusion_profile(tt, rr - 2.0, k, c); };
        const double h = 1e-4;
        const double wt = (v(t + h, r) - v(t - h, r)) / (2 * h);
        const auto rv = [&](double rr) { return rr * v(t, rr); };
        const double rw_rr = (rv(r + h) - 2 * rv(r) + rv(r - h)) / (h * h);
        const double lhs = wt / c;
        const double rhs = rw_rr / (3.0 * k * r) - k * v(t, r);
        const double scale = std::max({std::abs(lhs), std::abs(k * v(t, r)), 1e-12});
        CHECK(std::abs(lhs - rhs) / scale < 1e-4);
      }
    }
  }
  // The printed variant differs away from the sphere.
  CHECK(std::abs(diffusion_profile(1.0, 0.5, 1.0, 1.0) - diffusion_profile(1.0, 0.5, 1.0, 1.0, DiffusionFormula::printed)) >
        1e-3);
}

TEST_CASE("inverse fixture") {
  const auto fx = inverse_problem_fixture();
  const Vec3 c{0.5, 0.5, 0.5};
  CHECK(fx.true_absorption(c, 0.0) == 0.015625);
  const auto w = Direction::cartesian({1.0, 1.0, 1.0});
  CHECK(fx.true_intensity(point(c, w)) == doctest::Approx(-3.0 / (512.0 * kPi)).epsilon(1e-14));
  CHECK(fx.measured_incident(c) == -1.0 / 64.0);
  CHECK(fx.problem.scattering(c, 0.0) == 0.5);
  // Gradient against central differences.
  const auto z = point({0.3, 0.7, 0.45}, Direction::angles(0.2, 1.3));
  const auto g = fx.true_intensity_gradient(z);
  for (int a = 0; a < 3; ++a) {
    auto zp = z;
    auto zm = z;
    zp.x[a] += 1e-6;
    zm.x[a] -= 1e-6;
    CHECK(std::abs((fx.true_intensity(zp) - fx.true_intensity(zm)) / 2e-6 - g[a]) < 1e-9);
  }
}

TEST_CASE("problems by name") {
  for (const auto& n : problem_names()) CHECK(make_problem(n).name == n);
  CHECK_THROWS_AS(make_problem("nope"), ConfigError);
}

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rtpinn/bounds.hpp"
#include "rtpinn/errors.hpp"

using namespace rtpinn;

namespace {
constexpr double kPi = std::numbers::pi;

BoundInputs zero_inputs() {
  BoundInputs in;
  in.v_tb = in.v_sb = in.v_int = in.c_bar = 0.0;
  in.s_d = 4 * kPi;
  in.horizon = 1.0;
  in.light_speed = 1.0;
  return in;
}

}  // namespace

TEST_CASE("time-dependent bound constants") {
  CHECK(c_hat(1.0, 4 * kPi, 4 * kPi) == doctest::Approx(4.1592).epsilon(1e-4 / 4.1592));
  CHECK(std::abs(c_hat(1.0, 4 * kPi, 4 * kPi) - 4.1592) < 1e-4);

  auto in = zero_inputs();
  CHECK(time_dependent_bound(in).total == 0.0);

  // Probe one term at a time.
  in.horizon = 0.5;
  in.light_speed = 2.0;
  in.sigma_sup = 1.0;
  in.psi_sup = 4 * kPi;
  const auto base = time_dependent_bound(in);
  const double C = 0.5 + 2.0 * base.c_hat * 0.25 * std::exp(2.0 * base.c_hat * 0.5);
  CHECK(base.constant == doctest::Approx(C).epsilon(1e-15));

  auto p = in;
  p.e_tb = 0.3;
  CHECK(time_dependent_bound(p).total == doctest::Approx(C * 0.09).epsilon(1e-14));
  p = in;
  p.e_sb = 0.3;
  CHECK(time_dependent_bound(p).total == doctest::Approx(C * 2.0 * 0.09).epsilon(1e-14));
  p = in;
  p.e_int = 0.3;
  CHECK(time_dependent_bound(p).total == doctest::Approx(C * 2.0 * 0.09).epsilon(1e-14));

  // Quadrature terms with C* = 1 from a single variation constant; the
  // angular term c N_S^{-2s} equals c at N_S = 1.
  p = in;
  p.v_tb = 1.0;
  p.n_tb = 1000;
  CHECK(time_dependent_bound(p).quadrature_part == doctest::Approx(C * (std::pow(std::log(1000.0), 6) / 1000.0 + 2.0)).epsilon(1e-14));
  p.n_tb = 1;
  p.n_sb = 500;
  CHECK(time_dependent_bound(p).quadrature_part == doctest::Approx(C * 2.0 * (std::pow(std::log(500.0), 6) / 500.0 + 1.0)).epsilon(1e-14));
  p.n_sb = 1;
  p.n_int = 700;
  CHECK(time_dependent_bound(p).quadrature_part == doctest::Approx(C * 2.0 * (std::pow(std::log(700.0), 7) / 700.0 + 1.0)).epsilon(1e-14));
  p.n_int = 1;
  p.n_s = 10;
  p.s = 2;
  CHECK(time_dependent_bound(p).quadrature_part == doctest::Approx(C * 2.0 * 1e-4).epsilon(1e-14));
  // C* is the largest of the supplied constants.
  p.c_bar = 7.0;
  CHECK(time_dependent_bound(p).c_star == 7.0);
  CHECK(time_dependent_bound(p).total == doctest::Approx(time_dependent_bound(p).training_part + time_dependent_bound(p).quadrature_part));

  // Doubling N_int beyond the log regime shrinks the quadrature part.
  p = in;
  p.v_int = 1.0;
  p.n_int = 4096;
  const double q1 = time_dependent_bound(p).quadrature_part;
  p.n_int = 8192;
  CHECK(time_dependent_bound(p).quadrature_part < q1);

  auto missing = in;
  missing.horizon.reset();
  CHECK_THROWS_AS(time_dependent_bound(missing), ConfigError);
  auto negative = in;
  negative.e_int = -1.0;
  CHECK_THROWS_AS(time_dependent_bound(negative), ConfigError);
}

TEST_CASE("steady bound and its coercivity assumption") {
  BoundInputs in = zero_inputs();
  in.k_min = 0.0;
  in.sigma_min = 0.5;
  in.sigma_max = 0.5;
  in.psi_sup = 4 * kPi;
  const auto check = check_assumption(in);
  CHECK(check.kappa == doctest::Approx(0.5 - (0.5 + 4 * kPi) / (4 * kPi)));
  CHECK_FALSE(check.holds);
  const auto na = steady_bound(in);
  CHECK_FALSE(na.applicable);
  CHECK(na.message.find("violated") != std::string::npos);

  in.k_min = 2.0;
  in.psi_sup = 0.0;
  in.sigma_max = 0.5;
  const double kappa = 2.0 + 0.5 - 0.5 / (4 * kPi);
  auto b = steady_bound(in);
  REQUIRE(b.applicable);
  CHECK(b.kappa == doctest::Approx(kappa));
  // With zero errors and variations the constant is 2 / kappa and only the
  // sampling and angular terms remain.
  CHECK(b.constant == doctest::Approx(2.0 / kappa));
  CHECK(b.training_part == 0.0);
  CHECK(b.total == doctest::Approx(2.0 / kappa * 1.0).epsilon(1e-14));  // N_S^{-2s} = 1 at N_S = 1

  auto p = in;
  p.e_sb = 0.2;
  CHECK(steady_bound(p).training_part == doctest::Approx(2.0 / kappa * 0.04));
  p = in;
  p.e_int = 0.2;
  CHECK(steady_bound(p).training_part == doctest::Approx(2.0 / kappa * 0.04));
  p = in;
  p.n_sb = 300;
  p.n_s = 1000;
  CHECK(steady_bound(p).quadrature_part ==
        doctest::Approx(2.0 / kappa * (std::pow(std::log(300.0), 5) / 300.0 + 1e-6)).epsilon(1e-12));
  p.n_sb = 1;
  p.n_int = 300;
  CHECK(steady_bound(p).quadrature_part ==
        doctest::Approx(2.0 / kappa * (std::pow(std::log(300.0), 6) / 300.0 + 1e-6)).epsilon(1e-12));
  // Variation constants enter through the max.
  p = in;
  p.v_int = 10.0;
  CHECK(steady_bound(p).constant == doctest::Approx(2.0 * (2.0 / kappa) / kappa * 10.0));
  p.c_epsilon = 0.5;
  CHECK(steady_bound(p).constant == doctest::Approx(std::max(2.0 / kappa, 2.0 * 0.5 / kappa * 10.0)));

  // Monotone in each training error.
  double last = 0.0;
  for (double e : {0.0, 0.1, 0.2, 0.4}) {
    p = in;
    p.e_int = e;
    p.e_sb = e / 2;
    const double v = steady_bound(p).total;
    CHECK(v >= last);
    last = v;
  }
  p = in;
  p.kappa = 10.0;
  CHECK_THROWS_AS(steady_bound(p), ConfigError);
  p = in;
  p.sigma_min.reset();
  CHECK_THROWS_AS(steady_bound(p), ConfigError);
}

TEST_CASE("kernel sup and symmetry") {
  CHECK(psi_sup(ScatteringKernel::isotropic(), sphere_rule(3, 10, 10)) == doctest::Approx(4 * kPi).epsilon(1e-12));
  CHECK(psi_sup(slab_problem().kernel, sphere_rule(1, 10, 0)) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(kernel_asymmetry(slab_problem().kernel, 1) < 1e-14);
  CHECK(kernel_asymmetry(ScatteringKernel::isotropic(), 3) == 0.0);
  const auto skew = ScatteringKernel::custom(
      [](const Direction& w, const Direction&, double, double) { return 1.0 + w.mu; }, "skew");
  CHECK(kernel_asymmetry(skew, 3) > 0.1);
}

TEST_CASE("empirical generalization error") {
  const auto fx = inverse_problem_fixture();
  const auto rule = sphere_rule(3, 6, 6);
  const auto same = empirical_generalization_error(fx.true_intensity, fx.true_intensity, fx.problem.domain, rule, 6);
  CHECK(same.absolute == 0.0);
  CHECK(same.reference > 0.0);
  const double delta = 0.01;
  const auto shifted = [&](const PhasePoint& z) { return fx.true_intensity(z) + delta; };
  const auto off = empirical_generalization_error(shifted, fx.true_intensity, fx.problem.domain, rule, 6);
  CHECK(std::abs(off.absolute - delta * std::sqrt(4 * kPi)) < 1e-8);
  // Reference norm against the closed form: int (1 + c^2)^2 dw = 4 pi (1 + 2/3 + 1/5) and
  // int_0^1 (x (x - 1))^2 dx = 1/30.
  const double a = 3.0 / (16.0 * kPi);
  const double exact = a * std::sqrt(4 * kPi * (1.0 + 2.0 / 3.0 + 0.2)) * std::pow(1.0 / 30.0, 1.5);
  CHECK(same.reference == doctest::Approx(exact).epsilon(1e-10));
}

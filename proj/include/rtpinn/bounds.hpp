#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "rtpinn/problems.hpp"
#include "rtpinn/quadrature.hpp"

namespace rtpinn {

// Inputs of the a-posteriori generalization bounds. The Hardy-Krause
// variations of the squared residuals and the quadrature constant C-bar are
// not computable here; they are user-supplied and default to 1, so the result
// is only rigorous when they are.
struct BoundInputs {
  double e_tb = 0.0;
  double e_sb = 0.0;
  double e_int = 0.0;
  std::size_t n_tb = 1;
  std::size_t n_sb = 1;
  std::size_t n_int = 1;
  std::size_t n_s = 1;
  int s = 1;  // quadrature order
  int d = 3;  // spatial dimension
  double sigma_sup = 0.0;
  double psi_sup = 0.0;
  double s_d = 0.0;
  double v_tb = 1.0;
  double v_sb = 1.0;
  double v_int = 1.0;
  double c_bar = 1.0;
  // Time-dependent bound only.
  std::optional<double> horizon;  // T
  std::optional<double> light_speed;
  // Steady bound only.
  std::optional<double> k_min;
  std::optional<double> sigma_min;
  std::optional<double> sigma_max;
  std::optional<double> kappa;      // defaults to the largest admissible value
  std::optional<double> c_epsilon;  // defaults to 2 / kappa (epsilon = kappa / 8)
};

struct BoundValue {
  bool applicable = true;
  std::string message;
  double total = 0.0;  // bound on the squared generalization error
  double training_part = 0.0;
  double quadrature_part = 0.0;
  double constant = 0.0;       // C
  double c_hat = 0.0;          // time-dependent only
  double c_star = 0.0;         // time-dependent only
  double kappa = 0.0;          // steady only
};

// 2 + 2 (||sigma|| + ||Psi||) / s_d
double c_hat(double sigma_sup, double psi_sup, double s_d);

// Time-dependent bound: C (E_tb^2 + c E_sb^2 + c E_int^2) + C C* (Sobol and
// angular quadrature terms) with C = T + c C-hat T^2 exp(c C-hat T) and C* the
// largest of the variations and C-bar.
BoundValue time_dependent_bound(const BoundInputs& in);

struct AssumptionCheck {
  double kappa = 0.0;  // k_min + sigma_min - (sigma_max + ||Psi||) / s_d
  bool holds = false;  // kappa > 0
};
AssumptionCheck check_assumption(const BoundInputs& in);

// Steady bound C (E_sb^2 + E_int^2 + Sobol terms + N_S^{-2s}). When the
// coercivity assumption fails the result is marked not applicable.
BoundValue steady_bound(const BoundInputs& in);

// sup over sampled (omega, nu) of Psi = sum_i w_i Phi(omega, omega_i, nu, nu_i).
// `band` is sampled when the rule carries frequency nodes.
double psi_sup(const ScatteringKernel& kernel, const SphereRule& rule, Interval band = {}, std::size_t samples = 2000);

// Largest |Phi(w, w', nu, nu') - Phi(w', w, nu', nu)| over random pairs.
double kernel_asymmetry(const ScatteringKernel& kernel, int dim, Interval band = {}, std::size_t pairs = 1000,
                        std::uint64_t seed = 0);

struct GeneralizationError {
  double absolute = 0.0;  // ||u - u*||_L2 over D x S (x Lambda)
  double reference = 0.0; // ||u*||_L2
  double relative() const { return reference > 0.0 ? absolute / reference : absolute; }
};

// L2 distance over a Gauss tensor grid in space (n_x nodes per axis), the
// angular rule, and n_nu Gauss nodes in frequency for polychromatic domains.
// Time is fixed at t.
GeneralizationError empirical_generalization_error(const PhaseFn& approx, const PhaseFn& oracle,
                                                   const DomainDescriptor& domain, const SphereRule& rule,
                                                   int n_x = 12, int n_nu = 8, double t = 0.0);

}  // namespace rtpinn

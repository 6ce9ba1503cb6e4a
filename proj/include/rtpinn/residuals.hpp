#pragma once

#include <functional>
#include <string>

#include "rtpinn/network.hpp"
#include "rtpinn/problems.hpp"
#include "rtpinn/training_sets.hpp"

namespace rtpinn {

struct LossConfig {
  double lambda = 1.0;       // weight of the interior residual
  double lambda_reg = 0.0;   // weight of ||theta_W||_q^q
  int q = 2;                 // 1 or 2
  double lambda_k = 0.0;     // Tikhonov weight on |grad_x k_theta|^2 (inverse mode)
  double k_boundary_weight = 1.0;  // match of k_theta to k on the spatial boundary (inverse mode)

  void validate() const;
};

// Raw sums are unweighted: interior = sum w R_int^2 etc. The total applies the
// weights of LossConfig:
//   J = sb + tb + lambda * interior + data + k_boundary_weight * k_boundary
//       + lambda_k * tikhonov + lambda_reg * reg
struct LossReport {
  double total = 0.0;
  double interior = 0.0;
  double spatial_boundary = 0.0;
  double temporal_boundary = 0.0;
  double data = 0.0;
  double k_boundary = 0.0;
  double tikhonov = 0.0;
  double reg = 0.0;

  double e_int() const;
  double e_sb() const;
  double e_tb() const;
  double e_d() const;
  // Root-sum-square of the interior, spatial and temporal training errors.
  double e_total() const;
};

LossReport combine(LossReport raw, const LossConfig& config);

// Something that can be evaluated, together with its transport derivative
// (1/c) du/dt + omega . grad_x u, at a phase-space point.
class IntensityField {
 public:
  virtual ~IntensityField() = default;
  virtual double value(const PhasePoint& z) const = 0;
  virtual double transport(const PhasePoint& z, double light_speed) const = 0;
};

class NetworkField final : public IntensityField {
 public:
  // Values are scale * net(y), so a network trained on a problem with
  // intensity_scale s is read back with scale s.
  NetworkField(const MlpNetwork& net, const DomainDescriptor& domain, double scale = 1.0);
  double value(const PhasePoint& z) const override;
  double transport(const PhasePoint& z, double light_speed) const override;

 private:
  const MlpNetwork& net_;
  const DomainDescriptor& domain_;
  double scale_;
};

class FunctionField final : public IntensityField {
 public:
  using TransportFn = std::function<double(const PhasePoint&, double light_speed)>;
  FunctionField(PhaseFn u, TransportFn transport) : u_(std::move(u)), transport_(std::move(transport)) {}
  double value(const PhasePoint& z) const override { return u_(z); }
  double transport(const PhasePoint& z, double light_speed) const override { return transport_(z, light_speed); }

 private:
  PhaseFn u_;
  TransportFn transport_;
};

// Absorption network k_theta(x, nu) = softplus(net(rescaled x, nu)).
double softplus(double x);
double absorption_network_value(const MlpNetwork& net, const DomainDescriptor& domain, const Vec3& x, double nu);

// (1/c) u_t + omega . grad u + k u + sigma (u - (1/s_d) sum_i w_i Phi u_i) - f.
double interior_residual(const IntensityField& u, const RteProblem& problem, const SphereRule& rule,
                         const PhasePoint& z);
// As interior_residual with k replaced by `absorption`.
double inverse_interior_residual(const IntensityField& u, const CoefficientFn& absorption, const RteProblem& problem,
                                 const SphereRule& rule, const PhasePoint& z);
// u - u_b at a point of the spatial boundary with outward normal `normal`.
double spatial_boundary_residual(const IntensityField& u, const RteProblem& problem, const PhasePoint& z,
                                 const Vec3& normal);
// u - u_0 at t = 0.
double temporal_boundary_residual(const IntensityField& u, const RteProblem& problem, const PhasePoint& z);
// G(u) - G-bar with G computed by the angular rule at (t, x, nu).
double data_residual(const IntensityField& u, const SphereRule& rule, double measured, const DataPoint& y);

double incident_radiation(const IntensityField& u, const SphereRule& rule, double t, const Vec3& x, double nu);
Vec3 heat_flux(const IntensityField& u, const SphereRule& rule, double t, const Vec3& x, double nu);

}  // namespace rtpinn

#include "rtpinn/residuals.hpp"

#include <cmath>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

bool on_spatial_boundary(const RteProblem& problem, const Vec3& x) {
  if (problem.shell) {
    const auto& s = *problem.shell;
    const Vec3 d{x[0] - s.center[0], x[1] - s.center[1], x[2] - s.center[2]};
    const double r = norm(d);
    return std::abs(r - s.inner_radius) <= 1e-9 * s.inner_radius ||
           std::abs(r - s.outer_radius) <= 1e-9 * s.outer_radius;
  }
  const auto& box = problem.domain.box();
  for (std::size_t a = 0; a < box.size(); ++a) {
    const double tol = 1e-12 * box[a].length();
    if (std::abs(x[a] - box[a].lo) <= tol || std::abs(x[a] - box[a].hi) <= tol) return true;
  }
  return false;
}

PhasePoint with_direction(const PhasePoint& z, const Direction& w, double nu) {
  PhasePoint p = z;
  p.omega = w;
  p.nu = nu;
  return p;
}

}  // namespace

void LossConfig::validate() const {
  for (double v : {lambda, lambda_reg, lambda_k, k_boundary_weight}) {
    if (!std::isfinite(v) || v < 0.0) throw ConfigError("loss weights must be finite and >= 0");
  }
  if (q != 1 && q != 2) throw ConfigError("regularization exponent q must be 1 or 2");
}

double LossReport::e_int() const { return std::sqrt(interior); }
double LossReport::e_sb() const { return std::sqrt(spatial_boundary); }
double LossReport::e_tb() const { return std::sqrt(temporal_boundary); }
double LossReport::e_d() const { return std::sqrt(data); }
double LossReport::e_total() const { return std::sqrt(interior + spatial_boundary + temporal_boundary); }

LossReport combine(LossReport r, const LossConfig& c) {
  r.total = r.spatial_boundary + r.temporal_boundary + c.lambda * r.interior + r.data +
            c.k_boundary_weight * r.k_boundary + c.lambda_k * r.tikhonov + c.lambda_reg * r.reg;
  return r;
}

NetworkField::NetworkField(const MlpNetwork& net, const DomainDescriptor& domain, double scale)
    : net_(net), domain_(domain), scale_(scale) {
  if (net.input_dim() != domain.input_dim()) throw ContractError("network input size does not match the domain");
}

double NetworkField::value(const PhasePoint& z) const { return scale_ * net_.forward(domain_.to_unit(z)); }

double NetworkField::transport(const PhasePoint& z, double light_speed) const {
  const auto y = domain_.to_unit(z);
  std::vector<double> a(y.size());
  domain_.transport_tangent(z, light_speed, a.data());
  const auto rec = eval_with_gradients(net_, y, false);
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * rec.input_gradient[i];
  return scale_ * d;
}

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double absorption_network_value(const MlpNetwork& net, const DomainDescriptor& domain, const Vec3& x, double nu) {
  std::vector<double> y(domain.absorption_input_dim());
  domain.absorption_input(x, nu, y.data());
  return softplus(net.forward(y));
}

double inverse_interior_residual(const IntensityField& u, const CoefficientFn& absorption, const RteProblem& problem,
                                 const SphereRule& rule, const PhasePoint& z) {
  const double uz = u.value(z);
  double r = u.transport(z, problem.light_speed) + absorption(z.x, z.nu) * uz - problem.source(z);
  const double sigma = problem.scattering(z.x, z.nu);
  if (sigma != 0.0) {
    std::vector<double> vals(rule.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
      vals[i] = u.value(with_direction(z, rule.directions[i], rule.frequency(i, z.nu)));
    }
    r += sigma * (uz - scattering_sum(problem.kernel, vals, rule, z.omega, z.nu) / problem.surface_area());
  }
  return r;
}

double interior_residual(const IntensityField& u, const RteProblem& problem, const SphereRule& rule,
                         const PhasePoint& z) {
  return inverse_interior_residual(u, problem.absorption, problem, rule, z);
}

double spatial_boundary_residual(const IntensityField& u, const RteProblem& problem, const PhasePoint& z,
                                 const Vec3& normal) {
  if (!on_spatial_boundary(problem, z.x)) throw ContractError("point is not on the spatial boundary");
  return u.value(z) - problem.inflow(z, normal);
}

double temporal_boundary_residual(const IntensityField& u, const RteProblem& problem, const PhasePoint& z) {
  if (z.t != 0.0) throw ContractError("point is not on the initial time slice");
  return u.value(z) - problem.initial(z);
}

double incident_radiation(const IntensityField& u, const SphereRule& rule, double t, const Vec3& x, double nu) {
  PhasePoint z;
  z.t = t;
  z.x = x;
  z.nu = nu;
  return incident_radiation([&](const Direction& w) { return u.value(with_direction(z, w, nu)); }, rule);
}

Vec3 heat_flux(const IntensityField& u, const SphereRule& rule, double t, const Vec3& x, double nu) {
  PhasePoint z;
  z.t = t;
  z.x = x;
  z.nu = nu;
  return heat_flux([&](const Direction& w) { return u.value(with_direction(z, w, nu)); }, rule);
}

double data_residual(const IntensityField& u, const SphereRule& rule, double measured, const DataPoint& y) {
  return incident_radiation(u, rule, y.t, y.x, y.nu) - measured;
}

}  // namespace rtpinn

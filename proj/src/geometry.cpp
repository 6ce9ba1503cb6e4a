#include "rtpinn/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rtpinn/errors.hpp"

namespace rtpinn {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Direction Direction::slab(double mu) {
  Direction d;
  d.mu = mu;
  d.phi = 0.0;
  d.v = {mu, 0.0, 0.0};
  return d;
}

Direction Direction::angles(double mu, double phi) {
  Direction d;
  d.mu = mu;
  d.phi = phi;
  const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  d.v = {s * std::cos(phi), s * std::sin(phi), mu};
  return d;
}

Direction Direction::cartesian(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw ContractError("direction vector must be non-zero");
  Direction d;
  d.v = {v[0] / n, v[1] / n, v[2] / n};
  d.mu = d.v[2];
  double phi = std::atan2(d.v[1], d.v[0]);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  if (phi >= 2.0 * std::numbers::pi) phi = 0.0;
  d.phi = phi;
  return d;
}

DomainDescriptor::DomainDescriptor(int spatial_dim, std::vector<Interval> box, double time_horizon,
                                   Interval frequency, FrequencyScale scale)
    : dim_(spatial_dim), box_(std::move(box)), time_horizon_(time_horizon), frequency_(frequency), scale_(scale) {
  if (dim_ != 1 && dim_ != 3) throw ConfigError("spatial dimension must be 1 or 3");
  if (static_cast<int>(box_.size()) != dim_) throw ConfigError("spatial box needs one interval per axis");
  for (const auto& iv : box_) {
    if (!(iv.lo < iv.hi)) throw ConfigError("spatial box requires a_i < b_i");
  }
  if (!(time_horizon_ >= 0.0)) throw ConfigError("time horizon must be >= 0");
  if (!(frequency_.lo <= frequency_.hi)) throw ConfigError("frequency interval requires nu_lo <= nu_hi");
  if (scale_ == FrequencyScale::logarithmic && !monochromatic() && !(frequency_.lo > 0.0)) {
    throw ConfigError("logarithmic frequency scaling needs nu_lo > 0");
  }
  int slot = 0;
  if (!steady()) time_slot_ = slot++;
  space_slot_ = slot;
  slot += dim_;
  mu_slot_ = slot++;
  if (dim_ == 3) phi_slot_ = slot++;
  if (!monochromatic()) nu_slot_ = slot++;
  input_dim_ = static_cast<std::size_t>(slot);
}

double DomainDescriptor::surface_area() const { return dim_ == 1 ? 2.0 : 4.0 * std::numbers::pi; }

double DomainDescriptor::phase_volume() const {
  double v = surface_area();
  for (const auto& iv : box_) v *= iv.length();
  if (!steady()) v *= time_horizon_;
  if (!monochromatic()) v *= frequency_.length();
  return v;
}

double DomainDescriptor::frequency_to_unit(double nu) const {
  if (monochromatic()) return 0.0;
  if (scale_ == FrequencyScale::logarithmic) {
    return std::log(nu / frequency_.lo) / std::log(frequency_.hi / frequency_.lo);
  }
  return (nu - frequency_.lo) / frequency_.length();
}

double DomainDescriptor::frequency_from_unit(double s) const {
  if (monochromatic()) return frequency_.lo;
  if (scale_ == FrequencyScale::logarithmic) {
    return frequency_.lo * std::exp(s * std::log(frequency_.hi / frequency_.lo));
  }
  return frequency_.lo + s * frequency_.length();
}

void DomainDescriptor::to_unit(const PhasePoint& p, double* y) const {
  if (time_slot_ >= 0) y[time_slot_] = p.t / time_horizon_;
  for (int i = 0; i < dim_; ++i) y[space_slot_ + i] = (p.x[i] - box_[i].lo) / box_[i].length();
  y[mu_slot_] = 0.5 * (p.omega.mu + 1.0);
  if (phi_slot_ >= 0) y[phi_slot_] = p.omega.phi / (2.0 * std::numbers::pi);
  if (nu_slot_ >= 0) y[nu_slot_] = frequency_to_unit(p.nu);
}

std::vector<double> DomainDescriptor::to_unit(const PhasePoint& p) const {
  std::vector<double> y(input_dim_);
  to_unit(p, y.data());
  return y;
}

PhasePoint DomainDescriptor::from_unit(std::span<const double> y) const {
  if (y.size() != input_dim_) throw ContractError("unit point has wrong dimension");
  PhasePoint p;
  p.t = time_slot_ >= 0 ? y[time_slot_] * time_horizon_ : 0.0;
  for (int i = 0; i < dim_; ++i) p.x[i] = box_[i].lo + y[space_slot_ + i] * box_[i].length();
  const double mu = 2.0 * y[mu_slot_] - 1.0;
  p.omega = dim_ == 1 ? Direction::slab(mu) : Direction::angles(mu, 2.0 * std::numbers::pi * y[phi_slot_]);
  p.nu = nu_slot_ >= 0 ? frequency_from_unit(y[nu_slot_]) : frequency_.lo;
  return p;
}

void DomainDescriptor::absorption_input(const Vec3& x, double nu, double* y) const {
  for (int i = 0; i < dim_; ++i) y[i] = (x[i] - box_[i].lo) / box_[i].length();
  if (!monochromatic()) y[dim_] = frequency_to_unit(nu);
}

void DomainDescriptor::transport_tangent(const PhasePoint& p, double light_speed, double* a) const {
  for (std::size_t i = 0; i < input_dim_; ++i) a[i] = 0.0;
  if (time_slot_ >= 0) a[time_slot_] = 1.0 / (light_speed * time_horizon_);
  for (int i = 0; i < dim_; ++i) a[space_slot_ + i] = p.omega.v[i] / box_[i].length();
}

double ShellGeometry::volume() const {
  return 4.0 / 3.0 * std::numbers::pi *
         (outer_radius * outer_radius * outer_radius - inner_radius * inner_radius * inner_radius);
}

}  // namespace rtpinn

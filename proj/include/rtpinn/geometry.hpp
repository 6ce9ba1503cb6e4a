#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rtpinn {

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double norm(const Vec3& a);

// A propagation direction. In 1D only `mu` (and v[0] == mu) is meaningful.
struct Direction {
  double mu = 1.0;   // cosine of the polar angle (3D) or the slab direction cosine (1D)
  double phi = 0.0;  // azimuth in [0, 2pi), 3D only
  Vec3 v{1.0, 0.0, 0.0};

  static Direction slab(double mu);
  static Direction angles(double mu, double phi);
  static Direction cartesian(const Vec3& v);
};

// A point (t, x, omega, nu) of phase space in physical coordinates.
struct PhasePoint {
  double t = 0.0;
  Vec3 x{};
  Direction omega;
  double nu = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

enum class FrequencyScale { affine, logarithmic };

// Physical domain D_T x S x Lambda and its rescaling to the unit hypercube that
// feeds the network. Network inputs are laid out as
//   [t] [x_1 .. x_d] [mu] [phi (3D)] [nu (polychromatic)]
// with the time slot dropped for steady problems and the frequency slot dropped
// for monochromatic ones.
class DomainDescriptor {
 public:
  DomainDescriptor(int spatial_dim, std::vector<Interval> box, double time_horizon = 0.0,
                   Interval frequency = {}, FrequencyScale scale = FrequencyScale::affine);

  int spatial_dim() const { return dim_; }
  bool steady() const { return time_horizon_ == 0.0; }
  bool monochromatic() const { return frequency_.lo == frequency_.hi; }
  double time_horizon() const { return time_horizon_; }
  const std::vector<Interval>& box() const { return box_; }
  const Interval& frequency() const { return frequency_; }
  FrequencyScale frequency_scale() const { return scale_; }

  // s_d: 2 for the slab convention mu in [-1,1], 4 pi for the unit sphere.
  double surface_area() const;
  // |D| |S| |Lambda| |[0,T]|, with degenerate factors counted as 1.
  double phase_volume() const;

  std::size_t input_dim() const { return input_dim_; }
  std::size_t absorption_input_dim() const { return static_cast<std::size_t>(dim_) + (monochromatic() ? 0 : 1); }

  int time_slot() const { return time_slot_; }
  int space_slot() const { return space_slot_; }
  int mu_slot() const { return mu_slot_; }
  int phi_slot() const { return phi_slot_; }
  int frequency_slot() const { return nu_slot_; }

  void to_unit(const PhasePoint& p, double* y) const;
  std::vector<double> to_unit(const PhasePoint& p) const;
  PhasePoint from_unit(std::span<const double> y) const;

  // Input of the absorption network: [x_1 .. x_d] [nu].
  void absorption_input(const Vec3& x, double nu, double* y) const;

  double frequency_to_unit(double nu) const;
  double frequency_from_unit(double s) const;

  // Input-space direction a such that the directional derivative of the
  // network along a equals (1/c) du/dt + omega . grad_x u in physical units.
  void transport_tangent(const PhasePoint& p, double light_speed, double* a) const;

  // d(unit coordinate)/d(physical coordinate) along a spatial axis.
  double spatial_scale(int axis) const { return 1.0 / box_[axis].length(); }

 private:
  int dim_;
  std::vector<Interval> box_;
  double time_horizon_;
  Interval frequency_;
  FrequencyScale scale_;
  std::size_t input_dim_ = 0;
  int time_slot_ = -1;
  int space_slot_ = 0;
  int mu_slot_ = 0;
  int phi_slot_ = -1;
  int nu_slot_ = -1;
};

// Spherical shell R_i <= |x - center| <= R_e.
struct ShellGeometry {
  Vec3 center{};
  double inner_radius = 0.0;
  double outer_radius = 0.0;

  double volume() const;
};

}  // namespace rtpinn

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rtpinn/geometry.hpp"

namespace rtpinn {

enum class Sampler { sobol, uniform_random };

Sampler parse_sampler(const std::string& name);
std::string to_string(Sampler s);

struct CollocationPoint {
  PhasePoint z;
  double weight = 0.0;
  Vec3 normal{};  // outward normal of the flow domain; spatial-boundary points only
};

// Measurement location (t, x, nu) of the incident radiation.
struct DataPoint {
  double t = 0.0;
  Vec3 x{};
  double nu = 0.0;
  double weight = 0.0;
};

struct TrainingSets {
  std::vector<CollocationPoint> interior;
  std::vector<CollocationPoint> spatial_boundary;
  std::vector<CollocationPoint> temporal_boundary;
  std::vector<DataPoint> data;

  std::size_t n_int() const { return interior.size(); }
  std::size_t n_sb() const { return spatial_boundary.size(); }
  std::size_t n_tb() const { return temporal_boundary.size(); }
  std::size_t n_d() const { return data.size(); }
};

struct SampleCounts {
  std::size_t n_int = 0;
  std::size_t n_sb = 0;
  std::size_t n_tb = 0;
  std::size_t n_d = 0;
};

// n points of [0,1)^dim, row-major. Sobol points ignore the seed; random points
// come from a counter-based stream keyed by (seed, stream).
std::vector<double> unit_points(Sampler sampler, std::size_t dim, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream);

// Training sets on the rectangular box of `domain`. Spatial-boundary points are
// shared equally among the 2d faces (the first faces take the remainder) and
// their directions are drawn from the inflow hemisphere of each face.
TrainingSets build_training_sets(const DomainDescriptor& domain, const SampleCounts& counts, Sampler sampler,
                                 std::uint64_t seed);

// Training sets for the shell between two concentric spheres. Interior radii
// follow the volume-uniform inverse CDF; boundary points are split equally
// between the inner sphere (first) and the outer sphere.
TrainingSets annulus_sampler(const DomainDescriptor& domain, const ShellGeometry& shell, const SampleCounts& counts,
                             Sampler sampler, std::uint64_t seed);

// Measurement points filling D x [0,T] x Lambda (box domains).
std::vector<DataPoint> build_data_points(const DomainDescriptor& domain, std::size_t n, Sampler sampler,
                                         std::uint64_t seed);

// Direction with omega . inward > 0 built from two unit coordinates: the cosine
// to `inward` is 1 - a in (0,1], the azimuth around it is 2 pi b.
Direction hemisphere_direction(const Vec3& inward, double a, double b);

}  // namespace rtpinn

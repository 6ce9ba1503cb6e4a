#include "rtpinn/training_sets.hpp"

#include <cmath>
#include <numbers>

#include "rtpinn/errors.hpp"
#include "rtpinn/random.hpp"
#include "rtpinn/sobol.hpp"

namespace rtpinn {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Stream identifiers for the random sampler.
constexpr std::uint64_t kInteriorStream = 1;
constexpr std::uint64_t kTemporalStream = 2;
constexpr std::uint64_t kDataStream = 3;
constexpr std::uint64_t kBoundaryStream = 16;  // + face / sphere index

double wrap_angle(double phi) {
  phi = std::fmod(phi, kTwoPi);
  if (phi < 0.0) phi += kTwoPi;
  return phi;
}

Vec3 sphere_point(double a, double b) {
  const double mu = 1.0 - 2.0 * a;
  const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  const double phi = kTwoPi * b;
  return {s * std::cos(phi), s * std::sin(phi), mu};
}

// Direction in the inflow half of a box face: `axis` is the face normal axis and
// `inward` is +1 on the lower face, -1 on the upper face.
Direction face_direction(const DomainDescriptor& domain, int axis, double inward, double u_mu, double u_phi) {
  if (domain.spatial_dim() == 1) return Direction::slab(inward * (1.0 - u_mu));
  if (axis == 2) return Direction::angles(inward * (1.0 - u_mu), kTwoPi * u_phi);
  const double mu = 2.0 * u_mu - 1.0;
  double start = 0.0;
  if (axis == 0) {
    start = inward > 0.0 ? -0.5 * std::numbers::pi : 0.5 * std::numbers::pi;
  } else {
    start = inward > 0.0 ? 0.0 : std::numbers::pi;
  }
  return Direction::angles(mu, wrap_angle(start + std::numbers::pi * u_phi));
}

void require_counts(const DomainDescriptor& domain, const SampleCounts& counts) {
  if (domain.steady() && counts.n_tb > 0) {
    throw ConfigError("temporal-boundary points requested for a steady problem");
  }
}

std::vector<CollocationPoint> temporal_points(const DomainDescriptor& domain, std::size_t n, Sampler sampler,
                                              std::uint64_t seed) {
  std::vector<CollocationPoint> out;
  if (n == 0) return out;
  const std::size_t dim = domain.input_dim();
  const auto u = unit_points(sampler, dim - 1, n, seed, kTemporalStream);
  std::vector<double> y(dim);
  const double w = 1.0 / static_cast<double>(n);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[0] = 0.0;
    for (std::size_t j = 1; j < dim; ++j) y[j] = u[i * (dim - 1) + j - 1];
    CollocationPoint c;
    c.z = domain.from_unit(y);
    c.z.t = 0.0;
    c.weight = w;
    out.push_back(c);
  }
  return out;
}

}  // namespace

Sampler parse_sampler(const std::string& name) {
  if (name == "sobol") return Sampler::sobol;
  if (name == "uniform_random" || name == "random") return Sampler::uniform_random;
  throw ConfigError("unknown sampler '" + name + "' (expected sobol or uniform_random)");
}

std::string to_string(Sampler s) { return s == Sampler::sobol ? "sobol" : "uniform_random"; }

std::vector<double> unit_points(Sampler sampler, std::size_t dim, std::size_t n, std::uint64_t seed,
                                std::uint64_t stream) {
  if (n == 0) return {};
  if (sampler == Sampler::sobol) return sobol_sequence(dim, n, 1);
  CounterRng rng(seed, stream);
  std::vector<double> out(n * dim);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.uniform(i);
  return out;
}

Direction hemisphere_direction(const Vec3& inward, double a, double b) {
  const double n = norm(inward);
  const Vec3 m{inward[0] / n, inward[1] / n, inward[2] / n};
  // Orthonormal frame around m.
  const Vec3 helper = std::abs(m[0]) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  Vec3 e1{m[1] * helper[2] - m[2] * helper[1], m[2] * helper[0] - m[0] * helper[2],
          m[0] * helper[1] - m[1] * helper[0]};
  const double n1 = norm(e1);
  for (auto& v : e1) v /= n1;
  const Vec3 e2{m[1] * e1[2] - m[2] * e1[1], m[2] * e1[0] - m[0] * e1[2], m[0] * e1[1] - m[1] * e1[0]};
  const double ca = 1.0 - a;
  const double sa = std::sqrt(std::max(0.0, 1.0 - ca * ca));
  const double beta = kTwoPi * b;
  Vec3 w;
  for (int i = 0; i < 3; ++i) w[i] = ca * m[i] + sa * (std::cos(beta) * e1[i] + std::sin(beta) * e2[i]);
  return Direction::cartesian(w);
}

TrainingSets build_training_sets(const DomainDescriptor& domain, const SampleCounts& counts, Sampler sampler,
                                 std::uint64_t seed) {
  require_counts(domain, counts);
  TrainingSets sets;
  const std::size_t dim = domain.input_dim();
  const int d = domain.spatial_dim();

  if (counts.n_int > 0) {
    const auto u = unit_points(sampler, dim, counts.n_int, seed, kInteriorStream);
    const double w = 1.0 / static_cast<double>(counts.n_int);
    sets.interior.reserve(counts.n_int);
    for (std::size_t i = 0; i < counts.n_int; ++i) {
      CollocationPoint c;
      c.z = domain.from_unit(std::span<const double>(u.data() + i * dim, dim));
      c.weight = w;
      sets.interior.push_back(c);
    }
  }

  if (counts.n_sb > 0) {
    const std::size_t faces = 2 * static_cast<std::size_t>(d);
    const double w = 1.0 / static_cast<double>(counts.n_sb);
    std::vector<double> y(dim);
    sets.spatial_boundary.reserve(counts.n_sb);
    for (std::size_t f = 0; f < faces; ++f) {
      const std::size_t nf = counts.n_sb / faces + (f < counts.n_sb % faces ? 1 : 0);
      if (nf == 0) continue;
      const int axis = static_cast<int>(f / 2);
      const bool upper = (f % 2) == 1;
      const double inward = upper ? -1.0 : 1.0;
      const int fixed = domain.space_slot() + axis;
      const auto u = unit_points(sampler, dim - 1, nf, seed, kBoundaryStream + f);
      for (std::size_t i = 0; i < nf; ++i) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < dim; ++j) {
          y[j] = static_cast<int>(j) == fixed ? (upper ? 1.0 : 0.0) : u[i * (dim - 1) + k++];
        }
        CollocationPoint c;
        c.z = domain.from_unit(y);
        c.z.x[axis] = upper ? domain.box()[axis].hi : domain.box()[axis].lo;
        const double u_phi = domain.phi_slot() >= 0 ? y[domain.phi_slot()] : 0.0;
        c.z.omega = face_direction(domain, axis, inward, y[domain.mu_slot()], u_phi);
        c.normal = {0.0, 0.0, 0.0};
        c.normal[axis] = -inward;
        c.weight = w;
        sets.spatial_boundary.push_back(c);
      }
    }
  }

  sets.temporal_boundary = temporal_points(domain, counts.n_tb, sampler, seed);
  if (counts.n_d > 0) sets.data = build_data_points(domain, counts.n_d, sampler, seed);
  return sets;
}

TrainingSets annulus_sampler(const DomainDescriptor& domain, const ShellGeometry& shell, const SampleCounts& counts,
                             Sampler sampler, std::uint64_t seed) {
  if (!(shell.inner_radius > 0.0) || !(shell.inner_radius < shell.outer_radius)) {
    throw ConfigError("shell radii require 0 < R_i < R_e");
  }
  if (domain.spatial_dim() != 3) throw ConfigError("shell sampling needs a 3D domain");
  require_counts(domain, counts);
  TrainingSets sets;
  const std::size_t dim = domain.input_dim();
  const int xs = domain.space_slot();
  const double ri3 = std::pow(shell.inner_radius, 3);
  const double re3 = std::pow(shell.outer_radius, 3);

  if (counts.n_int > 0) {
    const auto u = unit_points(sampler, dim, counts.n_int, seed, kInteriorStream);
    const double w = 1.0 / static_cast<double>(counts.n_int);
    std::vector<double> y(dim);
    sets.interior.reserve(counts.n_int);
    for (std::size_t i = 0; i < counts.n_int; ++i) {
      for (std::size_t j = 0; j < dim; ++j) y[j] = u[i * dim + j];
      const double r = std::cbrt(ri3 + y[xs] * (re3 - ri3));
      const Vec3 dir = sphere_point(y[xs + 1], y[xs + 2]);
      // Placeholder spatial coordinates; overwritten below.
      y[xs] = y[xs + 1] = y[xs + 2] = 0.0;
      CollocationPoint c;
      c.z = domain.from_unit(y);
      for (int a = 0; a < 3; ++a) c.z.x[a] = shell.center[a] + r * dir[a];
      c.weight = w;
      sets.interior.push_back(c);
    }
  }

  if (counts.n_sb > 0) {
    // Free coordinates: [t] [two for the surface point] [two for the direction] [nu].
    const std::size_t free_dim = dim - 1;
    const double w = 1.0 / static_cast<double>(counts.n_sb);
    std::vector<double> y(dim);
    sets.spatial_boundary.reserve(counts.n_sb);
    for (std::size_t s = 0; s < 2; ++s) {
      const std::size_t ns = counts.n_sb / 2 + (s < counts.n_sb % 2 ? 1 : 0);
      if (ns == 0) continue;
      const bool inner = s == 0;
      const double radius = inner ? shell.inner_radius : shell.outer_radius;
      const auto u = unit_points(sampler, free_dim, ns, seed, kBoundaryStream + s);
      for (std::size_t i = 0; i < ns; ++i) {
        const double* q = u.data() + i * free_dim;
        std::size_t k = 0;
        const double ut = domain.steady() ? 0.0 : q[k++];
        const double a = q[k++];
        const double b = q[k++];
        const double da = q[k++];
        const double db = q[k++];
        const double un = domain.monochromatic() ? 0.0 : q[k++];
        const Vec3 dir = sphere_point(a, b);
        CollocationPoint c;
        c.z.t = ut * domain.time_horizon();
        for (int j = 0; j < 3; ++j) c.z.x[j] = shell.center[j] + radius * dir[j];
        c.z.nu = domain.frequency_from_unit(un);
        for (int j = 0; j < 3; ++j) c.normal[j] = inner ? -dir[j] : dir[j];
        c.z.omega = hemisphere_direction({-c.normal[0], -c.normal[1], -c.normal[2]}, da, db);
        c.weight = w;
        sets.spatial_boundary.push_back(c);
      }
    }
  }

  if (counts.n_tb > 0) {
    const std::size_t free_dim = dim - 1;
    const auto u = unit_points(sampler, free_dim, counts.n_tb, seed, kTemporalStream);
    const double w = 1.0 / static_cast<double>(counts.n_tb);
    std::vector<double> y(dim);
    sets.temporal_boundary.reserve(counts.n_tb);
    for (std::size_t i = 0; i < counts.n_tb; ++i) {
      y[0] = 0.0;
      for (std::size_t j = 1; j < dim; ++j) y[j] = u[i * free_dim + j - 1];
      const double r = std::cbrt(ri3 + y[xs] * (re3 - ri3));
      const Vec3 dir = sphere_point(y[xs + 1], y[xs + 2]);
      y[xs] = y[xs + 1] = y[xs + 2] = 0.0;
      CollocationPoint c;
      c.z = domain.from_unit(y);
      c.z.t = 0.0;
      for (int a = 0; a < 3; ++a) c.z.x[a] = shell.center[a] + r * dir[a];
      c.weight = w;
      sets.temporal_boundary.push_back(c);
    }
  }
  return sets;
}

std::vector<DataPoint> build_data_points(const DomainDescriptor& domain, std::size_t n, Sampler sampler,
                                         std::uint64_t seed) {
  std::vector<DataPoint> out;
  if (n == 0) return out;
  const int d = domain.spatial_dim();
  const std::size_t dim = static_cast<std::size_t>(d) + (domain.steady() ? 0 : 1) + (domain.monochromatic() ? 0 : 1);
  const auto u = unit_points(sampler, dim, n, seed, kDataStream);
  const double w = 1.0 / static_cast<double>(n);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* q = u.data() + i * dim;
    std::size_t k = 0;
    DataPoint p;
    if (!domain.steady()) p.t = q[k++] * domain.time_horizon();
    for (int a = 0; a < d; ++a) p.x[a] = domain.box()[a].lo + q[k++] * domain.box()[a].length();
    p.nu = domain.monochromatic() ? domain.frequency().lo : domain.frequency_from_unit(q[k++]);
    p.weight = w;
    out.push_back(p);
  }
  return out;
}

}  // namespace rtpinn

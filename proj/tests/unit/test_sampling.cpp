#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rtpinn/errors.hpp"
#include "rtpinn/sobol.hpp"
#include "rtpinn/training_sets.hpp"

using namespace rtpinn;

namespace {

// Reference rows (0-based index, origin included) from an independent
// Joe-Kuo Sobol implementation.
struct SobolRow {
  std::size_t index;
  double x[16];
};

const SobolRow kRows[] = {
    {5, {0.875, 0.875, 0.125, 0.375, 0.875, 0.625, 0.875, 0.375, 0.375, 0.125, 0.375, 0.875, 0.875, 0.125, 0.875,
         0.375}},
    {13, {0.8125, 0.6875, 0.8125, 0.0625, 0.4375, 0.9375, 0.5625, 0.5625, 0.5625, 0.4375, 0.8125, 0.9375, 0.0625,
          0.8125, 0.1875, 0.5625}},
    {100, {0.4140625, 0.2578125, 0.7734375, 0.7265625, 0.8828125, 0.7421875, 0.0234375, 0.4765625, 0.6328125,
           0.6953125, 0.4609375, 0.6796875, 0.4765625, 0.8515625, 0.3203125, 0.4921875}},
    {777, {0.6923828125, 0.9365234375, 0.1630859375, 0.2744140625, 0.6357421875, 0.3564453125, 0.1904296875,
           0.7626953125, 0.3486328125, 0.3232421875, 0.7451171875, 0.6962890625, 0.3837890625, 0.4736328125,
           0.5693359375, 0.5146484375}},
    {1000, {0.2197265625, 0.0966796875, 0.5185546875, 0.6767578125, 0.2802734375, 0.9072265625, 0.0458984375,
            0.8994140625, 0.5009765625, 0.0693359375, 0.0849609375, 0.2548828125, 0.1611328125, 0.3837890625,
            0.1435546875, 0.3701171875}},
    {4095, {0.000244140625, 0.941162109375, 0.334228515625, 0.901611328125, 0.940185546875, 0.078857421875,
            0.949462890625, 0.390869140625, 0.191650390625, 0.246337890625, 0.569580078125, 0.321533203125,
            0.368896484375, 0.519775390625, 0.551025390625, 0.416748046875}},
};

DomainDescriptor slab_domain() { return DomainDescriptor(1, {{0.0, 1.0}}); }
DomainDescriptor cube_domain() { return DomainDescriptor(3, {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}); }

}  // namespace

TEST_CASE("sobol matches reference rows in all 16 dimensions") {
  const auto pts = sobol_sequence(16, 4096, 0);
  for (const auto& row : kRows) {
    for (int d = 0; d < 16; ++d) CHECK(pts[row.index * 16 + d] == row.x[d]);
  }
  double sum = 0.0;
  for (double v : pts) sum += v;
  CHECK(sum == 32760.0);
}

TEST_CASE("sobol small cases") {
  const auto first = sobol_sequence(1, 3, 1);
  REQUIRE(first.size() == 3);
  CHECK(first[0] == 0.5);
  CHECK(first[1] == 0.75);
  CHECK(first[2] == 0.25);
  CHECK(sobol_sequence(4, 0, 0).empty());
  CHECK_THROWS_AS(sobol_sequence(17, 4, 1), UnsupportedError);
  CHECK_THROWS_AS(SobolSequence(0), UnsupportedError);

  const auto p = sobol_sequence(3, 4096, 1);
  double mean = 0.0;
  for (std::size_t i = 0; i < 4096; ++i) mean += p[3 * i] * p[3 * i + 1] * p[3 * i + 2];
  mean /= 4096.0;
  CHECK(std::abs(mean - 0.125) < 2e-3);
}

TEST_CASE("sobol skip equals discarding a prefix") {
  SobolSequence a(5);
  a.skip(37);
  const auto full = sobol_sequence(5, 40, 0);
  const auto x = a.next();
  for (int d = 0; d < 5; ++d) CHECK(x[d] == full[37 * 5 + d]);
}

TEST_CASE("domain rescaling round trip") {
  DomainDescriptor dom(3, {{-4.0, 4.0}, {-4.0, 4.0}, {-4.0, 4.0}}, 1.0, {1e15, 1e18}, FrequencyScale::logarithmic);
  CHECK(dom.input_dim() == 7);
  const auto u = sobol_sequence(7, 200, 1);
  for (std::size_t i = 0; i < 200; ++i) {
    std::span<const double> z(u.data() + 7 * i, 7);
    const auto back = dom.to_unit(dom.from_unit(z));
    for (int j = 0; j < 7; ++j) CHECK(std::abs(back[j] - z[j]) < 1e-12);
  }
  CHECK_THROWS_AS(DomainDescriptor(3, {{1.0, 0.0}, {0.0, 1.0}, {0.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(DomainDescriptor(1, {{0.0, 1.0}}, 0.0, {2.0, 1.0}), ConfigError);
  CHECK(slab_domain().input_dim() == 2);
  CHECK(cube_domain().input_dim() == 5);
}

TEST_CASE("slab training sets") {
  const auto sets = build_training_sets(slab_domain(), {8192, 2048, 0, 0}, Sampler::sobol, 0);
  CHECK(sets.n_int() == 8192);
  CHECK(sets.n_sb() == 2048);
  std::size_t left = 0;
  for (const auto& p : sets.interior) {
    CHECK(p.z.x[0] >= 0.0);
    CHECK(p.z.x[0] <= 1.0);
    CHECK(std::abs(p.z.omega.mu) <= 1.0);
    CHECK(p.weight == 1.0 / 8192.0);
  }
  for (const auto& p : sets.spatial_boundary) {
    CHECK(p.weight == 1.0 / 2048.0);
    if (p.z.x[0] == 0.0) {
      ++left;
      CHECK(p.z.omega.mu > 0.0);
    } else {
      CHECK(p.z.x[0] == 1.0);
      CHECK(p.z.omega.mu < 0.0);
    }
    CHECK(dot(p.z.omega.v, p.normal) < 0.0);
  }
  CHECK(left == 1024);
  CHECK_THROWS_AS(build_training_sets(slab_domain(), {10, 10, 5, 0}, Sampler::sobol, 0), ConfigError);
}

TEST_CASE("cube faces share the boundary budget equally and are inflow") {
  const auto sets = build_training_sets(cube_domain(), {0, 12288, 0, 0}, Sampler::sobol, 0);
  REQUIRE(sets.n_sb() == 12288);
  int per_face[6] = {0, 0, 0, 0, 0, 0};
  for (const auto& p : sets.spatial_boundary) {
    int face = -1;
    for (int a = 0; a < 3; ++a) {
      if (p.normal[a] != 0.0) face = 2 * a + (p.normal[a] > 0.0 ? 1 : 0);
    }
    REQUIRE(face >= 0);
    ++per_face[face];
    const int axis = face / 2;
    CHECK(p.z.x[axis] == (face % 2 == 1 ? 1.0 : 0.0));
    CHECK(dot(p.z.omega.v, p.normal) < 0.0);
    CHECK(std::abs(norm(p.z.omega.v) - 1.0) < 1e-14);
  }
  for (int f : per_face) CHECK(f == 2048);

  const auto odd = build_training_sets(cube_domain(), {0, 13, 0, 0}, Sampler::uniform_random, 4);
  CHECK(odd.n_sb() == 13);
  for (const auto& p : odd.spatial_boundary) CHECK(dot(p.z.omega.v, p.normal) < 0.0);
}

TEST_CASE("training sets are deterministic per seed") {
  DomainDescriptor dom(3, {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}, 2.0, {-6.0, 6.0});
  for (Sampler s : {Sampler::sobol, Sampler::uniform_random}) {
    const auto a = build_training_sets(dom, {100, 60, 30, 20}, s, 11);
    const auto b = build_training_sets(dom, {100, 60, 30, 20}, s, 11);
    REQUIRE(a.n_int() == b.n_int());
    for (std::size_t i = 0; i < a.n_int(); ++i) {
      CHECK(a.interior[i].z.x == b.interior[i].z.x);
      CHECK(a.interior[i].z.nu == b.interior[i].z.nu);
    }
    for (std::size_t i = 0; i < a.n_tb(); ++i) {
      CHECK(a.temporal_boundary[i].z.t == 0.0);
      CHECK(a.temporal_boundary[i].z.omega.v == b.temporal_boundary[i].z.omega.v);
    }
    CHECK(a.n_d() == 20);
  }
  const auto r1 = build_training_sets(dom, {50, 0, 0, 0}, Sampler::uniform_random, 1);
  const auto r2 = build_training_sets(dom, {50, 0, 0, 0}, Sampler::uniform_random, 2);
  CHECK(r1.interior[0].z.x != r2.interior[0].z.x);
}

TEST_CASE("annulus sampler") {
  DomainDescriptor dom(3, {{-4.0, 4.0}, {-4.0, 4.0}, {-4.0, 4.0}}, 1.0, {1e15, 1e18}, FrequencyScale::logarithmic);
  ShellGeometry shell{{0.0, 0.0, 0.0}, 2.0, 4.0};
  const auto sets = annulus_sampler(dom, shell, {4096, 1000, 500, 0}, Sampler::sobol, 0);
  double mean_r3 = 0.0;
  for (const auto& p : sets.interior) {
    const double r = norm(p.z.x);
    CHECK(r >= 2.0 - 1e-12);
    CHECK(r <= 4.0 + 1e-12);
    CHECK(p.z.nu >= 1e15 * (1 - 1e-12));
    CHECK(p.z.nu <= 1e18 * (1 + 1e-12));
    mean_r3 += r * r * r;
  }
  // Volume-uniform radii make r^3 uniform on [R_i^3, R_e^3].
  CHECK(std::abs(mean_r3 / 4096.0 - 36.0) < 0.1);
  int inner = 0;
  for (const auto& p : sets.spatial_boundary) {
    const double r = norm(p.z.x);
    CHECK(dot(p.z.omega.v, p.normal) < 0.0);
    if (std::abs(r - 2.0) < 1e-12) {
      ++inner;
      // The inner-sphere normal points toward the center.
      CHECK(dot(p.normal, p.z.x) < 0.0);
    } else {
      CHECK(std::abs(r - 4.0) < 1e-12);
    }
  }
  CHECK(inner == 500);
  for (const auto& p : sets.temporal_boundary) {
    CHECK(p.z.t == 0.0);
    CHECK(norm(p.z.x) >= 2.0 - 1e-12);
  }
  CHECK_THROWS_AS(annulus_sampler(dom, ShellGeometry{{}, 4.0, 2.0}, {10, 0, 0, 0}, Sampler::sobol, 0), ConfigError);

  // Shell volume from the fraction of box points inside the shell.
  const auto u = unit_points(Sampler::uniform_random, 3, 100000, 7, 99);
  std::size_t inside = 0;
  for (std::size_t i = 0; i < 100000; ++i) {
    const Vec3 x{-4.0 + 8.0 * u[3 * i], -4.0 + 8.0 * u[3 * i + 1], -4.0 + 8.0 * u[3 * i + 2]};
    const double r = norm(x);
    if (r >= 2.0 && r <= 4.0) ++inside;
  }
  const double estimate = 512.0 * static_cast<double>(inside) / 100000.0;
  CHECK(std::abs(estimate - shell.volume()) / shell.volume() < 0.01);
}

TEST_CASE("hemisphere directions point along the inward normal") {
  const auto u = sobol_sequence(2, 500, 1);
  const Vec3 m{0.3, -0.5, 0.81};
  for (std::size_t i = 0; i < 500; ++i) {
    const auto w = hemisphere_direction(m, u[2 * i], u[2 * i + 1]);
    CHECK(dot(w.v, m) > 0.0);
    const auto again = Direction::angles(w.mu, w.phi);
    for (int a = 0; a < 3; ++a) CHECK(std::abs(again.v[a] - w.v[a]) < 1e-12);
  }
}

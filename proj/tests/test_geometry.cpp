#include <doctest.h>

#include <cmath>
#include <random>

#include "kvn/geometry.hpp"

using namespace kvn;

namespace {

Grid grid1(const Domain& d, int n) {
  const std::vector<int> r{n};
  return build_grid(d, r);
}

}  // namespace

TEST_CASE("interval grid of four cells") {
  const Grid g = grid1(Domain::interval(0.0, 1.0), 4);
  REQUIRE(g.size() == 4);
  const double expect[] = {0.125, 0.375, 0.625, 0.875};
  for (int i = 0; i < 4; ++i) {
    CHECK(g.centers()[i][0] == doctest::Approx(expect[i]).epsilon(1e-15));
    CHECK(g.volumes()[i] == doctest::Approx(0.25).epsilon(1e-15));
  }
  CHECK(g.spacing()[0] == 0.25);
  REQUIRE(g.boundary_faces().size() == 2);
  std::vector<double> normals;
  for (const auto& f : g.boundary_faces()) normals.push_back(f.normal[0]);
  std::sort(normals.begin(), normals.end());
  CHECK(normals[0] == -1.0);
  CHECK(normals[1] == 1.0);
}

TEST_CASE("rectangle grid counts") {
  const Interval b[2] = {{0, 1}, {0, 1}};
  const Grid g = grid1(Domain::rectangle(b), 10);
  CHECK(g.size() == 100);
  CHECK(std::abs(g.total_volume() - 1.0) <= 1e-12);
  CHECK(g.boundary_faces().size() == 40);
  CHECK(g.interior_faces().size() == 180);
}

TEST_CASE("three-dimensional box") {
  const Interval b[3] = {{0, 1}, {0, 2}, {-1, 1}};
  const std::vector<int> r{4, 5, 6};
  const Grid g = build_grid(Domain::rectangle(b), r);
  CHECK(g.size() == 120);
  CHECK(std::abs(g.total_volume() - 4.0) <= 1e-12 * 4.0);
  CHECK(g.boundary_faces().size() == 2 * (5 * 6 + 4 * 6 + 4 * 5));
}

TEST_CASE("masked disk area against Monte Carlo membership") {
  const Domain disk = Domain::disk({0, 0, 0}, 1.0);
  const Grid g = grid1(disk, 64);
  // Monte Carlo estimate of the area from membership queries alone.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int samples = 400000;
  int hits = 0;
  for (int k = 0; k < samples; ++k) hits += disk.contains({u(rng), u(rng), 0}) ? 1 : 0;
  const double mc = 4.0 * hits / samples;
  CHECK(std::abs(mc - M_PI) < 0.02);
  CHECK(std::abs(g.total_volume() - M_PI) <= 0.05 * M_PI);
  CHECK(std::abs(g.total_volume() - mc) <= 0.05 * mc);
  CHECK(g.total_volume() <= 4.0);
}

TEST_CASE("disk area error shrinks monotonically under refinement") {
  const Domain disk = Domain::disk({0, 0, 0}, 1.0);
  double prev = 1e9;
  for (int n : {32, 64, 128, 256}) {
    const double err = std::abs(grid1(disk, n).total_volume() - M_PI);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("membership") {
  const Domain iv = Domain::interval(0, 1);
  CHECK(contains(iv, {0.5, 0, 0}));
  CHECK_FALSE(contains(iv, {1.0, 0, 0}));
  CHECK_FALSE(contains(iv, {0.0, 0, 0}));
  const Domain disk = Domain::disk({0, 0, 0}, 1.0);
  CHECK_FALSE(contains(disk, {0.6, 0.8, 0}));
  CHECK(contains(disk, {0.59, 0.8, 0}));
  CHECK(disk.distance_outside({2.0, 0, 0}) == doctest::Approx(1.0));
  const Vec p = disk.project({0, 3, 0});
  CHECK(p[1] == doctest::Approx(1.0));
}

TEST_CASE("invalid domains and resolutions are rejected") {
  CHECK_THROWS_AS(Domain::interval(1.0, 1.0), GeometryError);
  CHECK_THROWS_AS(Domain::interval(1.0, 0.0), GeometryError);
  CHECK_THROWS_AS(Domain::disk({0, 0, 0}, 0.0), GeometryError);
  const Interval bad[2] = {{0, 1}, {2, 2}};
  CHECK_THROWS_AS(Domain::rectangle(bad), GeometryError);
  const Interval one[1] = {{0, 1}};
  CHECK_THROWS_AS(Domain::rectangle(one), GeometryError);
  const std::vector<int> r2{2};
  CHECK_THROWS_AS(build_grid(Domain::interval(0, 1), r2), GeometryError);
  const Interval b[2] = {{0, 1}, {0, 1}};
  const std::vector<int> r{8, 2};
  CHECK_THROWS_AS(build_grid(Domain::rectangle(b), r), GeometryError);
}

TEST_CASE("boundary faces: unit outward normals, valid cells, closed surface") {
  const Interval b[2] = {{-1, 2}, {0, 1}};
  std::vector<std::pair<Domain, int>> cases = {
      {Domain::interval(-1, 1), 16}, {Domain::rectangle(b), 12}, {Domain::disk({0.5, -0.5, 0}, 2.0), 48}};
  for (const auto& [dom, n] : cases) {
    const Grid g = grid1(dom, n);
    Vec sum{};
    for (const auto& f : g.boundary_faces()) {
      CHECK(f.cell < g.size());
      CHECK(std::abs(std::sqrt(dot(f.normal, f.normal)) - 1.0) <= 1e-12);
      CHECK(f.area > 0.0);
      Vec out = f.centroid;
      for (int a = 0; a < 3; ++a) out[a] += 1e-7 * f.normal[a];
      CHECK_FALSE(dom.contains(out));
      for (int a = 0; a < 3; ++a) sum[a] += f.area * f.normal[a];
    }
    const double tol = dom.kind() == DomainKind::disk ? 2.0 * g.mesh_size() * g.total_boundary_area()
                                                      : 1e-10 * g.total_boundary_area();
    CHECK(std::sqrt(dot(sum, sum)) <= tol);
  }
}

TEST_CASE("disk boundary faces sit on the circle") {
  const Domain disk = Domain::disk({0, 0, 0}, 1.0);
  const Grid g = grid1(disk, 40);
  for (const auto& f : g.boundary_faces()) {
    CHECK(std::hypot(f.centroid[0], f.centroid[1]) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.normal[0] == doctest::Approx(f.centroid[0]).epsilon(1e-14));
    CHECK_FALSE(g.is_interior(f.cell));
  }
}

TEST_CASE("neighbours are symmetric") {
  const Grid g = grid1(Domain::disk({0, 0, 0}, 1.0), 20);
  for (std::size_t c = 0; c < g.size(); ++c) {
    for (int axis = 0; axis < 2; ++axis) {
      if (auto n = g.neighbor(c, axis, +1)) CHECK(g.neighbor(*n, axis, -1) == c);
    }
  }
}

TEST_CASE("grids are rebuilt deterministically") {
  const Domain d = Domain::disk({0, 0, 0}, 1.0);
  const Grid a = grid1(d, 33);
  const Grid b = grid1(d, 33);
  REQUIRE(a.size() == b.size());
  for (std::size_t c = 0; c < a.size(); ++c) CHECK(a.centers()[c] == b.centers()[c]);
}

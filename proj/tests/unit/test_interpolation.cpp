#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sparseloc/coverage_planner.hpp"
#include "sparseloc/interpolation.hpp"
#include "sparseloc/simulator.hpp"

using namespace sparseloc;

namespace {

// Reference values computed with scipy's CloughTocher2DInterpolator.
const std::vector<Sample> kCtPoints{
    {0, 6.250955, 8.972138, -5.653682}, {0, 7.756857, 2.252072, -3.889861}, {0, 3.001663, 8.735534, -2.176991},
    {0, 0.052653, 8.212284, 0.034164},  {0, 7.970694, 4.67935, 0.729901},   {0, 3.030324, 2.784256, -2.727864},
    {0, 2.548696, 4.450763, -0.100459}, {0, 5.045483, 5.534974, 2.752834},  {0, 9.955003, 7.926619, -1.228197},
    {0, 6.221792, 9.889601, -5.62302},  {0, 2.153087, 1.60212, 0.767774},   {0, 6.125396, 0.43942, 5.386339},
    {0, 0.356803, 5.148888, 0.500126},  {0, 4.66206, 9.171678, -5.512264},  {0, 6.292263, 5.141176, 2.625199},
    {0, 4.968734, 2.475149, -4.872873}, {0, 0.11794, 1.924021, 0.076868},   {0, 6.920321, 2.006067, -2.323098},
    {0, 3.695363, 0.037342, 3.166889},  {0, 8.300477, 1.544611, 1.119292},  {0, 2.675993, 8.803322, -1.726708},
    {0, 5.097908, 8.471502, -3.87837},  {0, 6.397172, 7.417709, 2.816956},  {0, 0.914956, 5.411438, 1.381301},
    {0, 5.077722, 8.713394, -4.780171},
};

struct Query {
  Vec2 p;
  double value;
};

const std::vector<Query> kCtQueries{
    {{0.17579866666666666, 5.095064333333333}, 0.251095621563118},
    {{0.4414706666666666, 6.257536666666667}, 0.9887813793906249},
    {{1.214534, 7.475681333333334}, 0.6980301841106293},
    {{2.1975373333333335, 7.650098}, 0.22963372179456037},
    {{2.983479333333333, 8.968402333333334}, -2.701687597321582},
    {{7.4759166666666665, 8.929452666666666}, -4.675517908479604},
    {{7.534376666666667, 8.105488666666666}, -1.0793692097899381},
    {{8.742058, 4.71686}, -1.0946527899733187},
    {{2.8388280000000004, 8.769428}, -1.9568347669534163},
};

// Reference values from a dense numpy solve of the Green's-function system.
const std::vector<Sample> kBhPoints{
    {0, -1.387359, 0.981841, -1.414661}, {0, -4.407484, -1.123682, -2.595964}, {0, -1.769637, -3.498003, -1.971826},
    {0, 3.163381, -1.205538, -1.170482}, {0, 4.787479, 0.899917, -2.055816},   {0, 1.050563, 1.379966, -0.965342},
    {0, 1.764502, -3.49212, -1.391769},  {0, -0.596865, -2.60436, -1.363627},  {0, -0.975017, -4.032959, -2.054133},
    {0, 4.678281, -2.84996, -2.147175},  {0, 1.717652, -1.995799, -0.841601},  {0, 3.74077, 1.622147, -1.752885},
};

const std::vector<Query> kBhQueries{
    {{0, 0}, -0.9462895170133847},
    {{1.5, -2.25}, -0.8949428508062096},
    {{-3.1, 4.2}, -1.9781706713822182},
    {{4.9, 4.9}, -2.370562360861091},
};

std::vector<Sample> random_samples(std::mt19937_64& rng, int n, double (*f)(double, double)) {
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<Sample> s;
  for (int i = 0; i < n; ++i) {
    const double x = u(rng), y = u(rng);
    s.push_back({0, x, y, f(x, y)});
  }
  return s;
}

double affine(double x, double y) { return 2.0 - 0.5 * x + 1.25 * y; }
double wavy(double x, double y) { return std::sin(x) * std::cos(0.7 * y) + 0.1 * x * y; }

}  // namespace

TEST_SUITE("interpolation") {
  TEST_CASE("Clough-Tocher matches the reference implementation") {
    CloughTocher ct(deduplicate(kCtPoints));
    for (const auto& q : kCtQueries) CHECK(ct(q.p) == doctest::Approx(q.value).epsilon(1e-6).scale(1.0));
  }

  TEST_CASE("Clough-Tocher reproduces data and affine functions") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.5, 9.5);
    for (int trial = 0; trial < 10; ++trial) {
      const auto s = random_samples(rng, 30 + trial * 5, affine);
      CloughTocher ct(deduplicate(s));
      for (const auto& x : s) CHECK(ct(x.position()) == doctest::Approx(x.rssi).epsilon(1e-9));
      for (int k = 0; k < 50; ++k) {
        const Vec2 p{u(rng), u(rng)};
        const double v = ct(p);
        if (!std::isnan(v)) CHECK(v == doctest::Approx(affine(p.x, p.y)).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("Clough-Tocher is continuous across triangle edges and NaN outside the hull") {
    std::mt19937_64 rng(32);
    const auto s = random_samples(rng, 40, wavy);
    CloughTocher ct(deduplicate(s));
    const auto& tri = ct.triangulation();
    for (std::size_t t = 0; t < tri.triangles.size(); ++t)
      for (int e = 0; e < 3; ++e) {
        const int nb = tri.neighbors[t][e];
        if (nb < 0) continue;
        const Vec2 a = tri.points[tri.triangles[t][(e + 1) % 3]];
        const Vec2 b = tri.points[tri.triangles[t][(e + 2) % 3]];
        for (double w : {0.2, 0.5, 0.8}) {
          const Vec2 m = (1 - w) * a + w * b;
          const auto bt = tri.barycentric(static_cast<int>(t), m);
          const auto bn = tri.barycentric(nb, m);
          CHECK(ct.evaluate(static_cast<int>(t), bt) == doctest::Approx(ct.evaluate(nb, bn)).epsilon(1e-9));
        }
      }
    CHECK(std::isnan(ct({-5, -5})));
  }

  TEST_CASE("biharmonic Green's function") {
    CHECK(biharmonic_green(0.0) == 0.0);
    CHECK(biharmonic_green(1.0) == doctest::Approx(-1.0));
    CHECK(biharmonic_green(std::exp(1.0)) == doctest::Approx(0.0).scale(1.0));
    CHECK(biharmonic_green(2.0) == doctest::Approx(4.0 * (std::log(2.0) - 1.0)));
  }

  TEST_CASE("biharmonic spline matches the reference solve") {
    BiharmonicSpline bh(deduplicate(kBhPoints));
    for (const auto& q : kBhQueries) CHECK(bh(q.p) == doctest::Approx(q.value).epsilon(1e-9));
    CHECK(bh.residual() < 1e-8);
    for (const auto& x : kBhPoints) CHECK(bh(x.position()) == doctest::Approx(x.rssi).epsilon(1e-8));
  }

  TEST_CASE("biharmonic spline is symmetric under mirrored data") {
    std::vector<Sample> s{{0, 1, 0, -3}, {0, -1, 0, -3}, {0, 0, 2, -1}, {0, 0, -2, -5}, {0, 2, 2, -4}, {0, -2, 2, -4}};
    BiharmonicSpline bh(deduplicate(s));
    for (double y : {-1.5, 0.0, 0.7, 3.0})
      for (double x : {0.3, 1.1, 2.5}) CHECK(bh({x, y}) == doctest::Approx(bh({-x, y})).epsilon(1e-9));
  }

  TEST_CASE("duplicates are averaged with a warning") {
    const std::vector<Sample> s{{0, 1, 1, -10}, {1, 1, 1, -20}, {2, 2, 1, -5}};
    Diagnostics diag;
    const auto d = deduplicate(s, &diag);
    REQUIRE(d.points.size() == 2);
    CHECK(d.values[0] == doctest::Approx(-15.0));
    CHECK(diag.warnings.size() == 1);
    Diagnostics none;
    deduplicate(kBhPoints, &none);
    CHECK(none.warnings.empty());
  }

  TEST_CASE("degenerate inputs") {
    const std::vector<Sample> two{{0, 0, 0, 1}, {0, 1, 0, 2}};
    CHECK_THROWS_AS(BiharmonicSpline(deduplicate(two)), EstimationError);
    const std::vector<Sample> line{{0, 0, 0, 1}, {0, 1, 1, 2}, {0, 2, 2, 3}, {0, 3, 3, 4}};
    CHECK_THROWS_AS(BiharmonicSpline(deduplicate(line)), EstimationError);
    CHECK_THROWS_AS(CloughTocher(deduplicate(line)), EstimationError);
  }

  TEST_CASE("field lattice and argmax") {
    const auto spec = FieldSpec::over_bounds({{-15, -28}, {0, 0}}, 0.25);
    CHECK(spec.nx == 61);
    CHECK(spec.ny == 113);
    CHECK(spec.node(60, 112) == Vec2{0, 0});

    std::vector<Sample> s;
    for (int j = 0; j < 5; ++j)
      for (int i = 0; i < 5; ++i) s.push_back({0, i * 2.0, j * 2.0, -std::hypot(i * 2.0 - 3.0, j * 2.0 - 5.0)});
    const auto g = FieldSpec::over_bounds({{0, 0}, {8, 8}}, 0.5);
    const auto e = estimate_field_argmax(interpolate_biharmonic(s, g), "biharmonic");
    CHECK(e.method == "biharmonic");
    CHECK(distance(e.position, {3, 5}) < 1.0);
    const auto c = estimate_field_argmax(interpolate_cubic(s, g), "cubic");
    CHECK(distance(c.position, {3, 5}) < 1.0);
  }

  TEST_CASE("court runs: biharmonic median and noise-free cubic land near the source") {
    ScenarioConfig sc;
    sc.map = {{{-15, -28}, {0, 0}}, {}, 1.25};
    sc.source = {-7.5, -14};
    sc.start = {-14.5, -20.5};
    const auto path = plan_coverage(sc.map, {1.25, 4, 700.0}, sc.v_lin, sc.v_ang, sc.start);
    const auto spec = FieldSpec::over_bounds(sc.map.bounds, 0.25);
    std::vector<double> errors;
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
      sc.noise = {3.0, seed};
      const auto log = simulate_traverse(path, sc);
      errors.push_back(distance(estimate_field_argmax(interpolate_biharmonic(log.samples, spec), "b").position, sc.source));
    }
    std::sort(errors.begin(), errors.end());
    CHECK(errors[4] < 3.0);

    sc.noise = {0.0, 1};
    const auto clean = simulate_traverse(path, sc);
    CHECK(distance(estimate_field_argmax(interpolate_cubic(clean.samples, spec), "c").position, sc.source) < 3.0);
    CHECK(distance(estimate_field_argmax(interpolate_biharmonic(clean.samples, spec), "b").position, sc.source) < 3.0);
  }

  TEST_CASE("field CSV has one row per lattice row") {
    const std::vector<Sample> s{{0, 0, 0, 1}, {0, 4, 0, 2}, {0, 0, 4, 3}, {0, 4, 4, 4}};
    const auto f = interpolate_cubic(s, FieldSpec::over_bounds({{0, 0}, {4, 4}}, 1.0));
    std::stringstream out;
    f.write_csv(out);
    int rows = 0;
    for (std::string line; std::getline(out, line);) ++rows;
    CHECK(rows == 5);
    CHECK(f.at(2, 2) == doctest::Approx(2.5));
  }
}

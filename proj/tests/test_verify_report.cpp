#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <functional>

#include "coarse_run.hpp"
#include "pgs/verify_report.hpp"

using namespace pgs;

namespace {

CompositeSolution modified(const std::function<double(double r, double th, double p)>& f) {
  const auto& run = testing::coarse_run();
  RayField rf = run.comp.field;
  for (int k = 0; k < rf.rays(); ++k)
    for (int i = 0; i <= rf.Ns; ++i) rf.p[rf.at(k, i)] = f(rf.radius(k, i), rf.theta[k], rf.p[rf.at(k, i)]);
  return make_composite(run.comp.fan, run.comp.shock, std::move(rf));
}

CompositeSolution modified_shock(double bump) {
  const auto& run = testing::coarse_run();
  ShockCurve s = run.comp.shock;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s.thetas[k] - kTheta2;
    s.r[k] += bump * std::exp(-40.0 * t * t);
  }
  return make_composite(run.comp.fan, s, run.comp.field);
}

}  // namespace

TEST_CASE("extrapolate_slope recovers the linear coefficient") {
  std::vector<double> x, phi;
  for (int k = 1; k <= 6; ++k) {
    x.push_back(0.01 * k);
    phi.push_back(1.3 * x.back() + 0.7 * x.back() * x.back());
  }
  CHECK(extrapolate_slope(x, phi, 4) == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(extrapolate_slope(x, phi, 6) == doctest::Approx(1.3).epsilon(1e-12));
}

TEST_CASE("distance to the sonic arc") {
  const WaveFan fan = build_wave_fan({});
  CHECK(distance_to_sonic(fan, fan.r1 - 0.1, kPi / 2) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(distance_to_sonic(fan, fan.r1, 0.3 + kPi / 2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("checks on the coarse solution") {
  const auto& run = testing::coarse_run();
  CHECK(check_bounds(run.comp).pass);
  CHECK(check_shock_gap(run.comp).pass);
  CHECK(check_ellipticity(run.comp).pass);
  CHECK(check_sonic_regularity(run.comp).first.pass);
}

TEST_CASE("negative controls") {
  const auto& run = testing::coarse_run();
  const double p1 = run.comp.fan.cfg.p1, p2 = run.comp.fan.cfg.p2;
  SUBCASE("pressure above p1") {
    const auto bad = modified([&](double r, double, double p) { return r < 0.3 ? p1 + 0.01 : p; });
    CHECK_FALSE(check_bounds(bad).pass);
  }
  SUBCASE("shock pressure at p2") {
    const RayField& f = run.comp.field;
    const auto bad = modified([&](double r, double th, double p) {
      for (int k = 0; k < f.rays(); ++k)
        if (f.on_shock[k] && f.theta[k] == th && r == f.radius(k, f.Ns)) return p2;
      return p;
    });
    CHECK_FALSE(check_shock_gap(bad).pass);
    CHECK(check_bounds(bad).pass == false);  // p2 itself is outside (p2, p1]
  }
  SUBCASE("shock touching the inner circle") {
    ShockCurve s = run.comp.shock;
    const double drop = *std::min_element(s.r.begin(), s.r.end()) - run.comp.fan.r2;
    for (double& r : s.r) r -= drop;
    const auto bad = make_composite(run.comp.fan, s, run.comp.field);
    CHECK_FALSE(check_shock_gap(bad).pass);
    CHECK(check_bounds(bad).pass);
    CHECK(check_convexity(bad).pass);
  }
  SUBCASE("flat field has no sonic slope") {
    const auto bad = modified([&](double, double, double) { return p1 - 1e-3; });
    CHECK_FALSE(check_sonic_regularity(bad).second.pass);
  }
  SUBCASE("concave bump breaks convexity") {
    // outward bump of the shock near P2: eta'' < 0 there
    CHECK_FALSE(check_convexity(modified_shock(-0.05)).pass);
    CHECK(check_convexity(modified_shock(0.0)).pass);
  }
}

TEST_CASE("report JSON round trip") {
  const auto& run = testing::coarse_run();
  const PropertyReport rep = verify_solution(run.comp);
  const PropertyReport back = report_from_json(report_json(rep));
  REQUIRE(back.checks.size() == rep.checks.size());
  for (std::size_t k = 0; k < rep.checks.size(); ++k) {
    const Check &a = rep.checks[k], &b = back.checks[k];
    CHECK(a.name == b.name);
    CHECK(a.pass == b.pass);
    CHECK(a.inconclusive == b.inconclusive);
    CHECK(a.criterion == b.criterion);
    REQUIRE(a.values.size() == b.values.size());
    for (std::size_t m = 0; m < a.values.size(); ++m) {
      CHECK(a.values[m].first == b.values[m].first);
      if (std::isfinite(a.values[m].second)) CHECK(a.values[m].second == b.values[m].second);
    }
  }
  CHECK(report_json(back) == report_json(rep));
}

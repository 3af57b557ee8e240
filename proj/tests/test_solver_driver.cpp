#include <doctest.h>

#include <cmath>

#include "coarse_run.hpp"

using namespace pgs;

TEST_CASE("geometric schedule hits both ends") {
  const auto s = geometric_schedule(1e-1, 1e-6, 0.31622776601683794);
  REQUIRE(s.size() == 11);
  CHECK(s.front() == 1e-1);
  CHECK(s.back() == 1e-6);
  for (std::size_t k = 1; k < s.size(); ++k) CHECK(s[k] < s[k - 1]);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  c.Ns = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.picard_damping = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.radial_stretch = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.eps_schedule.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("resampling onto the same grid is the identity") {
  const WaveFan fan = build_wave_fan({});
  const FreeBoundaryState st = initial_state(fan, testing::coarse_config());
  std::vector<double> p(st.grid.size());
  for (int k = 0; k < st.grid.size(); ++k) p[k] = 1.0 + 1e-3 * k;
  const auto q = resample_field(st.grid, p, st.grid);
  REQUIRE(q.size() == p.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) worst = std::max(worst, std::abs(q[k] - p[k]));
  CHECK(worst < 1e-12);
}

TEST_CASE("ellipticity margin of a constant field") {
  const WaveFan fan = build_wave_fan({});
  const FreeBoundaryState st = initial_state(fan, testing::coarse_config());
  const DomainGrid& g = st.grid;
  const std::vector<double> p(g.size(), 1.7);
  double rmax = 0.0;
  for (int i = 1; i <= g.Ns; ++i)
    for (int j = 0; j < g.nth(); ++j)
      if (g.r1 - g.radius(i, j) >= 0.1 * g.r1) rmax = std::max(rmax, g.radius(i, j));
  CHECK(ellipticity_margin(g, p, 0.1) == doctest::Approx(1.7 - rmax * rmax).epsilon(1e-12));
}

TEST_CASE("coarse continuation solve: maximum principle and free boundary") {
  const auto& run = testing::coarse_run();
  const auto& st = run.sol.state;
  const WaveFan& fan = run.sol.fan;
  CHECK(st.tangent);
  CHECK(st.p_hat > fan.cfg.p2);
  double pmin = 1e300, pmax = -1e300;
  for (double v : st.field.values) {
    pmin = std::min(pmin, v);
    pmax = std::max(pmax, v);
  }
  CHECK(pmin > fan.cfg.p2);
  CHECK(pmax <= fan.cfg.p1 + 1e-12);
  for (std::size_t k = 0; k < st.shock.size(); ++k) {
    CHECK(st.shock.r[k] <= fan.r1 + 1e-12);
    CHECK(st.shock.r[k] > fan.r2);
  }
  const auto& stages = run.sol.trace.stages;
  REQUIRE(stages.size() == 3);
  CHECK(std::isnan(stages[0].change_from_previous));
  for (const auto& s : stages) {
    CHECK(s.outer_iterations >= 1);
    CHECK(s.ellipticity_margin > 0.0);
  }
  CHECK(!run.sol.trace.records.empty());
}

#include <doctest.h>

#include <cmath>

#include "pgs/geometry_grid.hpp"

using namespace pgs;

TEST_CASE("radial nodes: endpoints, monotone, clustered towards s = 1") {
  for (double b : {0.0, 1.0, 3.0}) {
    const auto s = radial_nodes(64, b);
    CHECK(s.front() == 0.0);
    CHECK(s.back() == 1.0);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] > s[i - 1]);
    if (b > 0) CHECK(s[64] - s[63] < s[1] - s[0]);
  }
  CHECK_THROWS(radial_nodes(2, 0.0));
  CHECK_THROWS(radial_nodes(16, -1.0));
}

TEST_CASE("full-disk quadrature: exact area, second order on a smooth integrand") {
  const double R0 = std::sqrt(2.0), exact = kPi * (1.0 - std::exp(-2.0));
  auto integral = [](const DomainGrid& g) {
    const auto w = g.quadrature_weights();
    double sum = w[0];
    for (int i = 1; i <= g.Ns; ++i)
      for (int j = 0; j < g.nth(); ++j) {
        const double r = g.radius(i, j);
        sum += w[g.index(i, j)] * std::exp(-r * r);
      }
    return sum;
  };
  double prev = 0.0;
  for (int n : {32, 64, 128, 256}) {
    const DomainGrid g = build_disk_grid(R0, n, n);
    CHECK(std::abs(g.area() - 2.0 * kPi) < 1e-12);
    const double err = std::abs(integral(g) - exact) / exact;
    if (n == 256) CHECK(err < 1e-3);
    if (prev > 0) CHECK(prev / err > 3.5);
    prev = err;
  }
  const double exact_area = 2.0 * kPi;
  const DomainGrid gs = build_disk_grid(R0, 128, 128, 3.0);
  CHECK(std::abs(gs.area() - exact_area) / exact_area < 1e-12);
  CHECK(std::abs(integral(gs) - exact) / exact < 1e-3);
}

TEST_CASE("line shock: interpolation and segment area") {
  RiemannConfig c;
  c.alpha1 = 1e-9;  // frozen-pbar line eta = -sqrt(1.5)
  const WaveFan fan = build_wave_fan(c);
  const double d = std::sqrt(1.5);
  std::vector<double> t;
  const int n = 400;
  for (int k = 0; k <= n; ++k) t.push_back(fan.theta3 + (fan.theta1 - fan.theta3) * k / n);
  const ShockCurve line = line_shock(d, kTheta2, t);
  CHECK(line.r.front() == doctest::Approx(fan.r1).epsilon(1e-8));
  CHECK(line.r.back() == doctest::Approx(fan.r1).epsilon(1e-8));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const double th = 0.5 * (t[k] + t[k + 1]);
    worst = std::max(worst, std::abs(interp_shock(line, th).first - d / std::cos(th - kTheta2)));
  }
  CHECK(worst < 1e-6);
  CHECK(interp_shock(line, kTheta2).second == doctest::Approx(0.0).epsilon(1e-12));

  // Omega = disk minus the circular segment below the chord
  const double r1 = fan.r1, half = std::acos(d / r1);
  const double segment = r1 * r1 * (half - std::sin(half) * std::cos(half));
  const double exact = kPi * r1 * r1 - segment;
  for (SymmetryMode m : {SymmetryMode::Half, SymmetryMode::Full}) {
    const DomainGrid probe = build_grid(fan, line_shock(d, kTheta2, {fan.theta3, kTheta2, fan.theta1}),
                                        256, 256, m);
    const ShockCurve sc = line_shock(d, kTheta2, shock_thetas(probe));
    const DomainGrid g = build_grid(fan, sc, 256, 256, m);
    CHECK(std::abs(g.area() - exact) / exact < 1e-3);
  }
}

TEST_CASE("grid tags and splice") {
  const WaveFan fan = build_wave_fan({});
  const std::vector<double> t0{fan.theta3, kTheta2, fan.theta1};
  for (SymmetryMode m : {SymmetryMode::Half, SymmetryMode::Full}) {
    const DomainGrid probe = build_grid(fan, initial_shock(fan, t0), 16, 32, m);
    const DomainGrid g = build_grid(fan, initial_shock(fan, shock_thetas(probe)), 16, 32, m, 2.0);
    CHECK(g.Rb[g.j3] == fan.r1);
    if (m == SymmetryMode::Full) CHECK(g.Rb[g.j1] == fan.r1);
    CHECK(g.tag(0, 0) == NodeTag::Pole);
    int sonic = 0, shock = 0;
    for (int j = 0; j < g.nth(); ++j) {
      const NodeTag b = g.tag(g.Ns, j);
      CHECK((b == NodeTag::Sonic || b == NodeTag::Shock));
      sonic += b == NodeTag::Sonic;
      shock += b == NodeTag::Shock;
      CHECK(g.Rb[j] <= fan.r1 + 1e-12);
      CHECK(g.Rb[j] > 0.0);
      for (int i = 1; i < g.Ns; ++i) CHECK(g.tag(i, j) != NodeTag::Sonic);
    }
    CHECK(sonic + shock == g.nth());
    CHECK(shock > 0);
    const auto st = shock_thetas(g);
    for (std::size_t k = 1; k < st.size(); ++k) CHECK(st[k] > st[k - 1]);
  }
  CHECK_THROWS(build_grid(fan, line_shock(1.0, kTheta2, {4.0, 4.5, 5.0}), 8, 16, SymmetryMode::Half));
}

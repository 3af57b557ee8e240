#pragma once

#include "pgs/field_recovery.hpp"
#include "pgs/solver_driver.hpp"

namespace pgs::testing {

inline SolverConfig coarse_config() {
  SolverConfig c;
  c.Ns = 16;
  c.Ntheta = 64;
  c.radial_stretch = 2.0;
  c.eps_schedule = geometric_schedule(1e-1, 1e-3, 0.1);
  return c;
}

struct CoarseRun {
  Solution sol;
  CompositeSolution comp;
};

// one shared coarse solve of the default Riemann data
inline const CoarseRun& coarse_run() {
  static const CoarseRun run = [] {
    CoarseRun r;
    const WaveFan fan = build_wave_fan({});
    r.sol = continuation_solve(fan, coarse_config());
    r.comp = make_composite(fan, r.sol.state.shock,
                            full_rays(r.sol.state.grid, r.sol.state.field.values, fan));
    return r;
  }();
  return run;
}

}  // namespace pgs::testing

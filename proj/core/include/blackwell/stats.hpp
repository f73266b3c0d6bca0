#pragma once

namespace blackwell {

// Per-thread solver counters, harvested by the experiment layer after each
// run on the owning thread.
struct SolverStats {
  long long lp_calls = 0;
  long long dykstra_sweeps = 0;
};

SolverStats& solver_stats();

// Returns the current thread's counters and resets them.
SolverStats drain_solver_stats();

}  // namespace blackwell

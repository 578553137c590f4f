#pragma once

#include <optional>
#include <vector>

#include "expr.hpp"

namespace galmono {

struct TrackSettings {
  double initial_step = 0.05;  // in segment-parameter units, t in [0,1]
  double min_step = 1e-7;
  double max_step = 0.25;
  double corrector_tol = 1e-10;  // inf-norm of the Newton update
  int max_corrector_iters = 3;
  int max_steps = 5000;
  double step_expand = 2.0;  // after 4 consecutive accepted steps
  double step_shrink = 0.5;  // on reject
  double jacobian_cond_abort = 1e13;
};

enum class PathStatus {
  Success,
  StepLimitExceeded,
  MinStepReached,
  CorrectorDiverged,
  IllConditioned,
};

const char* to_string(PathStatus s);

struct PathOutcome {
  PathStatus status = PathStatus::CorrectorDiverged;
  CVec x_end;  // valid on Success
  int steps_taken = 0;
  double smallest_step_used = 0.0;

  bool ok() const { return status == PathStatus::Success; }
};

enum class NewtonStatus { Converged, Diverged, Singular };

struct NewtonOutcome {
  NewtonStatus status = NewtonStatus::Diverged;
  CVec x;
  double last_update = 0.0;
  int iters = 0;

  bool ok() const { return status == NewtonStatus::Converged; }
};

/// Newton iteration on F(.; z) from x. Converged means the last update had
/// inf-norm <= tol within max_iters iterations. Singular reports a linear
/// solve failure or a condition estimate beyond cond_abort.
NewtonOutcome newton_correct(const CompiledSystem& sys, const CVec& x,
                             const CVec& z, double tol, int max_iters,
                             double cond_abort = 1e13,
                             CompiledSystem::Workspace* ws = nullptr);

/// Continues the solution x0 of F(x; z0) = 0 along the straight segment
/// z(t) = (1-t) z0 + t z1. Predictor is fourth-order Runge-Kutta on the
/// Davidenko ODE d_x F . x' = -d_z F . (z1 - z0); corrector is
/// newton_correct; steps are accepted only on corrector success.
PathOutcome track_segment(const CompiledSystem& sys, const CVec& x0,
                          const CVec& z0, const CVec& z1,
                          const TrackSettings& settings,
                          CompiledSystem::Workspace* ws = nullptr);

/// Tracks each start point independently; outcome order matches input
/// order. Individual failures never abort the batch. threads <= 1 runs
/// serially.
std::vector<PathOutcome> track_many(const CompiledSystem& sys,
                                    const std::vector<CVec>& fiber_points,
                                    const CVec& z0, const CVec& z1,
                                    const TrackSettings& settings,
                                    int threads = 1);

/// Splits [0, count) across up to `threads` workers. fn must be safe to run
/// concurrently on distinct indices.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace galmono

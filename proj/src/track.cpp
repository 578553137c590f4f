#include "track.hpp"

#include <atomic>
#include <functional>
#include <thread>

#include <Eigen/LU>

namespace galmono {

const char* to_string(PathStatus s) {
  switch (s) {
    case PathStatus::Success: return "Success";
    case PathStatus::StepLimitExceeded: return "StepLimitExceeded";
    case PathStatus::MinStepReached: return "MinStepReached";
    case PathStatus::CorrectorDiverged: return "CorrectorDiverged";
    case PathStatus::IllConditioned: return "IllConditioned";
  }
  return "?";
}

namespace {

// Cheap condition estimate from the LU factors: ratio of extreme |U_ii|.
double cond_estimate(const Eigen::PartialPivLU<CMat>& lu) {
  const auto& u = lu.matrixLU();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double d = std::abs(u(i, i));
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (lo == 0.0 || !std::isfinite(hi)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

}  // namespace

NewtonOutcome newton_correct(const CompiledSystem& sys, const CVec& x,
                             const CVec& z, double tol, int max_iters,
                             double cond_abort, CompiledSystem::Workspace* ws) {
  CompiledSystem::Workspace local;
  if (!ws) {
    local = sys.make_workspace();
    ws = &local;
  }
  NewtonOutcome out;
  out.x = x;
  for (int it = 0; it < max_iters; ++it) {
    if (!sys.try_eval_with_jx(out.x, z, *ws)) {
      out.status = NewtonStatus::Diverged;
      return out;
    }
    Eigen::PartialPivLU<CMat> lu(ws->jx);
    if (cond_estimate(lu) > cond_abort) {
      out.status = NewtonStatus::Singular;
      return out;
    }
    CVec delta = lu.solve(ws->f);
    if (!is_finite(delta)) {
      out.status = NewtonStatus::Singular;
      return out;
    }
    out.x -= delta;
    out.last_update = inf_norm(delta);
    out.iters = it + 1;
    if (out.last_update <= tol) {
      out.status = NewtonStatus::Converged;
      return out;
    }
  }
  out.status = NewtonStatus::Diverged;
  return out;
}

namespace {

// Davidenko right-hand side: solves d_x F . k = -d_z F . dz at (x, z(t)).
bool davidenko_rhs(const CompiledSystem& sys, const CVec& x, const CVec& z0,
                   const CVec& dz, double t, double cond_abort,
                   CompiledSystem::Workspace& ws, CVec& k) {
  CVec z = z0 + t * dz;
  if (!sys.try_eval_full(x, z, ws)) return false;
  Eigen::PartialPivLU<CMat> lu(ws.jx);
  if (cond_estimate(lu) > cond_abort) return false;
  k = lu.solve(-(ws.jz * dz));
  return is_finite(k);
}

}  // namespace

PathOutcome track_segment(const CompiledSystem& sys, const CVec& x0,
                          const CVec& z0, const CVec& z1,
                          const TrackSettings& st,
                          CompiledSystem::Workspace* ws) {
  CompiledSystem::Workspace local;
  if (!ws) {
    local = sys.make_workspace();
    ws = &local;
  }
  PathOutcome out;
  out.smallest_step_used = st.initial_step;

  const CVec dz = z1 - z0;
  CVec x = x0;
  double t = 0.0;
  double h = st.initial_step;
  int accepts_in_a_row = 0;

  CVec k1, k2, k3, k4;
  while (t < 1.0) {
    if (out.steps_taken >= st.max_steps) {
      out.status = PathStatus::StepLimitExceeded;
      return out;
    }
    double step = std::min(h, 1.0 - t);
    ++out.steps_taken;
    out.smallest_step_used = std::min(out.smallest_step_used, step);

    // RK4 predictor on the Davidenko ODE
    bool pred_ok =
        davidenko_rhs(sys, x, z0, dz, t, st.jacobian_cond_abort, *ws, k1) &&
        davidenko_rhs(sys, x + (step / 2) * k1, z0, dz, t + step / 2,
                      st.jacobian_cond_abort, *ws, k2) &&
        davidenko_rhs(sys, x + (step / 2) * k2, z0, dz, t + step / 2,
                      st.jacobian_cond_abort, *ws, k3) &&
        davidenko_rhs(sys, x + step * k3, z0, dz, t + step,
                      st.jacobian_cond_abort, *ws, k4);

    bool accepted = false;
    if (pred_ok) {
      CVec xp = x + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      CVec zt = z0 + (t + step) * dz;
      NewtonOutcome nw = newton_correct(sys, xp, zt, st.corrector_tol,
                                        st.max_corrector_iters,
                                        st.jacobian_cond_abort, ws);
      if (nw.status == NewtonStatus::Singular && step <= st.min_step * (1 + 1e-12)) {
        out.status = PathStatus::IllConditioned;
        return out;
      }
      if (nw.ok()) {
        x = nw.x;
        t += step;
        accepted = true;
      }
    }

    if (accepted) {
      if (++accepts_in_a_row >= 4) {
        h = std::min(h * st.step_expand, st.max_step);
        accepts_in_a_row = 0;
      }
    } else {
      accepts_in_a_row = 0;
      if (h <= st.min_step * (1 + 1e-12)) {
        out.status = PathStatus::MinStepReached;
        return out;
      }
      h = std::max(h * st.step_shrink, st.min_step);
    }
  }

  // final polish at z1; Success demands the endpoint residual invariant
  NewtonOutcome polish = newton_correct(sys, x, z1, st.corrector_tol,
                                        st.max_corrector_iters + 1,
                                        st.jacobian_cond_abort, ws);
  if (polish.ok()) x = polish.x;
  if (!sys.try_eval(x, z1, *ws)) {
    out.status = PathStatus::CorrectorDiverged;
    return out;
  }
  if (inf_norm(ws->f) > 10.0 * st.corrector_tol) {
    out.status = PathStatus::CorrectorDiverged;
    return out;
  }
  out.status = PathStatus::Success;
  out.x_end = x;
  return out;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  int workers = std::min(threads, count);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<PathOutcome> track_many(const CompiledSystem& sys,
                                    const std::vector<CVec>& fiber_points,
                                    const CVec& z0, const CVec& z1,
                                    const TrackSettings& settings, int threads) {
  std::vector<PathOutcome> out(fiber_points.size());
  parallel_for(static_cast<int>(fiber_points.size()), threads, [&](int i) {
    out[i] = track_segment(sys, fiber_points[i], z0, z1, settings);
  });
  return out;
}

}  // namespace galmono

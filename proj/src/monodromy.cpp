#include "monodromy.hpp"

#include <algorithm>

namespace galmono {

LoopSpec random_loop(const CVec& z_star, Rng& rng, double scale) {
  const int m = static_cast<int>(z_star.size());
  LoopSpec loop;
  loop.waypoints.push_back(z_star);
  loop.waypoints.push_back(z_star + scale * rng.cgauss_vec(m));
  loop.waypoints.push_back(z_star + scale * rng.cgauss_vec(m));
  loop.waypoints.push_back(z_star);
  return loop;
}

namespace {

double rel_dist(const CVec& a, const CVec& b) {
  return inf_norm(a - b) / std::max(1.0, inf_norm(b));
}

double loop_scale(const EngineSettings& s, const CVec& z_star) {
  return s.loop_scale_factor * (1.0 + inf_norm(z_star));
}

}  // namespace

std::optional<int> match_point(const FiberState& fiber, const CVec& x) {
  int found = -1;
  for (int i = 0; i < fiber.size(); ++i) {
    if (rel_dist(x, fiber.solutions[i]) <= fiber.matching_tol) {
      if (found >= 0)
        fail(ErrorCode::AmbiguousMatch,
             "point matches fiber solutions " + std::to_string(found + 1) +
                 " and " + std::to_string(i + 1));
      found = i;
    }
  }
  if (found < 0) return std::nullopt;
  return found;
}

std::vector<std::optional<CVec>> track_loop(const CompiledSystem& sys,
                                            const std::vector<CVec>& points,
                                            const LoopSpec& loop,
                                            const EngineSettings& settings) {
  std::vector<std::optional<CVec>> current(points.size());
  for (size_t i = 0; i < points.size(); ++i) current[i] = points[i];

  for (int seg = 0; seg < loop.segments(); ++seg) {
    std::vector<CVec> live;
    std::vector<size_t> live_idx;
    for (size_t i = 0; i < current.size(); ++i) {
      if (current[i]) {
        live.push_back(*current[i]);
        live_idx.push_back(i);
      }
    }
    auto outcomes = track_many(sys, live, loop.waypoints[seg],
                               loop.waypoints[seg + 1], settings.track,
                               settings.threads);
    for (size_t j = 0; j < live.size(); ++j) {
      if (outcomes[j].ok())
        current[live_idx[j]] = outcomes[j].x_end;
      else
        current[live_idx[j]] = std::nullopt;
    }
  }

  // polish back over the base point so matching sees full accuracy
  for (auto& pt : current) {
    if (!pt) continue;
    NewtonOutcome nw = newton_correct(sys, *pt, loop.waypoints.front(),
                                      settings.track.corrector_tol, 6,
                                      settings.track.jacobian_cond_abort);
    if (nw.ok())
      pt = nw.x;
    else
      pt = std::nullopt;
  }
  return current;
}

FiberState complete_fiber(const CompiledSystem& sys, const SeedPair& seed,
                          const EngineSettings& settings, Rng& rng,
                          std::optional<int> expected_degree) {
  FiberState fiber;
  fiber.z_star = seed.z_star;
  fiber.matching_tol = settings.matching_tol;
  fiber.target_degree = expected_degree;

  // polish the seed and insist on the SeedPair invariants
  NewtonOutcome polished = newton_correct(sys, seed.x_star, seed.z_star,
                                          settings.track.corrector_tol, 8,
                                          settings.track.jacobian_cond_abort);
  CVec x0 = polished.ok() ? polished.x : seed.x_star;
  auto ws = sys.make_workspace();
  sys.eval(x0, seed.z_star, ws);
  if (inf_norm(ws.f) > settings.residual_tol)
    fail(ErrorCode::InvalidArgument, "complete_fiber: seed residual too large");
  fiber.solutions.push_back(x0);

  const double scale = loop_scale(settings, fiber.z_star);
  // when stalls accumulate, cycle the waypoint scale to vary the loop
  // geometry (deterministic given the rng)
  static constexpr double kScaleCycle[] = {1.0, 0.5, 2.0, 0.25, 4.0};
  int stalled = 0;
  int loops = 0;
  while (loops < settings.max_loops) {
    if (expected_degree && fiber.size() == *expected_degree) break;
    if (!expected_degree && stalled >= settings.stall_limit) break;
    ++loops;
    double mult = kScaleCycle[(stalled / std::max(1, settings.stall_limit)) % 5];
    LoopSpec loop = random_loop(fiber.z_star, rng, mult * scale);
    auto endpoints = track_loop(sys, fiber.solutions, loop, settings);
    int found = 0;
    for (const auto& pt : endpoints) {
      if (!pt) continue;
      if (match_point(fiber, *pt)) continue;
      // new solution: verify residual before inserting
      sys.eval(*pt, fiber.z_star, ws);
      if (inf_norm(ws.f) > settings.residual_tol) continue;
      fiber.solutions.push_back(*pt);
      ++found;
      if (expected_degree && fiber.size() == *expected_degree) break;
    }
    stalled = found ? 0 : stalled + 1;
  }

  if (expected_degree) {
    if (fiber.size() != *expected_degree)
      fail(ErrorCode::FiberIncomplete,
           "fiber completion stalled at " + std::to_string(fiber.size()) +
               " of " + std::to_string(*expected_degree) + " solutions after " +
               std::to_string(loops) + " loops");
    fiber.complete = true;
  } else {
    // no declared degree: stall-based stop, completeness is heuristic
    fiber.complete = true;
  }
  return fiber;
}

MonodromySample harvest_permutations(const CompiledSystem& sys,
                                     const FiberState& fiber, int k, Rng& rng,
                                     const EngineSettings& settings,
                                     const HarvestSettings& harvest) {
  if (!fiber.complete)
    fail(ErrorCode::InvalidArgument, "harvest_permutations requires a complete fiber");
  MonodromySample sample;
  sample.degree = fiber.size();

  const double scale = loop_scale(settings, fiber.z_star);
  const int max_attempts = 10 * k;
  int attempts = 0;
  BigInt last_order = -1;
  int stable = 0;

  while (static_cast<int>(sample.permutations.size()) < k) {
    if (attempts >= max_attempts)
      fail(ErrorCode::TooManyDiscards,
           "discarded " + std::to_string(sample.loops_discarded) + " of " +
               std::to_string(attempts) +
               " loops; tolerances or base point look bad");
    ++attempts;
    LoopSpec loop = random_loop(fiber.z_star, rng, scale);
    auto endpoints = track_loop(sys, fiber.solutions, loop, settings);

    std::vector<int> images(fiber.size(), -1);
    std::vector<bool> taken(fiber.size(), false);
    bool ok = true;
    for (int i = 0; i < fiber.size() && ok; ++i) {
      if (!endpoints[i]) {
        ok = false;
        break;
      }
      auto idx = match_point(fiber, *endpoints[i]);
      if (!idx || taken[*idx]) {
        ok = false;  // unmatched endpoint or index collision
        break;
      }
      images[i] = *idx;
      taken[*idx] = true;
    }
    if (!ok) {
      ++sample.loops_discarded;
      continue;
    }
    sample.permutations.push_back(Permutation::from_images(std::move(images)));
    ++sample.loops_used;

    if (harvest.stabilize) {
      PermGroup g(fiber.size(), sample.permutations);
      BigInt order = g.order();
      stable = (order == last_order) ? stable + 1 : 0;
      last_order = order;
      if (stable >= harvest.stable_window) break;
    }
  }
  return sample;
}

DeckCheck verify_deck_formula(
    const CompiledSystem& sys, const FiberState& fiber, const std::string& name,
    const std::function<CVec(const CVec&, const CVec&)>& deck,
    double residual_tol) {
  if (!fiber.complete)
    fail(ErrorCode::InvalidArgument, "verify_deck_formula requires a complete fiber");
  DeckCheck check;
  check.name = name;
  auto ws = sys.make_workspace();

  std::vector<int> images(fiber.size(), -1);
  for (int i = 0; i < fiber.size(); ++i) {
    CVec image = deck(fiber.solutions[i], fiber.z_star);
    sys.eval(image, fiber.z_star, ws);
    double res = inf_norm(ws.f);
    check.residuals.push_back(res);
    check.max_residual = std::max(check.max_residual, res);
    if (res > residual_tol)
      fail(ErrorCode::DeckResidualLarge,
           name + ": image of solution " + std::to_string(i + 1) +
               " has residual " + std::to_string(res));
    auto idx = match_point(fiber, image);
    if (!idx)
      fail(ErrorCode::DeckImageUnmatched,
           name + ": image of solution " + std::to_string(i + 1) +
               " matches no fiber point (matching_tol alarm)");
    images[i] = *idx;
    check.images.push_back(*idx);
  }

  std::vector<bool> taken(fiber.size(), false);
  check.is_permutation = true;
  for (int v : images) {
    if (taken[v]) check.is_permutation = false;
    taken[v] = true;
  }
  if (check.is_permutation) {
    check.induced = Permutation::from_images(images);
    check.is_involution =
        check.induced.then(check.induced).is_identity() && !check.induced.is_identity();
    check.fixed_point_free = true;
    for (int i = 0; i < fiber.size(); ++i)
      if (images[i] == i) check.fixed_point_free = false;
  }
  return check;
}

}  // namespace galmono

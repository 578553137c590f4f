#pragma once

#include <optional>

#include "perm.hpp"
#include "rng.hpp"
#include "track.hpp"

namespace galmono {

/// Triangle loop in parameter space: [z*, w1, w2, z*] with the two interior
/// waypoints drawn from a complex Gaussian centered at z*.
struct LoopSpec {
  std::vector<CVec> waypoints;

  int segments() const { return static_cast<int>(waypoints.size()) - 1; }
};

LoopSpec random_loop(const CVec& z_star, Rng& rng, double scale);

/// Base parameter point with the deduplicated solution list over it; the
/// set the monodromy group permutes.
struct FiberState {
  CVec z_star;
  std::vector<CVec> solutions;
  double matching_tol = 1e-6;  // relative to solution norm
  bool complete = false;
  std::optional<int> target_degree;

  int size() const { return static_cast<int>(solutions.size()); }
};

struct EngineSettings {
  TrackSettings track;
  double matching_tol = 1e-6;
  double residual_tol = 1e-10;   // solutions over z* after Newton polish
  double loop_scale_factor = 1.0;  // waypoint scale = factor * (1 + |z*|_inf)
  int stall_limit = 10;   // consecutive no-discovery loops before giving up
  int max_loops = 200;    // overall completion budget
  int threads = 1;
};

/// Index of the unique solution within matching_tol of x, or nullopt.
/// Throws AmbiguousMatch when two stored solutions are both within
/// tolerance (matching_tol too loose or fiber corrupted).
std::optional<int> match_point(const FiberState& fiber, const CVec& x);

/// Tracks every point around the loop; entries that fail on any segment
/// come back as nullopt. Successful endpoints are Newton-polished over the
/// base point.
std::vector<std::optional<CVec>> track_loop(const CompiledSystem& sys,
                                            const std::vector<CVec>& points,
                                            const LoopSpec& loop,
                                            const EngineSettings& settings);

/// Completes the fiber over seed.z_star from the single seed solution by
/// running monodromy loops and inserting unseen endpoints. Stops at
/// expected_degree when provided; throws FiberIncomplete when it cannot get
/// there within the loop budget.
FiberState complete_fiber(const CompiledSystem& sys, const SeedPair& seed,
                          const EngineSettings& settings, Rng& rng,
                          std::optional<int> expected_degree);

struct MonodromySample {
  int degree = 0;
  std::vector<Permutation> permutations;
  uint64_t rng_seed = 0;  // seed of the analysis for replay
  int loops_used = 0;
  int loops_discarded = 0;
};

struct HarvestSettings {
  bool stabilize = false;   // stop once the generated group's order is
                            // unchanged for stable_window accepted loops
  int stable_window = 5;
};

/// Generates loops until k of them have every path succeed and every
/// endpoint matched; a loop with any failure, unmatched endpoint or index
/// collision is discarded. Throws TooManyDiscards when 10*k attempts do not
/// produce k clean loops.
MonodromySample harvest_permutations(const CompiledSystem& sys,
                                     const FiberState& fiber, int k, Rng& rng,
                                     const EngineSettings& settings,
                                     const HarvestSettings& harvest = {});

struct DeckCheck {
  std::string name;
  Permutation induced;   // index map on the fiber
  bool is_permutation = false;
  bool is_involution = false;
  bool fixed_point_free = false;
  double max_residual = 0.0;
  std::vector<int> images;        // matched fiber index per solution (1-based in reports)
  std::vector<double> residuals;  // ||F(image; z*)||_inf per solution
};

/// Applies a closed-form deck map to every fiber solution, matches images
/// back into the fiber and reports the induced index map. Throws
/// DeckResidualLarge (image residual > residual_tol) or DeckImageUnmatched.
DeckCheck verify_deck_formula(
    const CompiledSystem& sys, const FiberState& fiber, const std::string& name,
    const std::function<CVec(const CVec&, const CVec&)>& deck,
    double residual_tol = 1e-6);

}  // namespace galmono

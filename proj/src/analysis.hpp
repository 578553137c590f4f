#pragma once

#include <string>
#include <vector>

#include "monodromy.hpp"
#include "problems.hpp"

namespace galmono {

struct AnalysisOptions {
  std::string problem_id;
  uint64_t seed = 0;
  int loops = 24;
  bool verify_deck = false;
  bool stabilize = false;
  bool allow_long = false;
  int threads = 0;  // 0 = auto; always capped by GALMONO_THREADS
  TrackSettings track;
  int stall_limit = 10;
  int max_loops = 200;
  double matching_tol = 1e-6;
};

struct AnalysisResult {
  std::string problem_id;
  uint64_t seed = 0;
  int loops_requested = 0;
  int loops_used = 0;
  int loops_discarded = 0;
  int degree = 0;
  GroupReport group;
  std::vector<Permutation> generators;
  std::vector<DeckCheck> deck_checks;
  std::vector<bool> deck_in_centralizer;  // parallel to deck_checks
  /// pattern match against the catalog's named group (order, parity, block
  /// data); empty when the data disagree
  std::string consistent_with;
  bool matches_expected = false;
  std::vector<std::string> expect_mismatches;
  double wall_seconds = 0.0;
};

/// Full pipeline: sample seed -> complete fiber -> harvest permutations ->
/// structure report (-> deck verification). Deterministic given options.
AnalysisResult run_analysis(const AnalysisOptions& opts);

/// Canonical JSON document for an analysis. Deliberately excludes wall time
/// so replays with the same seed are byte-identical.
std::string report_json(const AnalysisResult& result, int indent = 2);

/// Catalog summary for one problem (id, sizes, expected group data).
std::string problem_info_json(const Problem& problem, int indent = 2);

/// Effective worker count: opts.threads (0 = hardware), capped by the
/// GALMONO_THREADS environment variable when set.
int effective_threads(int requested);

}  // namespace galmono

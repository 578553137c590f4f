#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "monodromy.hpp"

namespace galmono {

/// Closed-form deck transformation: maps a solution vector over fixed
/// parameters to another solution over the same parameters. Throws
/// DeckUndefined on degenerate denominators.
struct DeckMap {
  std::string name;
  std::function<CVec(const CVec& solution, const CVec& z)> apply;
};

/// One concrete, replayable realization of a problem: the square system
/// (random charts and randomized equation mixes baked in), a verified seed
/// and the deck formulas bound to this instance.
struct ProblemInstance {
  SystemSpec system;
  SeedPair seed;
  std::vector<DeckMap> decks;
  std::shared_ptr<const CompiledSystem> compiled;

  const DeckMap* find_deck(const std::string& name) const;
};

/// Catalog expectations used by --expect and the acceptance suite. Orders
/// are decimal strings (they exceed 64-bit range for several problems).
struct ProblemExpected {
  int degree = 0;
  std::string order;
  bool all_even = false;
  bool primitive = false;
  /// multiset of (num_blocks, block_size), sorted by block size then count
  std::vector<std::pair<int, int>> blocks;
  int deck_order = 1;
  std::vector<int> deck_invariants;
  std::string group_name;
};

class Problem {
public:
  using Builder = std::function<ProblemInstance(Rng&)>;

  Problem(std::string id, std::string title, int n, int m, int expected_degree,
          ProblemExpected expected, Builder builder, bool long_running = false)
      : id_(std::move(id)),
        title_(std::move(title)),
        n_(n),
        m_(m),
        expected_degree_(expected_degree),
        expected_(std::move(expected)),
        builder_(std::move(builder)),
        long_running_(long_running) {}

  const std::string& id() const { return id_; }
  const std::string& title() const { return title_; }
  int unknowns() const { return n_; }
  int parameters() const { return m_; }
  int expected_degree() const { return expected_degree_; }
  const ProblemExpected& expected() const { return expected_; }
  bool long_running() const { return long_running_; }

  /// Samples a fresh instance; resamples internally up to 5 times before
  /// failing with DegenerateSample. The returned seed passes
  /// verify_well_constrained.
  ProblemInstance make_instance(Rng& rng) const;

private:
  std::string id_, title_;
  int n_, m_, expected_degree_;
  ProblemExpected expected_;
  Builder builder_;
  bool long_running_;
};

const std::vector<Problem>& catalog();
const Problem* find_problem(const std::string& id);

/// Applies the named deck map; thin wrapper kept for symmetry with
/// verify_deck_formula.
CVec deck_apply(const ProblemInstance& instance, const std::string& name,
                const CVec& solution, const CVec& z);

}  // namespace galmono

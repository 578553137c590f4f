#include "analysis.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <json.hpp>

namespace galmono {

using json = nlohmann::ordered_json;

int effective_threads(int requested) {
  int n = requested;
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("GALMONO_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

namespace {

std::vector<std::pair<int, int>> block_multiset(const GroupReport& g) {
  std::vector<std::pair<int, int>> out;
  for (const auto& bs : g.block_systems)
    out.emplace_back(bs.num_blocks(), bs.block_size());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return out;
}

void compare_expected(AnalysisResult& r, const ProblemExpected& e) {
  auto mismatch = [&](const std::string& what) {
    r.expect_mismatches.push_back(what);
  };
  if (r.degree != e.degree)
    mismatch("degree " + std::to_string(r.degree) + " != " + std::to_string(e.degree));
  if (r.group.order.str() != e.order)
    mismatch("order " + r.group.order.str() + " != " + e.order);
  if (r.group.all_even != e.all_even)
    mismatch(std::string("parity: all_even is ") + (r.group.all_even ? "true" : "false"));
  auto blocks = block_multiset(r.group);
  auto expected_blocks = e.blocks;
  std::sort(expected_blocks.begin(), expected_blocks.end(), [](auto a, auto b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  if (blocks != expected_blocks) {
    std::string got;
    for (auto [k, s] : blocks)
      got += std::to_string(k) + "x" + std::to_string(s) + " ";
    mismatch("block-size multiset {" + got + "} differs from catalog");
  }
  if (r.group.deck_order != e.deck_order)
    mismatch("deck order " + std::to_string(r.group.deck_order) + " != " +
             std::to_string(e.deck_order));
  r.matches_expected = r.expect_mismatches.empty();
  if (r.matches_expected) r.consistent_with = e.group_name;
}

}  // namespace

AnalysisResult run_analysis(const AnalysisOptions& opts) {
  const Problem* problem = find_problem(opts.problem_id);
  if (!problem)
    fail(ErrorCode::UnknownProblem, "unknown problem id: " + opts.problem_id);
  if (problem->long_running() && !opts.allow_long)
    fail(ErrorCode::NeedsAllowLong,
         problem->id() + " is long-running; pass --allow-long to analyze it");

  auto t0 = std::chrono::steady_clock::now();
  AnalysisResult result;
  result.problem_id = problem->id();
  result.seed = opts.seed;
  result.loops_requested = opts.loops;

  Rng rng(opts.seed);
  ProblemInstance inst = problem->make_instance(rng);

  EngineSettings engine;
  engine.track = opts.track;
  engine.matching_tol = opts.matching_tol;
  engine.stall_limit = opts.stall_limit;
  engine.max_loops = opts.max_loops;
  engine.threads = effective_threads(opts.threads);

  FiberState fiber = complete_fiber(*inst.compiled, inst.seed, engine, rng,
                                    problem->expected_degree());
  result.degree = fiber.size();

  HarvestSettings harvest;
  harvest.stabilize = opts.stabilize;
  MonodromySample sample =
      harvest_permutations(*inst.compiled, fiber, opts.loops, rng, engine, harvest);
  sample.rng_seed = opts.seed;
  result.loops_used = sample.loops_used;
  result.loops_discarded = sample.loops_discarded;
  result.generators = sample.permutations;

  PermGroup group(fiber.size(), sample.permutations);
  result.group = structure_report(group);

  if (opts.verify_deck) {
    for (const auto& deck : inst.decks) {
      DeckCheck check = verify_deck_formula(*inst.compiled, fiber, deck.name,
                                            deck.apply);
      bool in_centralizer = false;
      if (check.is_permutation) {
        for (const auto& c : result.group.deck_elements)
          if (c == check.induced) in_centralizer = true;
      }
      result.deck_checks.push_back(std::move(check));
      result.deck_in_centralizer.push_back(in_centralizer);
    }
  }

  compare_expected(result, problem->expected());
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

namespace {

json permutation_json(const Permutation& p) {
  std::vector<int> images;
  images.reserve(p.degree());
  for (int i = 0; i < p.degree(); ++i) images.push_back(p[i] + 1);  // 1-based
  return json{{"cycles", p.cycle_string()}, {"images", images}};
}

json block_system_json(const BlockSystem& bs) {
  std::vector<std::vector<int>> blocks;
  for (const auto& blk : bs.blocks) {
    std::vector<int> b;
    for (int p : blk) b.push_back(p + 1);
    blocks.push_back(std::move(b));
  }
  return json{{"num_blocks", bs.num_blocks()},
              {"block_size", bs.block_size()},
              {"blocks", blocks}};
}

}  // namespace

std::string report_json(const AnalysisResult& r, int indent) {
  json doc;
  doc["tool"] = "galmono";
  doc["version"] = "0.1.0";
  doc["problem"] = r.problem_id;
  doc["seed"] = r.seed;
  doc["loops_requested"] = r.loops_requested;
  doc["loops_used"] = r.loops_used;
  doc["loops_discarded"] = r.loops_discarded;
  doc["degree"] = r.degree;

  json g;
  g["degree"] = r.group.degree;
  g["order"] = r.group.order.str();  // decimal string: exceeds 64-bit range
  g["transitive"] = r.group.transitive;
  g["all_even"] = r.group.all_even;
  g["primitive"] = r.group.primitive;
  g["is_full_symmetric"] = r.group.is_full_symmetric;
  g["is_alternating"] = r.group.is_alternating;
  json systems = json::array();
  for (const auto& bs : r.group.block_systems) systems.push_back(block_system_json(bs));
  g["block_systems"] = systems;
  json edges = json::array();
  for (auto [a, b] : r.group.lattice_edges) edges.push_back(json{{"finer", a}, {"coarser", b}});
  g["lattice_edges"] = edges;
  g["deck_order"] = r.group.deck_order;
  g["deck_abelian"] = r.group.deck_abelian;
  g["deck_abelian_invariants"] = r.group.deck_abelian_invariants;
  json deck_elems = json::array();
  for (const auto& e : r.group.deck_elements)
    if (!e.is_identity()) deck_elems.push_back(permutation_json(e));
  g["deck_elements"] = deck_elems;
  if (!r.consistent_with.empty()) g["consistent_with"] = r.consistent_with;
  doc["group"] = g;

  json gens = json::array();
  for (const auto& p : r.generators) gens.push_back(permutation_json(p));
  doc["generators"] = gens;

  if (!r.deck_checks.empty()) {
    json decks = json::array();
    for (size_t i = 0; i < r.deck_checks.size(); ++i) {
      const auto& c = r.deck_checks[i];
      json d;
      d["name"] = c.name;
      d["is_permutation"] = c.is_permutation;
      d["is_involution"] = c.is_involution;
      d["fixed_point_free"] = c.fixed_point_free;
      d["in_centralizer"] = static_cast<bool>(r.deck_in_centralizer[i]);
      d["max_residual"] = c.max_residual;
      if (c.is_permutation) d["permutation"] = permutation_json(c.induced);
      decks.push_back(d);
    }
    doc["deck_verification"] = decks;
  }

  doc["matches_expected"] = r.matches_expected;
  if (!r.expect_mismatches.empty()) doc["expect_mismatches"] = r.expect_mismatches;
  return doc.dump(indent);
}

std::string problem_info_json(const Problem& p, int indent) {
  json doc;
  doc["id"] = p.id();
  doc["title"] = p.title();
  doc["unknowns"] = p.unknowns();
  doc["parameters"] = p.parameters();
  doc["expected_degree"] = p.expected_degree();
  doc["long_running"] = p.long_running();
  const auto& e = p.expected();
  json exp;
  exp["order"] = e.order;
  exp["all_even"] = e.all_even;
  exp["primitive"] = e.primitive;
  json blocks = json::array();
  for (auto [k, s] : e.blocks) blocks.push_back(json{{"num_blocks", k}, {"block_size", s}});
  exp["block_systems"] = blocks;
  exp["deck_order"] = e.deck_order;
  exp["deck_abelian_invariants"] = e.deck_invariants;
  exp["group"] = e.group_name;
  doc["expected"] = exp;
  return doc.dump(indent);
}

}  // namespace galmono

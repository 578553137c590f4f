// Command-line front end for the galmono shared library. Talks to the core
// exclusively through the C API in galmono/galmono.h.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "galmono/galmono.h"

namespace {

using nlohmann::json;

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { gm_string_free(s); }
};

int exit_code_for(gm_status st) {
  switch (st) {
    case GM_OK: return 0;
    case GM_FIBER_INCOMPLETE: return 2;
    case GM_TOO_MANY_DISCARDS: return 3;
    case GM_EXPECT_MISMATCH: return 4;
    default: return 1;
  }
}

int cmd_list() {
  const int count = gm_problem_count();
  std::cout << count << " problems in the catalog:\n\n";
  for (int i = 0; i < count; ++i) {
    StringGuard info;
    if (gm_problem_info_json(gm_problem_id(i), &info.s) != GM_OK) continue;
    json doc = json::parse(info.s);
    std::cout << "  " << doc["id"].get<std::string>();
    for (size_t pad = doc["id"].get<std::string>().size(); pad < 24; ++pad)
      std::cout << ' ';
    std::cout << "n=" << doc["unknowns"] << " m=" << doc["parameters"]
              << "  degree " << doc["expected_degree"] << "  group "
              << doc["expected"]["group"].get<std::string>() << " (order "
              << doc["expected"]["order"].get<std::string>() << ")";
    if (doc["long_running"].get<bool>()) std::cout << "  [--allow-long]";
    std::cout << "\n";
  }
  return 0;
}

void print_summary(const json& doc, bool show_blocks) {
  const auto& g = doc["group"];
  std::cout << "problem:   " << doc["problem"].get<std::string>() << "\n"
            << "seed:      " << doc["seed"] << "\n"
            << "degree:    " << doc["degree"] << "\n"
            << "order:     " << g["order"].get<std::string>() << "\n"
            << "transitive " << g["transitive"] << ", all even " << g["all_even"]
            << ", primitive " << g["primitive"] << "\n";
  if (g.contains("consistent_with"))
    std::cout << "consistent with " << g["consistent_with"].get<std::string>() << "\n";
  std::cout << "block systems: ";
  if (g["block_systems"].empty()) {
    std::cout << "none (primitive)\n";
  } else {
    for (const auto& bs : g["block_systems"])
      std::cout << bs["num_blocks"] << "x" << bs["block_size"] << " ";
    std::cout << "\n";
  }
  if (show_blocks) {
    for (const auto& bs : g["block_systems"]) {
      std::cout << "  system " << bs["num_blocks"] << "x" << bs["block_size"] << ": ";
      for (const auto& blk : bs["blocks"]) std::cout << blk.dump() << " ";
      std::cout << "\n";
    }
  }
  std::cout << "deck group: order " << g["deck_order"];
  if (!g["deck_abelian_invariants"].empty())
    std::cout << ", invariants " << g["deck_abelian_invariants"].dump();
  std::cout << "\n";
  std::cout << "loops: " << doc["loops_used"] << " used, "
            << doc["loops_discarded"] << " discarded\n";
  if (doc.contains("deck_verification")) {
    for (const auto& d : doc["deck_verification"]) {
      std::cout << "deck " << d["name"].get<std::string>() << ": "
                << (d["is_involution"].get<bool>() ? "involution" : "NOT involution")
                << ", "
                << (d["fixed_point_free"].get<bool>() ? "fixed-point-free" : "HAS fixed points")
                << ", "
                << (d["in_centralizer"].get<bool>() ? "in centralizer" : "NOT in centralizer")
                << ", max residual " << d["max_residual"] << "\n";
      if (d.contains("permutation"))
        std::cout << "       " << d["permutation"]["cycles"].get<std::string>() << "\n";
    }
  }
}

int run_analysis_command(const std::string& id, const gm_options& opts,
                         const std::string& json_path, bool expect,
                         bool show_blocks, bool quiet_summary) {
  gm_analysis* analysis = nullptr;
  StringGuard err;
  gm_status st = gm_analyze(id.c_str(), &opts, &analysis, &err.s);
  if (st != GM_OK) {
    std::cerr << "error: " << (err.s ? err.s : "analysis failed") << "\n";
    return exit_code_for(st);
  }

  StringGuard report;
  if (gm_analysis_json(analysis, &report.s) != GM_OK) {
    gm_analysis_free(analysis);
    std::cerr << "error: could not serialize report\n";
    return 1;
  }
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write " << json_path << "\n";
      gm_analysis_free(analysis);
      return 1;
    }
    out << report.s << "\n";
  }

  json doc = json::parse(report.s);
  if (!quiet_summary) {
    print_summary(doc, show_blocks);
    std::cout << "wall time: " << gm_analysis_wall_seconds(analysis) << " s\n";
  }

  int code = 0;
  if (expect && !gm_analysis_matches_expected(analysis)) {
    StringGuard mism;
    if (gm_analysis_mismatches_json(analysis, &mism.s) == GM_OK && mism.s)
      std::cerr << "expectation mismatches: " << mism.s << "\n";
    code = exit_code_for(GM_EXPECT_MISMATCH);
  } else if (expect) {
    std::cout << "matches catalog expectations\n";
  }
  gm_analysis_free(analysis);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"galmono: numerical Galois/monodromy groups of minimal problems"};
  app.require_subcommand(1);

  app.add_subcommand("list", "print the problem catalog");

  std::string id, json_path;
  gm_options opts;
  gm_options_init(&opts);
  uint64_t seed = 0;
  int loops = 24, threads = 0, max_steps = 0;
  double initial_step = 0, min_step = 0, max_step = 0, corrector_tol = 0;
  bool expect = false, verify_deck = false, blocks = false, allow_long = false,
       stabilize = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("problem", id, "problem id (see `galmono list`)")->required();
    cmd->add_option("--seed", seed, "64-bit RNG seed (default 0)");
    cmd->add_option("--loops", loops, "monodromy loops to harvest (default 24)");
    cmd->add_option("--threads", threads, "worker threads (0 = auto)");
    cmd->add_option("--initial-step", initial_step, "tracker initial step");
    cmd->add_option("--min-step", min_step, "tracker minimum step");
    cmd->add_option("--max-step", max_step, "tracker maximum step");
    cmd->add_option("--corrector-tol", corrector_tol, "Newton corrector tolerance");
    cmd->add_option("--max-steps", max_steps, "tracker step limit per segment");
    cmd->add_flag("--allow-long", allow_long, "permit long-running problems");
    cmd->add_flag("--stabilize", stabilize,
                  "stop once the group order is stable for 5 loops");
  };

  auto* analyze = app.add_subcommand("analyze", "compute the monodromy group");
  add_common(analyze);
  analyze->add_option("--json", json_path, "write the JSON report to this path");
  analyze->add_flag("--expect", expect, "exit 4 unless the report matches the catalog");
  analyze->add_flag("--verify-deck", verify_deck, "verify closed-form deck maps");
  analyze->add_flag("--blocks", blocks, "print full block systems");

  auto* deck = app.add_subcommand("verify-deck",
                                  "verify the problem's closed-form deck maps");
  add_common(deck);

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list")) return cmd_list();

  opts.seed = seed;
  opts.loops = loops;
  opts.threads = threads;
  opts.allow_long = allow_long ? 1 : 0;
  opts.stabilize = stabilize ? 1 : 0;
  opts.initial_step = initial_step;
  opts.min_step = min_step;
  opts.max_step = max_step;
  opts.corrector_tol = corrector_tol;
  opts.max_steps = max_steps;

  if (app.got_subcommand("verify-deck")) {
    opts.verify_deck = 1;
    return run_analysis_command(id, opts, "", false, false, false);
  }

  opts.verify_deck = verify_deck ? 1 : 0;
  return run_analysis_command(id, opts, json_path, expect, blocks, false);
}

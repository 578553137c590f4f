#include "galmono/galmono.h"

#include <cstring>
#include <new>

#include <json.hpp>

#include "analysis.hpp"

using namespace galmono;

struct gm_analysis {
  AnalysisResult result;
};

namespace {

char* dup_string(const std::string& s) {
  char* out = new (std::nothrow) char[s.size() + 1];
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

gm_status map_error(const Error& e) {
  switch (e.code()) {
    case ErrorCode::FiberIncomplete: return GM_FIBER_INCOMPLETE;
    case ErrorCode::TooManyDiscards: return GM_TOO_MANY_DISCARDS;
    case ErrorCode::UnknownProblem: return GM_UNKNOWN_PROBLEM;
    case ErrorCode::InvalidArgument: return GM_INVALID_ARGUMENT;
    case ErrorCode::NeedsAllowLong: return GM_NEEDS_ALLOW_LONG;
    case ErrorCode::DegenerateSample: return GM_DEGENERATE_SAMPLE;
    case ErrorCode::EvaluationOverflow:
    case ErrorCode::SingularJacobian:
    case ErrorCode::RandomMatrixSingular:
    case ErrorCode::AmbiguousMatch:
    case ErrorCode::DeckUndefined:
    case ErrorCode::DeckImageUnmatched:
    case ErrorCode::DeckResidualLarge:
      return GM_NUMERICAL_ERROR;
    default: return GM_ERROR;
  }
}

void set_message(char** slot, const std::string& msg) {
  if (slot) *slot = dup_string(msg);
}

}  // namespace

extern "C" {

void gm_options_init(gm_options* opts) {
  if (!opts) return;
  std::memset(opts, 0, sizeof(*opts));
  opts->loops = 24;
}

const char* gm_version(void) { return "0.1.0"; }

int gm_problem_count(void) { return static_cast<int>(catalog().size()); }

const char* gm_problem_id(int index) {
  const auto& cat = catalog();
  if (index < 0 || index >= static_cast<int>(cat.size())) return nullptr;
  return cat[static_cast<size_t>(index)].id().c_str();
}

gm_status gm_problem_info_json(const char* id, char** out_json) {
  if (!id || !out_json) return GM_INVALID_ARGUMENT;
  const Problem* p = find_problem(id);
  if (!p) return GM_UNKNOWN_PROBLEM;
  *out_json = dup_string(problem_info_json(*p));
  return *out_json ? GM_OK : GM_ERROR;
}

gm_status gm_analyze(const char* problem_id, const gm_options* opts,
                     gm_analysis** out, char** error_message) {
  if (error_message) *error_message = nullptr;
  if (!problem_id || !out) {
    set_message(error_message, "problem_id and out must be non-NULL");
    return GM_INVALID_ARGUMENT;
  }
  *out = nullptr;

  AnalysisOptions options;
  options.problem_id = problem_id;
  if (opts) {
    options.seed = opts->seed;
    if (opts->loops > 0) options.loops = opts->loops;
    options.threads = opts->threads;
    options.verify_deck = opts->verify_deck != 0;
    options.allow_long = opts->allow_long != 0;
    options.stabilize = opts->stabilize != 0;
    if (opts->initial_step > 0) options.track.initial_step = opts->initial_step;
    if (opts->min_step > 0) options.track.min_step = opts->min_step;
    if (opts->max_step > 0) options.track.max_step = opts->max_step;
    if (opts->corrector_tol > 0) options.track.corrector_tol = opts->corrector_tol;
    if (opts->max_steps > 0) options.track.max_steps = opts->max_steps;
  }

  try {
    auto* handle = new gm_analysis{run_analysis(options)};
    *out = handle;
    return GM_OK;
  } catch (const Error& e) {
    set_message(error_message, e.what());
    return map_error(e);
  } catch (const std::exception& e) {
    set_message(error_message, e.what());
    return GM_ERROR;
  }
}

gm_status gm_analysis_json(const gm_analysis* a, char** out_json) {
  if (!a || !out_json) return GM_INVALID_ARGUMENT;
  try {
    *out_json = dup_string(report_json(a->result));
    return *out_json ? GM_OK : GM_ERROR;
  } catch (const std::exception&) {
    return GM_ERROR;
  }
}

int gm_analysis_matches_expected(const gm_analysis* a) {
  return (a && a->result.matches_expected) ? 1 : 0;
}

gm_status gm_analysis_mismatches_json(const gm_analysis* a, char** out_json) {
  if (!a || !out_json) return GM_INVALID_ARGUMENT;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : a->result.expect_mismatches) arr.push_back(m);
  *out_json = dup_string(arr.dump(2));
  return *out_json ? GM_OK : GM_ERROR;
}

double gm_analysis_wall_seconds(const gm_analysis* a) {
  return a ? a->result.wall_seconds : 0.0;
}

void gm_analysis_free(gm_analysis* a) { delete a; }

void gm_string_free(char* s) { delete[] s; }

}  // extern "C"

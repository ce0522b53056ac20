#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "lexsimp/control_tokens.hpp"
#include "lexsimp/generation.hpp"
#include "lexsimp/metrics.hpp"
#include "lexsimp/random.hpp"
#include "lexsimp/serializer.hpp"

namespace lexsimp {

/// WL/WR/WS/SS values held fixed across a whole evaluation set. CR is not
/// searched and is always 1.00.
struct TokenValueSet {
  GridValue wl, wr, ws, ss;

  static constexpr std::uint32_t kGridPoints =
      GridValue::kLevels * GridValue::kLevels * GridValue::kLevels * GridValue::kLevels;

  static TokenValueSet defaults() { return {}; }
  /// Mixed-radix index over the 31^4 grid.
  static TokenValueSet from_index(std::uint32_t index);
  std::uint32_t index() const;

  bool valid() const { return wl.on_grid() && wr.on_grid() && ws.on_grid() && ss.on_grid(); }
  TokenVector to_token_vector() const;

  bool operator==(const TokenValueSet&) const = default;
};

class TokenSampler {
 public:
  virtual ~TokenSampler() = default;
  virtual std::string id() const = 0;
  virtual TokenValueSet next() = 0;
};

/// Uniform over the grid, seeded, without replacement until the grid is
/// exhausted. With `anchor_default` the first draw is the all-1.00 set (the
/// validation default) and the uniform draws follow.
class UniformGridSampler final : public TokenSampler {
 public:
  UniformGridSampler(std::uint64_t seed, bool anchor_default);
  std::string id() const override { return "uniform"; }
  TokenValueSet next() override;

 private:
  Rng rng_;
  bool anchor_pending_;
  std::unordered_set<std::uint32_t> used_;
};

/// Fixed per-run evaluation settings.
struct EvaluationSetup {
  SerializationOptions options;
  /// MLM candidates per instance id; instances without an entry get none.
  std::map<std::string, std::vector<std::string>> mlm_candidates;
  int beam_width = kDefaultBeamWidth;
  std::size_t limit = kDefaultCandidateLimit;
  int jobs = 1;
};

struct TokenSetEvaluation {
  MetricReport report;
  Predictions predictions;
  std::vector<std::string> failures;  // one diagnostic per failed instance
};

/// Serializes every instance with `set` (CR 1.00), generates, filters and
/// scores. A failing instance is scored as an empty prediction.
TokenSetEvaluation evaluate_token_set(const std::vector<Instance>& instances,
                                      const TokenValueSet& set, const GeneratorBackend& backend,
                                      const EvaluationSetup& setup = {});

struct Trial {
  std::size_t index = 0;
  TokenValueSet set;
  std::optional<Ratio> objective;  // ACC@1@Top1; empty when the trial failed
  std::string error;

  bool operator==(const Trial&) const = default;
};

struct SearchConfig {
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  bool anchor_default = true;
  std::size_t top_count = 10;
};

struct SearchResult {
  std::vector<Trial> trials;
  std::vector<Trial> top_sets;  // objective descending, earlier trial first on ties
  std::uint64_t seed = 0;
  std::size_t trial_budget = 0;

  bool operator==(const SearchResult&) const = default;
  /// Best set by validation objective; nullopt when every trial failed.
  std::optional<TokenValueSet> best() const;
};

/// Objective of one set: ACC@1@Top1 over the validation instances. Any
/// backend error aborts the trial.
Ratio search_objective(const std::vector<Instance>& validation, const TokenValueSet& set,
                       const GeneratorBackend& backend, const EvaluationSetup& setup);

/// Called after each trial, in trial order.
using TrialSink = std::function<void(const Trial&)>;

/// `previous` holds trials recovered from a log of an interrupted run with
/// the same seed; they are replayed through the sampler (and must match it)
/// instead of being re-evaluated.
SearchResult run_search(const std::vector<Instance>& validation, const GeneratorBackend& backend,
                        const SearchConfig& config, const EvaluationSetup& setup = {},
                        const TrialSink& sink = {}, const std::vector<Trial>& previous = {});

/// Search log: a header line, then one JSON object per trial.
std::string format_log_header(const SearchConfig& config);
std::string format_log_trial(const Trial& trial);
struct SearchLog {
  SearchConfig config;
  std::vector<Trial> trials;
};
SearchLog read_search_log(const std::filesystem::path& path);

}  // namespace lexsimp

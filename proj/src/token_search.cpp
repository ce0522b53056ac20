#include "lexsimp/token_search.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "lexsimp/parallel.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp {

namespace {

constexpr std::uint32_t kLevels = GridValue::kLevels;

const std::vector<std::string>& mlm_for(const EvaluationSetup& setup, const Instance& inst) {
  static const std::vector<std::string> kNone;
  auto it = setup.mlm_candidates.find(inst.id);
  return it == setup.mlm_candidates.end() ? kNone : it->second;
}

// Candidates for one instance; throws on backend failure.
std::vector<std::string> predict_one(const Instance& inst, const TokenVector& tokens,
                                     const GeneratorBackend& backend,
                                     const EvaluationSetup& setup) {
  const auto source = build_eval_source(inst, tokens, mlm_for(setup, inst), setup.options);
  return generate_candidates(inst, backend, source, setup.beam_width, setup.limit).candidates;
}

}  // namespace

TokenValueSet TokenValueSet::from_index(std::uint32_t index) {
  if (index >= kGridPoints) throw std::out_of_range("token grid index out of range");
  TokenValueSet s;
  s.ss = GridValue::level(static_cast<int>(index % kLevels));
  index /= kLevels;
  s.ws = GridValue::level(static_cast<int>(index % kLevels));
  index /= kLevels;
  s.wr = GridValue::level(static_cast<int>(index % kLevels));
  index /= kLevels;
  s.wl = GridValue::level(static_cast<int>(index));
  return s;
}

std::uint32_t TokenValueSet::index() const {
  if (!valid()) throw std::invalid_argument("token value set off grid");
  return ((static_cast<std::uint32_t>(wl.level_index()) * kLevels +
           static_cast<std::uint32_t>(wr.level_index())) *
              kLevels +
          static_cast<std::uint32_t>(ws.level_index())) *
             kLevels +
         static_cast<std::uint32_t>(ss.level_index());
}

TokenVector TokenValueSet::to_token_vector() const {
  return TokenVector::from_grid(GridValue::one(), wl, wr, ws, ss);
}

UniformGridSampler::UniformGridSampler(std::uint64_t seed, bool anchor_default)
    : rng_(seed), anchor_pending_(anchor_default) {}

TokenValueSet UniformGridSampler::next() {
  if (anchor_pending_) {
    anchor_pending_ = false;
    const auto s = TokenValueSet::defaults();
    used_.insert(s.index());
    return s;
  }
  if (used_.size() >= TokenValueSet::kGridPoints) used_.clear();
  while (true) {
    const auto idx = static_cast<std::uint32_t>(uniform_below(rng_, TokenValueSet::kGridPoints));
    if (used_.insert(idx).second) return TokenValueSet::from_index(idx);
  }
}

TokenSetEvaluation evaluate_token_set(const std::vector<Instance>& instances,
                                      const TokenValueSet& set, const GeneratorBackend& backend,
                                      const EvaluationSetup& setup) {
  if (!set.valid()) throw std::invalid_argument("token value set off grid");
  const auto tokens = set.to_token_vector();
  TokenSetEvaluation out;
  out.predictions.resize(instances.size());
  std::vector<std::string> errors(instances.size());
  parallel_for(instances.size(), setup.jobs, [&](std::size_t i) {
    try {
      out.predictions[i] = predict_one(instances[i], tokens, backend, setup);
    } catch (const Error& e) {
      errors[i] = instances[i].id + ": " + e.what();
    }
  });
  for (auto& e : errors) {
    if (!e.empty()) out.failures.push_back(std::move(e));
  }
  std::vector<GoldView> gold;
  gold.reserve(instances.size());
  for (const auto& inst : instances) gold.push_back(make_gold_view(inst));
  out.report = evaluate_all(out.predictions, gold);
  return out;
}

Ratio search_objective(const std::vector<Instance>& validation, const TokenValueSet& set,
                       const GeneratorBackend& backend, const EvaluationSetup& setup) {
  const auto tokens = set.to_token_vector();
  Predictions preds(validation.size());
  parallel_for(validation.size(), setup.jobs, [&](std::size_t i) {
    try {
      preds[i] = predict_one(validation[i], tokens, backend, setup);
    } catch (const EmptyBackendOutput&) {
      // answered, just nothing to offer: a miss, not a failed trial
    }
  });
  std::vector<GoldView> gold;
  gold.reserve(validation.size());
  for (const auto& inst : validation) gold.push_back(make_gold_view(inst));
  return acc_at_n_top1(1, preds, gold);
}

std::optional<TokenValueSet> SearchResult::best() const {
  if (top_sets.empty()) return std::nullopt;
  return top_sets.front().set;
}

SearchResult run_search(const std::vector<Instance>& validation, const GeneratorBackend& backend,
                        const SearchConfig& config, const EvaluationSetup& setup,
                        const TrialSink& sink, const std::vector<Trial>& previous) {
  if (validation.empty()) throw DataError("token search needs a non-empty validation set");
  if (config.trials == 0) throw std::invalid_argument("trial budget must be >= 1");
  if (previous.size() > config.trials) {
    throw DataError("search log holds more trials than the budget");
  }

  SearchResult result;
  result.seed = config.seed;
  result.trial_budget = config.trials;

  UniformGridSampler sampler(config.seed, config.anchor_default);
  for (std::size_t t = 0; t < config.trials; ++t) {
    const auto set = sampler.next();
    if (t < previous.size()) {
      if (previous[t].index != t || previous[t].set != set) {
        throw DataError("search log trial " + std::to_string(t) +
                        " does not match the sampler for seed " + std::to_string(config.seed));
      }
      result.trials.push_back(previous[t]);
      continue;
    }
    Trial trial{t, set, std::nullopt, {}};
    try {
      trial.objective = search_objective(validation, set, backend, setup);
    } catch (const std::exception& e) {
      trial.error = e.what();
    }
    if (sink) sink(trial);
    result.trials.push_back(std::move(trial));
  }

  std::vector<Trial> ranked;
  for (const auto& t : result.trials) {
    if (t.objective) ranked.push_back(t);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Trial& a, const Trial& b) { return *b.objective < *a.objective; });
  if (ranked.size() > config.top_count) ranked.resize(config.top_count);
  result.top_sets = std::move(ranked);
  return result;
}

std::string format_log_header(const SearchConfig& config) {
  nlohmann::ordered_json j;
  j["type"] = "header";
  j["sampler"] = "uniform";
  j["seed"] = config.seed;
  j["trials"] = config.trials;
  j["anchor_default"] = config.anchor_default;
  j["top_count"] = config.top_count;
  return j.dump();
}

std::string format_log_trial(const Trial& trial) {
  nlohmann::ordered_json j;
  j["trial"] = trial.index;
  j["wl"] = trial.set.wl.str();
  j["wr"] = trial.set.wr.str();
  j["ws"] = trial.set.ws.str();
  j["ss"] = trial.set.ss.str();
  if (trial.objective) {
    j["objective"] = trial.objective->value();
    j["objective_num"] = trial.objective->num();
    j["objective_den"] = trial.objective->den();
  } else {
    j["error"] = trial.error;
  }
  return j.dump();
}

namespace {

GridValue parse_grid_string(const std::string& s) {
  // "x.xx"
  if (s.size() != 4 || s[1] != '.') throw DataError("bad token value '" + s + "' in search log");
  const int h = (s[0] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
  auto g = GridValue::from_hundredths(h);
  if (!g.on_grid()) throw DataError("token value '" + s + "' off grid in search log");
  return g;
}

}  // namespace

SearchLog read_search_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open search log " + path.string());
  SearchLog log;
  std::string line;
  bool have_header = false;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.value("type", "") == "header") {
        log.config.seed = j.at("seed").get<std::uint64_t>();
        log.config.trials = j.at("trials").get<std::size_t>();
        log.config.anchor_default = j.at("anchor_default").get<bool>();
        log.config.top_count = j.value("top_count", std::size_t{10});
        have_header = true;
        continue;
      }
      Trial t;
      t.index = j.at("trial").get<std::size_t>();
      t.set.wl = parse_grid_string(j.at("wl").get<std::string>());
      t.set.wr = parse_grid_string(j.at("wr").get<std::string>());
      t.set.ws = parse_grid_string(j.at("ws").get<std::string>());
      t.set.ss = parse_grid_string(j.at("ss").get<std::string>());
      if (j.contains("objective_num")) {
        t.objective = Ratio(j.at("objective_num").get<std::int64_t>(),
                            j.at("objective_den").get<std::int64_t>());
      } else {
        t.error = j.value("error", "");
      }
      log.trials.push_back(std::move(t));
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  if (!have_header) throw DataError(path.string() + ": search log has no header line");
  return log;
}

}  // namespace lexsimp

#include "lexsimp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexsimp/control_tokens.hpp"
#include "lexsimp/corpus.hpp"
#include "lexsimp/generation.hpp"
#include "lexsimp/lexicon.hpp"
#include "lexsimp/manifest.hpp"
#include "lexsimp/metrics.hpp"
#include "lexsimp/parallel.hpp"
#include "lexsimp/serializer.hpp"
#include "lexsimp/sidecar_client.hpp"
#include "lexsimp/text.hpp"
#include "lexsimp/token_search.hpp"

namespace lexsimp {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct DatasetArgs {
  std::string path;
  std::string format = "tsar_aggregated";
  std::string language = "en";

  Language lang() const { return parse_language(language); }
  std::vector<Instance> load() const {
    return read_dataset(path, parse_input_format(format), lang());
  }
};

void add_dataset_options(CLI::App* sub, DatasetArgs& d, const std::string& flag = "--dataset") {
  sub->add_option(flag, d.path, "Dataset file")->required()->check(CLI::ExistingFile);
  sub->add_option("--format", d.format, "tsar_raw | tsar_aggregated | rank_prefixed | jsonl")
      ->check(CLI::IsMember({"tsar_raw", "tsar_aggregated", "rank_prefixed", "jsonl"}));
  sub->add_option("--language", d.language, "en | es | pt")
      ->check(CLI::IsMember({"en", "es", "pt"}));
}

struct SerializationArgs {
  bool no_mlm = false;
  int mlm_top_k = 10;
  bool span_marker = false;
  std::string mlm_file;

  SerializationOptions options() const {
    return SerializationOptions{!no_mlm, mlm_top_k, span_marker};
  }
};

void add_serialization_options(CLI::App* sub, SerializationArgs& s) {
  sub->add_flag("--no-mlm", s.no_mlm, "Omit MLM candidates from sources");
  sub->add_option("--mlm-top-k", s.mlm_top_k, "MLM candidates per source")
      ->check(CLI::NonNegativeNumber);
  sub->add_flag("--span-marker", s.span_marker, "Emit the #i-j span marker");
  sub->add_option("--mlm", s.mlm_file, "MLM candidate file (JSONL from mlm-candidates)")
      ->check(CLI::ExistingFile);
}

struct BackendArgs {
  std::string kind = "mock_table";
  std::string table;
  std::string synonyms;
  std::string model;
  std::string sidecar_url;
  std::string freq;
  std::string freq_dir;
  int beam = kDefaultBeamWidth;
  int limit = static_cast<int>(kDefaultCandidateLimit);
};

void add_sidecar_option(CLI::App* sub, std::string& url) {
  sub->add_option("--sidecar-url", url, "Model sidecar base URL")->envname("LEXSIMP_SIDECAR_URL");
}

void add_freq_options(CLI::App* sub, std::string& freq, std::string& freq_dir) {
  sub->add_option("--freq", freq, "Frequency-ordered word list")->check(CLI::ExistingFile);
  sub->add_option("--freq-dir", freq_dir, "Directory holding freq.<lang>.txt")
      ->envname("LEXSIMP_FREQ_DIR");
}

void add_backend_options(CLI::App* sub, BackendArgs& b) {
  sub->add_option("--backend", b.kind,
                  "mock_table | lexicon_baseline | remote_seq2seq | remote_fill_mask")
      ->check(CLI::IsMember({"mock_table", "lexicon_baseline", "remote_seq2seq", "remote_fill_mask"}));
  sub->add_option("--table", b.table, "mock_table answers (prediction TSV); default: gold")
      ->check(CLI::ExistingFile);
  sub->add_option("--synonyms", b.synonyms, "lexicon_baseline synonym table")
      ->check(CLI::ExistingFile);
  sub->add_option("--model", b.model, "Model identifier for remote backends");
  add_sidecar_option(sub, b.sidecar_url);
  add_freq_options(sub, b.freq, b.freq_dir);
  sub->add_option("--beam", b.beam, "Beam width")->check(CLI::PositiveNumber);
  sub->add_option("--limit", b.limit, "Candidates kept after filtering")->check(CLI::PositiveNumber);
}

fs::path resolve_freq(const std::string& freq, const std::string& freq_dir, Language lang) {
  if (!freq.empty()) return freq;
  if (!freq_dir.empty()) return FrequencyLexicon::default_path(freq_dir, lang);
  throw UsageError("no frequency list: pass --freq, --freq-dir or set LEXSIMP_FREQ_DIR");
}

std::shared_ptr<const SidecarClient> make_sidecar(const std::string& url) {
  if (url.empty()) throw UsageError("remote backend needs --sidecar-url or LEXSIMP_SIDECAR_URL");
  return std::make_shared<SidecarClient>(url);
}

std::shared_ptr<const GeneratorBackend> make_backend(const BackendArgs& b, Language lang,
                                                     const std::vector<Instance>& dataset,
                                                     ordered_json& description) {
  const auto kind = parse_backend_kind(b.kind);
  description["kind"] = b.kind;
  description["beam_width"] = b.beam;
  description["limit"] = b.limit;
  switch (kind) {
    case BackendKind::mock_table: {
      if (b.table.empty()) {
        description["table"] = "gold";
        return std::make_shared<MockTableBackend>(MockTableBackend::from_gold(dataset));
      }
      std::map<MockTableBackend::Key, std::vector<std::string>> table;
      for (auto& row : read_predictions(b.table)) {
        table[{row.sentence, row.complex_word}] = std::move(row.candidates);
      }
      description["table"] = b.table;
      return std::make_shared<MockTableBackend>(std::move(table));
    }
    case BackendKind::lexicon_baseline: {
      if (b.synonyms.empty()) throw UsageError("lexicon_baseline needs --synonyms");
      const auto freq = resolve_freq(b.freq, b.freq_dir, lang);
      description["synonyms"] = b.synonyms;
      description["freq"] = freq.string();
      auto lexicon = std::make_shared<const FrequencyLexicon>(FrequencyLexicon::load(freq, lang));
      return std::make_shared<LexiconBaselineBackend>(
          LexiconBaselineBackend::load_synonyms(b.synonyms), std::move(lexicon));
    }
    case BackendKind::remote_seq2seq:
    case BackendKind::remote_fill_mask: {
      if (b.model.empty()) throw UsageError("remote backends need --model");
      auto client = make_sidecar(b.sidecar_url);
      description["model"] = b.model;
      description["sidecar_url"] = b.sidecar_url;
      if (kind == BackendKind::remote_seq2seq) {
        return std::make_shared<RemoteSeq2SeqBackend>(std::move(client), b.model);
      }
      return std::make_shared<FillMaskBackend>(
          std::make_shared<SidecarFillMask>(std::move(client), b.model));
    }
  }
  throw UsageError("unknown backend");
}

/// "wl,wr,ws,ss", each on the 0.05 grid.
TokenValueSet parse_token_set(const std::string& spec) {
  const auto parts = text::split(spec, ',');
  if (parts.size() != 4) throw UsageError("--tokens expects four values: WL,WR,WS,SS");
  GridValue g[4];
  for (std::size_t i = 0; i < 4; ++i) {
    double v = 0;
    try {
      v = std::stod(std::string(text::trim(parts[i])));
    } catch (const std::exception&) {
      throw UsageError("bad token value '" + std::string(parts[i]) + "'");
    }
    if (!std::isfinite(v) || v < 0) throw UsageError("bad token value '" + std::string(parts[i]) + "'");
    g[i] = quantize(v);
    if (std::abs(g[i].value() - v) > 1e-9) {
      throw UsageError("token value " + std::string(parts[i]) + " is not on the 0.50..2.00 / 0.05 grid");
    }
  }
  return TokenValueSet{g[0], g[1], g[2], g[3]};
}

ordered_json token_set_json(const TokenValueSet& s) {
  return {{"wl", s.wl.str()}, {"wr", s.wr.str()}, {"ws", s.ws.str()}, {"ss", s.ss.str()}};
}

ordered_json report_json(const MetricReport& r) {
  ordered_json j;
  j["instances"] = r.instance_count;
  j["acc@1"] = r.acc_at_1.value();
  for (std::size_t i = 0; i < kTopN.size(); ++i) {
    j["acc@" + std::to_string(kTopN[i]) + "@top1"] = r.acc_at_n_top1[i].value();
  }
  for (std::size_t i = 0; i < kTopK.size(); ++i) {
    j["map@" + std::to_string(kTopK[i])] = r.map_at_k[i].value();
  }
  for (std::size_t i = 0; i < kTopK.size(); ++i) {
    j["potential@" + std::to_string(kTopK[i])] = r.potential_at_k[i].value();
  }
  return j;
}

void ensure_parent(const fs::path& file) {
  if (auto dir = file.parent_path(); !dir.empty()) fs::create_directories(dir);
}

fs::path dir_of(const fs::path& file) {
  auto parent = file.parent_path();
  return parent.empty() ? fs::path(".") : parent;
}

std::ofstream open_out(const fs::path& path) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

// ---------------------------------------------------------------- stats

int cmd_stats(const DatasetArgs& d, std::ostream& out) {
  const auto s = dataset_stats(d.load());
  out << "instances\t" << s.instance_count << '\n'
      << "min_tokens\t" << s.min_tokens << '\n'
      << "max_tokens\t" << s.max_tokens << '\n'
      << "avg_tokens\t" << format_fixed(s.avg_tokens, 2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- split

int cmd_split(const DatasetArgs& d, const SplitSpec& spec, const std::string& out_dir,
              std::ostream& out) {
  const auto split = split_dataset(d.load(), spec);
  fs::create_directories(out_dir);
  std::vector<fs::path> outputs;
  for (const auto& [name, part] : {std::pair{"train", &split.train},
                                   std::pair{"validation", &split.validation},
                                   std::pair{"test", &split.test}}) {
    const auto path = fs::path(out_dir) / (std::string(name) + ".jsonl");
    write_jsonl(path, *part);
    outputs.push_back(path);
    out << name << '\t' << part->size() << '\n';
  }
  RunManifest m;
  m.command = "split";
  m.add_input(d.path);
  m.split = spec;
  m.seeds = {spec.seed};
  m.parameters["format"] = d.format;
  m.parameters["language"] = d.language;
  m.write(out_dir, outputs);
  return kExitOk;
}

// ---------------------------------------------------------------- preprocess

struct PreprocessArgs {
  DatasetArgs dataset;
  SerializationArgs serialization;
  std::string out;
  std::string mode = "train";
  std::string tokens;
  std::string freq;
  std::string freq_dir;
  std::string hyphenation;
  std::string embedder = "stub";
  std::string embed_model = "multi-qa-mpnet-base-dot-v1";
  std::string sidecar_url;
  int jobs = 1;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const auto instances = a.dataset.load();
  const auto lang = a.dataset.lang();
  const auto options = a.serialization.options();
  const MlmTable mlm = a.serialization.mlm_file.empty() ? MlmTable{} : read_mlm_file(a.serialization.mlm_file);
  const auto mlm_for = [&](const Instance& inst) -> std::vector<std::string> {
    auto it = mlm.find(inst.id);
    if (it == mlm.end()) return {};
    auto c = it->second;
    if (c.size() > static_cast<std::size_t>(options.mlm_top_k)) c.resize(static_cast<std::size_t>(options.mlm_top_k));
    return c;
  };

  RunManifest m;
  m.command = "preprocess";
  m.add_input(a.dataset.path);
  if (!a.serialization.mlm_file.empty()) m.add_input(a.serialization.mlm_file);
  m.serialization = options;
  m.parameters["mode"] = a.mode;
  m.parameters["format"] = a.dataset.format;
  m.parameters["language"] = a.dataset.language;

  std::vector<std::string> lines(instances.size());
  std::size_t line_count = 0;
  if (a.mode == "train") {
    const auto freq = resolve_freq(a.freq, a.freq_dir, lang);
    m.add_input(freq);
    const FrequencyLexicon lexicon = FrequencyLexicon::load(freq, lang);
    std::shared_ptr<const Syllabifier> syllabifier = std::make_shared<VowelGroupSyllabifier>();
    if (!a.hyphenation.empty()) {
      m.add_input(a.hyphenation);
      syllabifier = std::make_shared<HyphenationDictionarySyllabifier>(
          HyphenationDictionarySyllabifier::load(a.hyphenation, syllabifier));
    }
    m.parameters["syllabifier"] = std::string(syllabifier->id());
    std::shared_ptr<const EmbeddingProvider> embedder;
    if (a.embedder == "sidecar") {
      embedder = std::make_shared<SidecarEmbedder>(make_sidecar(a.sidecar_url), a.embed_model);
      m.backend["embedder"] = {{"kind", "sidecar"}, {"model", a.embed_model}, {"sidecar_url", a.sidecar_url}};
    } else {
      embedder = std::make_shared<HashEmbedder>();
      m.backend["embedder"] = {{"kind", "stub"}, {"id", embedder->id()}, {"dimension", embedder->dimension()}};
    }
    const CachingEmbedder cached(embedder);

    std::vector<std::size_t> counts(instances.size());
    parallel_for(instances.size(), a.jobs, [&](std::size_t i) {
      const auto examples =
          build_training_examples(instances[i], lexicon, *syllabifier, cached, mlm_for(instances[i]), options);
      std::string block;
      for (const auto& ex : examples) block += ex.source + "\t" + ex.target + "\n";
      lines[i] = std::move(block);
      counts[i] = examples.size();
    });
    for (auto c : counts) line_count += c;
  } else {
    const auto set = a.tokens.empty() ? TokenValueSet::defaults() : parse_token_set(a.tokens);
    m.parameters["tokens"] = token_set_json(set);
    parallel_for(instances.size(), a.jobs, [&](std::size_t i) {
      lines[i] = build_eval_source(instances[i], set.to_token_vector(), mlm_for(instances[i]), options) + "\n";
    });
    line_count = instances.size();
  }

  {
    auto f = open_out(a.out);
    for (const auto& block : lines) f << block;
  }
  m.write(dir_of(a.out), {a.out});
  out << "wrote " << line_count << " lines to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- mlm-candidates

struct MlmArgs {
  DatasetArgs dataset;
  std::string model;
  std::string sidecar_url;
  std::string out;
  int k = 10;
  int jobs = 1;
};

int cmd_mlm(const MlmArgs& a, std::ostream& out) {
  const auto instances = a.dataset.load();
  const SidecarFillMask client(make_sidecar(a.sidecar_url), a.model);
  std::vector<std::string> lines(instances.size());
  parallel_for(instances.size(), a.jobs, [&](std::size_t i) {
    lines[i] = format_mlm_line(
        instances[i].id, extract_mlm_candidates(instances[i].sentence, instances[i].complex_word, a.k, client));
  });
  {
    auto f = open_out(a.out);
    for (const auto& l : lines) f << l << '\n';
  }
  RunManifest m;
  m.command = "mlm-candidates";
  m.add_input(a.dataset.path);
  m.backend = {{"kind", "remote_fill_mask"}, {"model", a.model}, {"sidecar_url", a.sidecar_url}};
  m.parameters["k"] = a.k;
  m.write(dir_of(a.out), {a.out});
  out << "wrote MLM candidates for " << instances.size() << " instances to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  DatasetArgs dataset;
  SerializationArgs serialization;
  BackendArgs backend;
  std::string tokens;
  std::string out;
  int jobs = 1;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const auto instances = a.dataset.load();
  RunManifest m;
  m.command = "generate";
  m.add_input(a.dataset.path);
  const auto backend = make_backend(a.backend, a.dataset.lang(), instances, m.backend);
  if (!a.backend.table.empty()) m.add_input(a.backend.table);

  EvaluationSetup setup;
  setup.options = a.serialization.options();
  if (!a.serialization.mlm_file.empty()) {
    setup.mlm_candidates = read_mlm_file(a.serialization.mlm_file);
    m.add_input(a.serialization.mlm_file);
  }
  setup.beam_width = a.backend.beam;
  setup.limit = static_cast<std::size_t>(a.backend.limit);
  const auto set = a.tokens.empty() ? TokenValueSet::defaults() : parse_token_set(a.tokens);
  m.serialization = setup.options;
  m.parameters["tokens"] = token_set_json(set);

  std::vector<PredictionRow> rows(instances.size());
  std::vector<std::string> empties(instances.size());
  parallel_for(instances.size(), a.jobs, [&](std::size_t i) {
    const auto& inst = instances[i];
    auto mlm_it = setup.mlm_candidates.find(inst.id);
    std::vector<std::string> mlm = mlm_it == setup.mlm_candidates.end() ? std::vector<std::string>{} : mlm_it->second;
    if (mlm.size() > static_cast<std::size_t>(setup.options.mlm_top_k)) mlm.resize(static_cast<std::size_t>(setup.options.mlm_top_k));
    const auto source = build_eval_source(inst, set.to_token_vector(), mlm, setup.options);
    rows[i] = {inst.sentence, inst.complex_word, {}};
    try {
      rows[i].candidates = generate_candidates(inst, *backend, source, setup.beam_width, setup.limit).candidates;
    } catch (const EmptyBackendOutput& e) {
      empties[i] = e.what();
    }
  });
  for (const auto& e : empties) {
    if (!e.empty()) err << "warning: " << e << '\n';
  }
  ensure_parent(a.out);
  write_predictions(a.out, rows);
  m.write(dir_of(a.out), {a.out});
  out << "wrote predictions for " << rows.size() << " instances to " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string pred;
  DatasetArgs gold;
  std::string name = "system";
  std::string out;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  const auto gold = a.gold.load();
  const auto preds = align_predictions(read_predictions(a.pred), gold);
  std::vector<GoldView> views;
  views.reserve(gold.size());
  for (const auto& g : gold) views.push_back(make_gold_view(g));
  const auto report = evaluate_all(preds, views);
  out << format_table({{a.name, report}}) << '\n' << format_key_value(report);
  if (!a.out.empty()) {
    {
      auto f = open_out(a.out);
      f << format_key_value(report);
    }
    RunManifest m;
    m.command = "score";
    m.add_input(a.pred);
    m.add_input(a.gold.path);
    m.parameters["name"] = a.name;
    m.write(dir_of(a.out), {a.out});
  }
  return kExitOk;
}

// ---------------------------------------------------------------- search-tokens

struct SearchArgs {
  DatasetArgs validation;
  std::string test;
  SerializationArgs serialization;
  BackendArgs backend;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  bool no_anchor = false;
  std::string log;
  bool resume = false;
  std::string out;
  int jobs = 1;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
  const auto validation = a.validation.load();
  std::vector<Instance> test;
  if (!a.test.empty()) {
    test = read_dataset(a.test, parse_input_format(a.validation.format), a.validation.lang());
  }
  auto all = validation;
  all.insert(all.end(), test.begin(), test.end());

  RunManifest m;
  m.command = "search-tokens";
  m.add_input(a.validation.path);
  if (!a.test.empty()) m.add_input(a.test);
  const auto backend = make_backend(a.backend, a.validation.lang(), all, m.backend);
  if (!a.backend.table.empty()) m.add_input(a.backend.table);

  EvaluationSetup setup;
  setup.options = a.serialization.options();
  if (!a.serialization.mlm_file.empty()) {
    setup.mlm_candidates = read_mlm_file(a.serialization.mlm_file);
    m.add_input(a.serialization.mlm_file);
  }
  setup.beam_width = a.backend.beam;
  setup.limit = static_cast<std::size_t>(a.backend.limit);
  setup.jobs = a.jobs;

  SearchConfig config;
  config.trials = a.trials;
  config.seed = a.seed;
  config.anchor_default = !a.no_anchor;
  m.serialization = setup.options;
  m.seeds = {a.seed};
  m.parameters["trials"] = a.trials;
  m.parameters["anchor_default"] = config.anchor_default;
  m.parameters["sampler"] = "uniform";

  std::vector<Trial> previous;
  std::ofstream log;
  if (!a.log.empty()) {
    if (a.resume && fs::exists(a.log)) {
      auto recovered = read_search_log(a.log);
      if (recovered.config.seed != config.seed || recovered.config.trials != config.trials ||
          recovered.config.anchor_default != config.anchor_default) {
        throw DataError("search log " + a.log + " was written with a different seed/budget/anchor");
      }
      previous = std::move(recovered.trials);
      log = std::ofstream(a.log, std::ios::binary | std::ios::app);
    } else {
      log = open_out(a.log);
      log << format_log_header(config) << '\n';
    }
    if (!log) throw DataError("cannot write search log " + a.log);
  }
  const TrialSink sink = [&log](const Trial& t) {
    if (log.is_open()) log << format_log_trial(t) << '\n' << std::flush;
  };

  const auto result = run_search(validation, *backend, config, setup, sink, previous);
  log.close();

  ordered_json j;
  j["seed"] = result.seed;
  j["trial_budget"] = result.trial_budget;
  j["failed_trials"] = std::count_if(result.trials.begin(), result.trials.end(),
                                     [](const Trial& t) { return !t.objective; });
  auto top = ordered_json::array();
  out << "rank\ttrial\tWL\tWR\tWS\tSS\tACC@1@Top1\n";
  for (std::size_t r = 0; r < result.top_sets.size(); ++r) {
    const auto& t = result.top_sets[r];
    auto row = token_set_json(t.set);
    row["trial"] = t.index;
    row["objective"] = t.objective->value();
    top.push_back(row);
    out << r + 1 << '\t' << t.index << '\t' << t.set.wl.str() << '\t' << t.set.wr.str() << '\t'
        << t.set.ws.str() << '\t' << t.set.ss.str() << '\t' << format_fixed(t.objective->value(), 4)
        << '\n';
  }
  j["top_sets"] = std::move(top);
  if (const auto best = result.best(); best && !test.empty()) {
    const auto eval = evaluate_token_set(test, *best, *backend, setup);
    j["test_report"] = report_json(eval.report);
    j["test_failures"] = eval.failures.size();
    out << '\n' << format_table({{"best-set", eval.report}});
  }

  std::vector<fs::path> outputs;
  if (!a.out.empty()) {
    auto f = open_out(a.out);
    f << j.dump(2) << '\n';
    outputs.emplace_back(a.out);
  }
  if (!a.log.empty()) outputs.emplace_back(a.log);
  if (!outputs.empty()) m.write(dir_of(outputs.front()), outputs);
  return kExitOk;
}

// ---------------------------------------------------------------- rank-backends

struct RankArgs {
  DatasetArgs dataset;
  std::vector<std::string> fill_mask_models;
  std::vector<std::string> tables;
  std::string sidecar_url;
  int k = 10;
  std::string out;
};

int cmd_rank(const RankArgs& a, std::ostream& out) {
  const auto instances = a.dataset.load();
  if (a.fill_mask_models.empty() && a.tables.empty()) {
    throw UsageError("rank-backends needs at least one --fill-mask-model or --table");
  }
  std::vector<std::shared_ptr<const GeneratorBackend>> backends;
  if (!a.fill_mask_models.empty()) {
    auto client = make_sidecar(a.sidecar_url);
    for (const auto& model : a.fill_mask_models) {
      backends.push_back(std::make_shared<FillMaskBackend>(std::make_shared<SidecarFillMask>(client, model)));
    }
  }
  for (const auto& spec : a.tables) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--table expects NAME=PATH");
    std::map<MockTableBackend::Key, std::vector<std::string>> table;
    for (auto& row : read_predictions(spec.substr(eq + 1))) {
      table[{row.sentence, row.complex_word}] = std::move(row.candidates);
    }
    backends.push_back(std::make_shared<MockTableBackend>(std::move(table), spec.substr(0, eq)));
  }

  const auto rows = rank_generators_by_potential(instances, backends, a.k);
  std::ostringstream report;
  report << "backend\tpotential@" << a.k << '\n';
  for (const auto& r : rows) {
    report << r.backend << '\t'
           << (r.potential ? format_fixed(r.potential->value(), 3) : "FAILED: " + r.diagnostic) << '\n';
  }
  out << report.str();
  if (!a.out.empty()) {
    {
      auto f = open_out(a.out);
      f << report.str();
    }
    RunManifest m;
    m.command = "rank-backends";
    m.add_input(a.dataset.path);
    m.backend = {{"fill_mask_models", a.fill_mask_models}, {"tables", a.tables}, {"sidecar_url", a.sidecar_url}};
    m.parameters["k"] = a.k;
    m.write(dir_of(a.out), {a.out});
  }
  return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Controllable lexical simplification toolkit", "lexsimp"};
  app.set_config("--config", "", "TOML config file; flags override it, it overrides environment");
  app.require_subcommand(1);

  DatasetArgs stats_args;
  auto* stats = app.add_subcommand("stats", "Dataset statistics (instances, tokens per sentence)");
  add_dataset_options(stats, stats_args);

  DatasetArgs split_data;
  SplitSpec split_spec;
  std::string split_out;
  auto* split = app.add_subcommand("split", "Seeded train/validation/test split");
  add_dataset_options(split, split_data);
  split->add_option("--train", split_spec.train_fraction);
  split->add_option("--validation", split_spec.validation_fraction);
  split->add_option("--test", split_spec.test_fraction);
  split->add_option("--seed", split_spec.seed);
  split->add_option("--out-dir", split_out)->required();

  PreprocessArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Build model source/target files");
  add_dataset_options(preprocess, pre.dataset);
  add_serialization_options(preprocess, pre.serialization);
  preprocess->add_option("--out", pre.out)->required();
  preprocess->add_option("--mode", pre.mode, "train: one line per gold substitute; eval: one source per instance")
      ->check(CLI::IsMember({"train", "eval"}));
  preprocess->add_option("--tokens", pre.tokens, "eval mode token values WL,WR,WS,SS (default all 1.00)");
  add_freq_options(preprocess, pre.freq, pre.freq_dir);
  preprocess->add_option("--hyphenation", pre.hyphenation, "Hyphenation dictionary (word<TAB>hy-phen-a-tion)")
      ->check(CLI::ExistingFile);
  preprocess->add_option("--embedder", pre.embedder, "stub | sidecar")->check(CLI::IsMember({"stub", "sidecar"}));
  preprocess->add_option("--embed-model", pre.embed_model);
  add_sidecar_option(preprocess, pre.sidecar_url);
  preprocess->add_option("--jobs", pre.jobs)->check(CLI::PositiveNumber);

  MlmArgs mlm;
  auto* mlm_cmd = app.add_subcommand("mlm-candidates", "Fill-mask candidates per instance");
  add_dataset_options(mlm_cmd, mlm.dataset);
  mlm_cmd->add_option("--model", mlm.model)->required();
  add_sidecar_option(mlm_cmd, mlm.sidecar_url);
  mlm_cmd->add_option("--k", mlm.k)->check(CLI::PositiveNumber);
  mlm_cmd->add_option("--out", mlm.out)->required();
  mlm_cmd->add_option("--jobs", mlm.jobs)->check(CLI::PositiveNumber);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate and filter candidates (TSAR prediction TSV)");
  add_dataset_options(generate, gen.dataset);
  add_serialization_options(generate, gen.serialization);
  add_backend_options(generate, gen.backend);
  generate->add_option("--tokens", gen.tokens, "Token values WL,WR,WS,SS (default all 1.00)");
  generate->add_option("--out", gen.out)->required();
  generate->add_option("--jobs", gen.jobs)->check(CLI::PositiveNumber);

  ScoreArgs score_args;
  auto* score = app.add_subcommand("score", "Score a prediction TSV against gold");
  score->add_option("--pred", score_args.pred)->required()->check(CLI::ExistingFile);
  add_dataset_options(score, score_args.gold, "--gold");
  score->add_option("--name", score_args.name, "System name in the table");
  score->add_option("--out", score_args.out, "Write key=value report here");

  SearchArgs search_args;
  auto* search = app.add_subcommand("search-tokens", "Search WL/WR/WS/SS values on a validation set");
  add_dataset_options(search, search_args.validation);
  add_serialization_options(search, search_args.serialization);
  add_backend_options(search, search_args.backend);
  search->add_option("--test", search_args.test, "Evaluate the best set on this test file")
      ->check(CLI::ExistingFile);
  search->add_option("--trials", search_args.trials)->check(CLI::PositiveNumber);
  search->add_option("--seed", search_args.seed);
  search->add_flag("--no-anchor", search_args.no_anchor, "Do not evaluate the all-1.00 set first");
  search->add_option("--log", search_args.log, "Trial log (JSONL)");
  search->add_flag("--resume", search_args.resume, "Continue from an existing --log");
  search->add_option("--out", search_args.out, "Result JSON");
  search->add_option("--jobs", search_args.jobs)->check(CLI::PositiveNumber);

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank-backends", "Rank candidate generators by Potential@k");
  add_dataset_options(rank, rank_args.dataset);
  rank->add_option("--fill-mask-model", rank_args.fill_mask_models, "Sidecar fill-mask model (repeatable)");
  rank->add_option("--table", rank_args.tables, "NAME=PATH prediction table (repeatable)");
  add_sidecar_option(rank, rank_args.sidecar_url);
  rank->add_option("--k", rank_args.k)->check(CLI::PositiveNumber);
  rank->add_option("--out", rank_args.out);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (stats->parsed()) return cmd_stats(stats_args, out);
    if (split->parsed()) return cmd_split(split_data, split_spec, split_out, out);
    if (preprocess->parsed()) return cmd_preprocess(pre, out);
    if (mlm_cmd->parsed()) return cmd_mlm(mlm, out);
    if (generate->parsed()) return cmd_generate(gen, out, err);
    if (score->parsed()) return cmd_score(score_args, out);
    if (search->parsed()) return cmd_search(search_args, out);
    if (rank->parsed()) return cmd_rank(rank_args, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BackendError& e) {
    err << "backend error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace lexsimp

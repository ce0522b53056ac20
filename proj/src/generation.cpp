#include "lexsimp/generation.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "lexsimp/control_tokens.hpp"
#include "lexsimp/serializer.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp {

std::vector<ScoredCandidate> TableFillMaskClient::fill_mask(std::string_view text, int k) const {
  auto it = table_.find(std::string(text));
  if (it == table_.end()) return {};
  auto out = it->second;
  if (k >= 0 && out.size() > static_cast<std::size_t>(k)) out.resize(static_cast<std::size_t>(k));
  return out;
}

std::string build_mlm_query(std::string_view sentence, std::string_view complex_word) {
  if (complex_word.empty() || sentence.find(complex_word) == std::string_view::npos) {
    throw DataError("cannot mask: complex word '" + std::string(complex_word) +
                    "' not in sentence");
  }
  return std::string(sentence) + " </s> " + replace_first(sentence, complex_word, kMaskToken);
}

bool is_subword_fragment(std::string_view c) {
  c = text::trim(c);
  if (c.empty()) return true;
  if (c.substr(0, 2) == "##" || (c.size() > 2 && c.substr(c.size() - 2) == "@@")) return true;
  for (char32_t cp : text::decode_utf8(c)) {
    if (!text::is_punct(cp) && !text::is_space(cp)) return false;
  }
  return true;
}

namespace {

// Drops the SentencePiece / byte-level BPE word-start marker if the sidecar
// left it in place.
std::string strip_word_start(std::string_view c) {
  c = text::trim(c);
  for (std::string_view marker : {"\xE2\x96\x81", "\xC4\xA0"}) {  // U+2581, U+0120
    if (c.substr(0, marker.size()) == marker) c.remove_prefix(marker.size());
  }
  return std::string(c);
}

}  // namespace

std::vector<std::string> extract_mlm_candidates(std::string_view sentence,
                                                std::string_view complex_word, int k,
                                                const FillMaskClient& client) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto query = build_mlm_query(sentence, complex_word);
  std::vector<ScoredCandidate> scored;
  try {
    // over-fetch: fragments are removed before truncation
    scored = client.fill_mask(query, std::max(2 * k, k + 10));
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(client.id(), e.what());
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const ScoredCandidate& a, const ScoredCandidate& b) { return a.score > b.score; });
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& s : scored) {
    if (is_subword_fragment(s.candidate)) continue;
    auto word = strip_word_start(s.candidate);
    if (word.empty() || is_subword_fragment(word) || text::contains_whitespace(word)) continue;
    if (!seen.insert(normalize_term(word)).second) continue;
    out.push_back(std::move(word));
    if (out.size() == static_cast<std::size_t>(k)) break;
  }
  return out;
}

std::vector<std::string> postfilter(const std::vector<std::string>& raw,
                                    std::string_view complex_word, std::size_t limit) {
  const auto cw = normalize_term(complex_word);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : raw) {
    if (out.size() >= limit) break;
    auto key = normalize_term(r);
    if (key.empty() || key == cw) continue;
    if (!seen.insert(std::move(key)).second) continue;
    out.push_back(std::string(text::trim(r)));
  }
  return out;
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::mock_table:
      return "mock_table";
    case BackendKind::lexicon_baseline:
      return "lexicon_baseline";
    case BackendKind::remote_seq2seq:
      return "remote_seq2seq";
    case BackendKind::remote_fill_mask:
      return "remote_fill_mask";
  }
  return "mock_table";
}

BackendKind parse_backend_kind(std::string_view s) {
  for (auto k : {BackendKind::mock_table, BackendKind::lexicon_baseline, BackendKind::remote_seq2seq,
                 BackendKind::remote_fill_mask}) {
    if (s == to_string(k)) return k;
  }
  throw DataError("unknown backend kind '" + std::string(s) + "'");
}

MockTableBackend MockTableBackend::from_gold(const std::vector<Instance>& instances, std::string id) {
  std::map<Key, std::vector<std::string>> table;
  for (const auto& inst : instances) {
    auto& row = table[{inst.sentence, inst.complex_word}];
    for (const auto& g : inst.gold) row.push_back(g.substitute);
  }
  return MockTableBackend(std::move(table), std::move(id));
}

std::vector<std::string> MockTableBackend::generate(const Instance& instance, std::string_view,
                                                    int beam_width) const {
  auto it = table_.find({instance.sentence, instance.complex_word});
  if (it == table_.end()) return {};
  auto out = it->second;
  if (beam_width >= 0 && out.size() > static_cast<std::size_t>(beam_width)) {
    out.resize(static_cast<std::size_t>(beam_width));
  }
  return out;
}

LexiconBaselineBackend::LexiconBaselineBackend(
    std::unordered_map<std::string, std::vector<std::string>> synonyms,
    std::shared_ptr<const FrequencyLexicon> lexicon)
    : lexicon_(std::move(lexicon)) {
  for (auto& [head, syns] : synonyms) synonyms_[text::casefold(head)] = std::move(syns);
}

std::unordered_map<std::string, std::vector<std::string>> LexiconBaselineBackend::load_synonyms(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open synonym table " + path.string());
  std::unordered_map<std::string, std::vector<std::string>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2) continue;
    auto& row = table[std::string(text::trim(cols[0]))];
    for (std::size_t i = 1; i < cols.size(); ++i) {
      if (!text::trim(cols[i]).empty()) row.emplace_back(text::trim(cols[i]));
    }
  }
  return table;
}

std::vector<std::string> LexiconBaselineBackend::generate(const Instance& instance,
                                                          std::string_view,
                                                          int beam_width) const {
  auto it = synonyms_.find(text::casefold(instance.complex_word));
  if (it == synonyms_.end()) return {};
  std::vector<std::pair<std::size_t, std::string>> ranked;
  for (const auto& s : it->second) ranked.emplace_back(lexicon_->rank_of(s), s);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (auto& [_, s] : ranked) {
    if (out.size() >= static_cast<std::size_t>(std::max(beam_width, 0))) break;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> FillMaskBackend::generate(const Instance& instance, std::string_view,
                                                   int beam_width) const {
  return extract_mlm_candidates(instance.sentence, instance.complex_word, std::max(beam_width, 1),
                                *client_);
}

CandidateList generate_candidates(const Instance& instance, const GeneratorBackend& backend,
                                  std::string_view source, int beam_width, std::size_t limit) {
  if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
  std::vector<std::string> raw;
  try {
    raw = backend.generate(instance, source, beam_width);
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(backend.id(), e.what());
  }
  if (raw.empty()) {
    throw EmptyBackendOutput(backend.id(), instance.id + ": backend returned no candidates");
  }
  if (raw.size() > static_cast<std::size_t>(beam_width)) raw.resize(static_cast<std::size_t>(beam_width));
  CandidateList list;
  list.instance_id = instance.id;
  list.backend = backend.id();
  list.raw_count = raw.size();
  list.candidates = postfilter(raw, instance.complex_word, limit);
  return list;
}

std::vector<BackendPotential> rank_generators_by_potential(
    const std::vector<Instance>& dataset,
    const std::vector<std::shared_ptr<const GeneratorBackend>>& backends, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  std::vector<GoldView> gold;
  gold.reserve(dataset.size());
  for (const auto& inst : dataset) gold.push_back(make_gold_view(inst));

  SerializationOptions options;
  options.include_mlm = false;

  std::vector<BackendPotential> rows;
  for (const auto& backend : backends) {
    BackendPotential row{backend->id(), std::nullopt, {}};
    try {
      Predictions preds;
      preds.reserve(dataset.size());
      for (const auto& inst : dataset) {
        const auto source = build_eval_source(inst, TokenVector::defaults(), {}, options);
        auto cands = backend->generate(inst, source, k);
        if (cands.size() > static_cast<std::size_t>(k)) cands.resize(static_cast<std::size_t>(k));
        preds.push_back(std::move(cands));
      }
      row.potential = potential_at_k(k, preds, gold);
    } catch (const std::exception& e) {
      row.diagnostic = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const BackendPotential& a, const BackendPotential& b) {
    if (!a.potential || !b.potential) return a.potential.has_value() && !b.potential.has_value();
    return *b.potential < *a.potential;
  });
  return rows;
}

MlmTable read_mlm_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open MLM candidate file " + path.string());
  MlmTable table;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      table[j.at("id").get<std::string>()] = j.at("candidates").get<std::vector<std::string>>();
    } catch (const std::exception& e) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return table;
}

std::string format_mlm_line(const std::string& instance_id,
                            const std::vector<std::string>& candidates) {
  nlohmann::ordered_json j;
  j["id"] = instance_id;
  j["candidates"] = candidates;
  return j.dump();
}

std::string format_prediction(const PredictionRow& row) {
  std::string out = row.sentence + "\t" + row.complex_word;
  for (const auto& c : row.candidates) out += "\t" + c;
  return out;
}

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions " + path.string());
  std::vector<PredictionRow> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() < 2) {
      throw DataError(path.string() + ":" + std::to_string(n) +
                      ": expected sentence<TAB>complex_word[<TAB>candidate...]");
    }
    PredictionRow row{text::collapse_whitespace(cols[0]), text::collapse_whitespace(cols[1]), {}};
    for (std::size_t i = 2; i < cols.size(); ++i) {
      if (!text::trim(cols[i]).empty()) row.candidates.emplace_back(text::trim(cols[i]));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : rows) out << format_prediction(r) << '\n';
}

Predictions align_predictions(const std::vector<PredictionRow>& rows,
                              const std::vector<Instance>& gold) {
  if (rows.size() != gold.size()) {
    throw DataError("prediction file has " + std::to_string(rows.size()) + " rows, gold has " +
                    std::to_string(gold.size()));
  }
  Predictions preds;
  preds.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].sentence != gold[i].sentence || rows[i].complex_word != gold[i].complex_word) {
      throw DataError("prediction row " + std::to_string(i + 1) + " does not match gold instance " +
                      gold[i].id);
    }
    preds.push_back(rows[i].candidates);
  }
  return preds;
}

}  // namespace lexsimp

#include "lexsimp/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "lexsimp/random.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp {

namespace {

std::optional<long> parse_int(std::string_view s) {
  s = text::trim(s);
  long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return value;
}

std::string strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return std::string(line);
}

}  // namespace

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::en:
      return "en";
    case Language::es:
      return "es";
    case Language::pt:
      return "pt";
  }
  return "en";
}

Language parse_language(std::string_view s) {
  if (s == "en") return Language::en;
  if (s == "es") return Language::es;
  if (s == "pt") return Language::pt;
  throw DataError("unknown language '" + std::string(s) + "' (expected en, es or pt)");
}

InputFormat parse_input_format(std::string_view s) {
  if (s == "tsar_raw") return InputFormat::tsar_raw;
  if (s == "tsar_aggregated") return InputFormat::tsar_aggregated;
  if (s == "rank_prefixed") return InputFormat::rank_prefixed;
  if (s == "jsonl") return InputFormat::jsonl;
  throw DataError("unknown dataset format '" + std::string(s) + "'");
}

std::string_view to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::MalformedLine:
      return "MalformedLine";
    case ParseErrorKind::ComplexWordNotInSentence:
      return "ComplexWordNotInSentence";
    case ParseErrorKind::EmptyGold:
      return "EmptyGold";
    case ParseErrorKind::BadCount:
      return "BadCount";
  }
  return "MalformedLine";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& reason)
    : DataError("line " + std::to_string(line) + ": " + std::string(to_string(kind)) + ": " +
                reason),
      kind_(kind),
      line_(line) {}

std::string make_instance_id(Language lang, std::size_t line_number) {
  std::string digits = std::to_string(line_number);
  if (digits.size() < 6) digits.insert(0, 6 - digits.size(), '0');
  return std::string(to_string(lang)) + "-" + digits;
}

std::vector<GoldEntry> order_gold(std::vector<GoldEntry> entries) {
  std::vector<GoldEntry> merged;
  std::unordered_map<std::string, std::size_t> slot;
  for (auto& e : entries) {
    auto key = normalize_term(e.substitute);
    auto it = slot.find(key);
    if (it == slot.end()) {
      slot.emplace(std::move(key), merged.size());
      merged.push_back(std::move(e));
    } else {
      merged[it->second].count += e.count;
    }
  }
  std::stable_sort(merged.begin(), merged.end(),
                   [](const GoldEntry& a, const GoldEntry& b) { return a.count > b.count; });
  return merged;
}

std::vector<GoldEntry> aggregate_gold(const std::vector<std::string>& raw) {
  if (raw.empty()) throw DataError("aggregate_gold: empty annotation list");
  std::vector<GoldEntry> entries;
  entries.reserve(raw.size());
  for (const auto& r : raw) {
    auto sub = text::collapse_whitespace(r);
    if (sub.empty()) throw DataError("aggregate_gold: empty annotation");
    entries.push_back({std::move(sub), 1});
  }
  return order_gold(std::move(entries));
}

void validate_instance(const Instance& inst) {
  if (inst.sentence.empty()) throw DataError(inst.id + ": empty sentence");
  if (inst.complex_word.empty()) throw DataError(inst.id + ": empty complex word");
  if (inst.sentence.find(inst.complex_word) == std::string::npos) {
    throw DataError(inst.id + ": complex word '" + inst.complex_word + "' not in sentence");
  }
  if (inst.gold.empty()) throw DataError(inst.id + ": empty gold list");
  std::unordered_map<std::string, int> seen;
  for (std::size_t i = 0; i < inst.gold.size(); ++i) {
    const auto& g = inst.gold[i];
    if (g.count < 1) throw DataError(inst.id + ": gold count < 1 for '" + g.substitute + "'");
    if (i > 0 && inst.gold[i - 1].count < g.count) throw DataError(inst.id + ": gold not ordered");
    if (!seen.emplace(normalize_term(g.substitute), 1).second) {
      throw DataError(inst.id + ": duplicate gold substitute '" + g.substitute + "'");
    }
  }
}

Instance parse_instance(std::string_view raw_line, InputFormat format, Language lang,
                        std::size_t line_number) {
  if (format == InputFormat::jsonl) return from_jsonl(raw_line, line_number);

  const std::string line = strip_cr(raw_line);
  const auto cols = text::split(line, '\t');
  const std::size_t first_gold = format == InputFormat::rank_prefixed ? 3 : 2;
  if (cols.size() < first_gold + 1) {
    throw ParseError(ParseErrorKind::MalformedLine, line_number,
                     "expected at least " + std::to_string(first_gold + 1) + " columns, got " +
                         std::to_string(cols.size()));
  }

  Instance inst;
  inst.id = make_instance_id(lang, line_number);
  inst.language = lang;
  inst.sentence = text::collapse_whitespace(cols[0]);
  inst.complex_word = text::collapse_whitespace(cols[1]);
  if (inst.sentence.empty() || inst.complex_word.empty()) {
    throw ParseError(ParseErrorKind::MalformedLine, line_number, "empty sentence or complex word");
  }
  if (inst.sentence.find(inst.complex_word) == std::string::npos) {
    throw ParseError(ParseErrorKind::ComplexWordNotInSentence, line_number,
                     "'" + inst.complex_word + "' does not occur in the sentence");
  }

  std::vector<std::string_view> gold_cols;
  for (std::size_t i = first_gold; i < cols.size(); ++i) {
    if (!text::trim(cols[i]).empty()) gold_cols.push_back(cols[i]);
  }
  if (gold_cols.empty()) {
    throw ParseError(ParseErrorKind::EmptyGold, line_number, "no gold substitutes");
  }

  switch (format) {
    case InputFormat::tsar_raw: {
      std::vector<std::string> raw(gold_cols.begin(), gold_cols.end());
      inst.gold = aggregate_gold(raw);
      break;
    }
    case InputFormat::tsar_aggregated: {
      std::vector<GoldEntry> entries;
      for (auto col : gold_cols) {
        const auto colon = col.rfind(':');
        if (colon == std::string_view::npos) {
          throw ParseError(ParseErrorKind::BadCount, line_number,
                           "expected substitute:count, got '" + std::string(col) + "'");
        }
        auto count = parse_int(col.substr(colon + 1));
        auto sub = text::collapse_whitespace(col.substr(0, colon));
        if (!count || *count < 1 || *count > std::numeric_limits<int>::max()) {
          throw ParseError(ParseErrorKind::BadCount, line_number,
                           "bad count in '" + std::string(col) + "'");
        }
        if (sub.empty()) {
          throw ParseError(ParseErrorKind::MalformedLine, line_number, "empty substitute");
        }
        entries.push_back({std::move(sub), static_cast<int>(*count)});
      }
      inst.gold = order_gold(std::move(entries));
      break;
    }
    case InputFormat::rank_prefixed: {
      auto index = parse_int(cols[2]);
      if (!index || *index < 0) {
        throw ParseError(ParseErrorKind::MalformedLine, line_number,
                         "bad word index '" + std::string(cols[2]) + "'");
      }
      inst.word_index = static_cast<int>(*index);
      // Rank 1 is best. Repeated substitutes keep their best rank; ranks are
      // turned into counts so that rank-1 entries form the top gold set.
      struct Ranked {
        std::string sub;
        long rank;
      };
      std::vector<Ranked> ranked;
      std::unordered_map<std::string, std::size_t> slot;
      long max_rank = 0;
      for (auto col : gold_cols) {
        const auto colon = col.find(':');
        std::optional<long> rank;
        if (colon != std::string_view::npos) rank = parse_int(col.substr(0, colon));
        if (!rank || *rank < 1) {
          throw ParseError(ParseErrorKind::BadCount, line_number,
                           "expected rank:substitute, got '" + std::string(col) + "'");
        }
        auto sub = text::collapse_whitespace(col.substr(colon + 1));
        if (sub.empty()) {
          throw ParseError(ParseErrorKind::MalformedLine, line_number, "empty substitute");
        }
        max_rank = std::max(max_rank, *rank);
        auto key = normalize_term(sub);
        auto it = slot.find(key);
        if (it == slot.end()) {
          slot.emplace(std::move(key), ranked.size());
          ranked.push_back({std::move(sub), *rank});
        } else {
          ranked[it->second].rank = std::min(ranked[it->second].rank, *rank);
        }
      }
      std::stable_sort(ranked.begin(), ranked.end(),
                       [](const Ranked& a, const Ranked& b) { return a.rank < b.rank; });
      for (auto& r : ranked) {
        inst.gold.push_back({std::move(r.sub), static_cast<int>(max_rank + 1 - r.rank)});
      }
      break;
    }
    case InputFormat::jsonl:
      break;
  }
  return inst;
}

std::string format_aggregated(const Instance& inst) {
  std::string out = inst.sentence + "\t" + inst.complex_word;
  for (const auto& g : inst.gold) {
    out += "\t" + g.substitute + ":" + std::to_string(g.count);
  }
  return out;
}

std::string to_jsonl(const Instance& inst) {
  nlohmann::ordered_json j;
  j["id"] = inst.id;
  j["language"] = to_string(inst.language);
  j["sentence"] = inst.sentence;
  j["complex_word"] = inst.complex_word;
  auto gold = nlohmann::ordered_json::array();
  for (const auto& g : inst.gold) gold.push_back({{"substitute", g.substitute}, {"count", g.count}});
  j["gold"] = std::move(gold);
  if (inst.word_index) j["word_index"] = *inst.word_index;
  return j.dump();
}

Instance from_jsonl(std::string_view line, std::size_t line_number) {
  try {
    const auto j = nlohmann::json::parse(line);
    Instance inst;
    inst.id = j.at("id").get<std::string>();
    inst.language = parse_language(j.at("language").get<std::string>());
    inst.sentence = j.at("sentence").get<std::string>();
    inst.complex_word = j.at("complex_word").get<std::string>();
    for (const auto& g : j.at("gold")) {
      inst.gold.push_back({g.at("substitute").get<std::string>(), g.at("count").get<int>()});
    }
    if (j.contains("word_index")) inst.word_index = j["word_index"].get<int>();
    if (inst.gold.empty()) throw ParseError(ParseErrorKind::EmptyGold, line_number, "no gold");
    if (inst.sentence.find(inst.complex_word) == std::string::npos) {
      throw ParseError(ParseErrorKind::ComplexWordNotInSentence, line_number,
                       "'" + inst.complex_word + "' does not occur in the sentence");
    }
    validate_instance(inst);
    return inst;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError(ParseErrorKind::MalformedLine, line_number, e.what());
  }
}

std::vector<Instance> read_dataset(const std::filesystem::path& path, InputFormat format,
                                   Language lang) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  std::vector<Instance> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse_instance(line, format, lang, n));
    } catch (const ParseError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Instance>& instances) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& inst : instances) out << to_jsonl(inst) << '\n';
}

DatasetStats dataset_stats(const std::vector<Instance>& instances) {
  if (instances.empty()) throw DataError("dataset_stats: empty dataset");
  DatasetStats s;
  s.instance_count = instances.size();
  s.min_tokens = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  for (const auto& inst : instances) {
    const auto n = text::split_whitespace(inst.sentence).size();
    s.min_tokens = std::min(s.min_tokens, n);
    s.max_tokens = std::max(s.max_tokens, n);
    total += n;
  }
  s.avg_tokens = static_cast<double>(total) / static_cast<double>(instances.size());
  return s;
}

DatasetSplit split_dataset(const std::vector<Instance>& instances, const SplitSpec& spec) {
  const double fractions[] = {spec.train_fraction, spec.validation_fraction, spec.test_fraction};
  for (double f : fractions) {
    if (!std::isfinite(f) || f < 0.0 || f >= 1.0 + 1e-12) {
      throw std::invalid_argument("split fractions must lie in [0, 1]");
    }
  }
  if (std::abs(spec.train_fraction + spec.validation_fraction + spec.test_fraction - 1.0) > 1e-9) {
    throw std::invalid_argument("split fractions must sum to 1");
  }

  const std::size_t n = instances.size();
  const auto floor_part = [n](double f) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * f + 1e-9));
  };
  const std::size_t n_val = floor_part(spec.validation_fraction);
  const std::size_t n_test = floor_part(spec.test_fraction);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  shuffle_in_place(order, rng);

  std::vector<std::size_t> val(order.begin(), order.begin() + n_val);
  std::vector<std::size_t> test(order.begin() + n_val, order.begin() + n_val + n_test);
  std::vector<std::size_t> train(order.begin() + n_val + n_test, order.end());
  for (auto* part : {&train, &val, &test}) std::sort(part->begin(), part->end());

  DatasetSplit split;
  for (auto i : train) split.train.push_back(instances[i]);
  for (auto i : val) split.validation.push_back(instances[i]);
  for (auto i : test) split.test.push_back(instances[i]);
  return split;
}

}  // namespace lexsimp

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lexsimp/errors.hpp"

namespace lexsimp {

enum class Language { en, es, pt };

std::string_view to_string(Language lang);
Language parse_language(std::string_view s);

struct GoldEntry {
  std::string substitute;
  int count = 1;

  bool operator==(const GoldEntry&) const = default;
};

/// One annotated sentence. `gold` is ordered count-descending, ties by first
/// appearance, and holds no two entries with equal normalize_term keys.
struct Instance {
  std::string id;
  Language language = Language::en;
  std::string sentence;
  std::string complex_word;
  std::vector<GoldEntry> gold;
  // Whitespace-token index carried by rank-prefixed datasets; also drives the
  // optional "#i-j" span marker.
  std::optional<int> word_index;

  bool operator==(const Instance&) const = default;
};

enum class InputFormat { tsar_raw, tsar_aggregated, rank_prefixed, jsonl };

InputFormat parse_input_format(std::string_view s);

enum class ParseErrorKind {
  MalformedLine,
  ComplexWordNotInSentence,
  EmptyGold,
  BadCount,
};

std::string_view to_string(ParseErrorKind kind);

class ParseError : public DataError {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& reason);

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  ParseErrorKind kind_;
  std::size_t line_;
};

/// Stable id derived from language and 1-based line number, e.g. "en-000012".
std::string make_instance_id(Language lang, std::size_t line_number);

/// Parse one dataset line. `line_number` is 1-based and used for the id and
/// for error reporting.
Instance parse_instance(std::string_view line, InputFormat format, Language lang,
                        std::size_t line_number = 1);

/// Count identical annotations. Output is count-descending, ties broken by
/// first appearance. Identity is normalize_term; the first surface form wins.
std::vector<GoldEntry> aggregate_gold(const std::vector<std::string>& raw);

/// Merge entries whose substitutes normalize equal (counts summed), then
/// stable-sort by count descending.
std::vector<GoldEntry> order_gold(std::vector<GoldEntry> entries);

/// Checks every Instance invariant; throws DataError naming the violation.
void validate_instance(const Instance& inst);

std::string format_aggregated(const Instance& inst);
std::string to_jsonl(const Instance& inst);
Instance from_jsonl(std::string_view line, std::size_t line_number = 1);

std::vector<Instance> read_dataset(const std::filesystem::path& path, InputFormat format,
                                   Language lang);
void write_jsonl(const std::filesystem::path& path, const std::vector<Instance>& instances);

struct DatasetStats {
  std::size_t instance_count = 0;
  std::size_t min_tokens = 0;
  std::size_t max_tokens = 0;
  double avg_tokens = 0.0;
};

DatasetStats dataset_stats(const std::vector<Instance>& instances);

struct SplitSpec {
  double train_fraction = 0.70;
  double validation_fraction = 0.15;
  double test_fraction = 0.15;
  std::uint64_t seed = 42;
};

struct DatasetSplit {
  std::vector<Instance> train;
  std::vector<Instance> validation;
  std::vector<Instance> test;
};

/// Seeded shuffle, then validation and test take floor(n * fraction) each and
/// train takes the remainder. Each partition keeps input order.
DatasetSplit split_dataset(const std::vector<Instance>& instances, const SplitSpec& spec);

}  // namespace lexsimp

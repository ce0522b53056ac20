#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexsimp/control_tokens.hpp"
#include "lexsimp/corpus.hpp"
#include "lexsimp/lexicon.hpp"

namespace lexsimp {

// Source layout:
//   simplify <lang>: <CR_..> <WL_..> <WR_..> <WS_..> <SS_..> [#i-j ]<left> [T] <cw> [/T]<right>
//       </s> <cw>[ : <mlm1> <mlm2> ...]
// The span marker is optional; the MLM tail is present only when enabled and
// non-empty.

inline constexpr std::string_view kSeparator = " </s> ";
inline constexpr std::string_view kOpenMarker = "[T] ";
inline constexpr std::string_view kCloseMarker = " [/T]";

struct SerializationOptions {
  bool include_mlm = true;
  int mlm_top_k = 10;
  /// "#i-j" before the sentence: 0-based whitespace-token range of the
  /// complex word, or the instance's word_index when the dataset supplies one.
  bool include_span_marker = false;

  bool operator==(const SerializationOptions&) const = default;
};

struct SerializedExample {
  std::string source;
  std::string target;
  std::string instance_id;
  std::string candidate;
  TokenVector token_vector;
};

std::string language_prefix(Language lang);

/// Whitespace-token range [first, last] of the complex word.
std::pair<int, int> complex_word_span(const Instance& instance);

std::string build_source(const Instance& instance, const TokenVector& tokens,
                         const std::vector<std::string>& mlm_candidates,
                         const SerializationOptions& options);

/// build_source with CR pinned to 1.00.
std::string build_eval_source(const Instance& instance, TokenVector tokens,
                              const std::vector<std::string>& mlm_candidates,
                              const SerializationOptions& options);

/// One example per distinct gold substitute, in gold order; example k is
/// scored against gold position k.
std::vector<SerializedExample> build_training_examples(
    const Instance& instance, const FrequencyLexicon& lexicon, const Syllabifier& syllabifier,
    const EmbeddingProvider& embedder, const std::vector<std::string>& mlm_candidates,
    const SerializationOptions& options);

enum class SourceErrorKind { MissingPrefix, BadTokens, MissingMarkers, MissingSeparator, BadTail };

std::string_view to_string(SourceErrorKind kind);

class SourceParseError : public DataError {
 public:
  SourceParseError(SourceErrorKind kind, const std::string& reason)
      : DataError(std::string(to_string(kind)) + ": " + reason), kind_(kind) {}
  SourceErrorKind kind() const noexcept { return kind_; }

 private:
  SourceErrorKind kind_;
};

struct ParsedSource {
  Language language = Language::en;
  TokenVector tokens;
  std::optional<std::pair<int, int>> span;
  std::string sentence;
  std::string complex_word;
  std::vector<std::string> mlm_candidates;

  bool operator==(const ParsedSource&) const = default;
};

ParsedSource parse_source(std::string_view source);

}  // namespace lexsimp

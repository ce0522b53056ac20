#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexsimp/corpus.hpp"

namespace lexsimp {

/// Frequency-ordered vocabulary. Immutable after construction.
class FrequencyLexicon {
 public:
  /// `words` must be frequency-descending. Entries are casefolded; a repeated
  /// word keeps its first (most frequent) position.
  FrequencyLexicon(Language lang, std::vector<std::string> words);

  /// One word per line, most frequent first. A trailing frequency column
  /// (separated by whitespace) is ignored, so fastText .vec headers and
  /// "word count" lists both load.
  static FrequencyLexicon load(const std::filesystem::path& path, Language lang);

  /// `freq.<lang>.txt` inside `dir`.
  static std::filesystem::path default_path(const std::filesystem::path& dir, Language lang);

  Language language() const noexcept { return lang_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  /// 1-based rank of the casefolded word; |V| + 1 when out of vocabulary.
  /// A multiword entry absent from the list takes the rank of its rarest word.
  std::size_t rank_of(std::string_view word) const;

  bool contains(std::string_view word) const;

 private:
  Language lang_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> rank_;
};

class Syllabifier {
 public:
  virtual ~Syllabifier() = default;
  virtual std::string_view id() const = 0;
  /// >= 1 for any word with at least one letter. Multiword and hyphenated
  /// inputs sum their parts.
  virtual int syllable_count(std::string_view word, Language lang) const = 0;
};

/// Counts maximal vowel groups using a per-language vowel set. English drops
/// a final silent "e" (but keeps consonant+"le").
class VowelGroupSyllabifier final : public Syllabifier {
 public:
  std::string_view id() const override { return "heuristic"; }
  int syllable_count(std::string_view word, Language lang) const override;
};

/// Looks words up in a hyphenation dictionary ("word<TAB>syl-la-ble" per
/// line) and falls back to another syllabifier for unknown words.
class HyphenationDictionarySyllabifier final : public Syllabifier {
 public:
  HyphenationDictionarySyllabifier(std::unordered_map<std::string, int> counts,
                                   std::shared_ptr<const Syllabifier> fallback);
  static HyphenationDictionarySyllabifier load(const std::filesystem::path& path,
                                               std::shared_ptr<const Syllabifier> fallback);

  std::string_view id() const override { return "hyphenation-dictionary"; }
  int syllable_count(std::string_view word, Language lang) const override;

 private:
  std::unordered_map<std::string, int> counts_;
  std::shared_ptr<const Syllabifier> fallback_;
};

/// Free-function form using the default heuristic.
int syllable_count(std::string_view word, Language lang);

}  // namespace lexsimp

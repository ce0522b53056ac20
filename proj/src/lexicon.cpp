#include "lexsimp/lexicon.hpp"

#include <algorithm>
#include <fstream>

#include "lexsimp/text.hpp"

namespace lexsimp {

FrequencyLexicon::FrequencyLexicon(Language lang, std::vector<std::string> words) : lang_(lang) {
  words_.reserve(words.size());
  for (auto& w : words) {
    auto key = text::casefold(text::trim(w));
    if (key.empty()) continue;
    if (rank_.emplace(key, words_.size() + 1).second) words_.push_back(std::move(key));
  }
  if (words_.empty()) throw DataError("frequency lexicon is empty");
}

FrequencyLexicon FrequencyLexicon::load(const std::filesystem::path& path, Language lang) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open frequency list " + path.string());
  std::vector<std::string> words;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto fields = text::split_whitespace(line);
    if (fields.empty()) continue;
    if (first) {
      first = false;
      // fastText .vec header: "<count> <dim>"
      if (fields.size() == 2 &&
          std::all_of(line.begin(), line.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || c == ' ' || c == '\r'; })) {
        continue;
      }
    }
    words.emplace_back(fields.front());
  }
  return FrequencyLexicon(lang, std::move(words));
}

std::filesystem::path FrequencyLexicon::default_path(const std::filesystem::path& dir,
                                                     Language lang) {
  return dir / ("freq." + std::string(to_string(lang)) + ".txt");
}

bool FrequencyLexicon::contains(std::string_view word) const {
  return rank_.count(text::casefold(text::trim(word))) != 0;
}

std::size_t FrequencyLexicon::rank_of(std::string_view word) const {
  const auto key = text::casefold(text::collapse_whitespace(word));
  if (key.empty()) throw DataError("rank_of: empty word");
  if (auto it = rank_.find(key); it != rank_.end()) return it->second;
  const auto parts = text::split_whitespace(key);
  if (parts.size() > 1) {
    std::size_t worst = 0;
    for (auto p : parts) {
      auto it = rank_.find(std::string(p));
      worst = std::max(worst, it == rank_.end() ? words_.size() + 1 : it->second);
    }
    return worst;
  }
  return words_.size() + 1;
}

namespace {

bool is_vowel(char32_t c, Language lang) {
  switch (c) {
    case U'a':
    case U'e':
    case U'i':
    case U'o':
    case U'u':
    case U'á':
    case U'é':
    case U'í':
    case U'ó':
    case U'ú':
    case U'ü':
      return true;
    default:
      break;
  }
  switch (lang) {
    case Language::en:
      return c == U'y';
    case Language::es:
      return false;
    case Language::pt:
      return c == U'â' || c == U'ê' || c == U'ô' || c == U'ã' || c == U'õ' || c == U'à';
  }
  return false;
}

// Letters of each word-part, casefolded. Parts are split on whitespace and
// hyphens; parts with no letters are dropped.
std::vector<std::u32string> letter_parts(std::string_view word) {
  std::vector<std::u32string> parts;
  std::u32string cur;
  for (char32_t c : text::decode_utf8(word)) {
    if (text::is_space(c) || c == U'-' || c == 0x2010 || c == 0x2011) {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else if (text::is_letter(c)) {
      cur.push_back(text::fold_case(c));
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

int count_part(const std::u32string& w, Language lang) {
  int groups = 0;
  bool in_group = false;
  for (char32_t c : w) {
    const bool v = is_vowel(c, lang);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  if (lang == Language::en && groups > 1 && w.size() >= 2 && w.back() == U'e') {
    const char32_t before = w[w.size() - 2];
    const bool consonant_le =
        before == U'l' && w.size() >= 3 && !is_vowel(w[w.size() - 3], lang);
    if (!is_vowel(before, lang) && !consonant_le) --groups;
  }
  return std::max(groups, 1);
}

}  // namespace

int VowelGroupSyllabifier::syllable_count(std::string_view word, Language lang) const {
  const auto parts = letter_parts(word);
  if (parts.empty()) {
    throw DataError("syllable_count: '" + std::string(word) + "' has no letters");
  }
  int total = 0;
  for (const auto& p : parts) total += count_part(p, lang);
  return total;
}

HyphenationDictionarySyllabifier::HyphenationDictionarySyllabifier(
    std::unordered_map<std::string, int> counts, std::shared_ptr<const Syllabifier> fallback)
    : counts_(std::move(counts)), fallback_(std::move(fallback)) {
  if (!fallback_) fallback_ = std::make_shared<VowelGroupSyllabifier>();
}

HyphenationDictionarySyllabifier HyphenationDictionarySyllabifier::load(
    const std::filesystem::path& path, std::shared_ptr<const Syllabifier> fallback) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hyphenation dictionary " + path.string());
  std::unordered_map<std::string, int> counts;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, '\t');
    if (cols.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(n) + ": expected word<TAB>hyphenation");
    }
    const auto hyph = text::trim(cols[1]);
    const int syllables = static_cast<int>(std::count(hyph.begin(), hyph.end(), '-')) + 1;
    counts.emplace(text::casefold(text::trim(cols[0])), syllables);
  }
  return HyphenationDictionarySyllabifier(std::move(counts), std::move(fallback));
}

int HyphenationDictionarySyllabifier::syllable_count(std::string_view word, Language lang) const {
  const auto words = text::split_whitespace(word);
  if (words.empty()) throw DataError("syllable_count: empty word");
  int total = 0;
  for (auto w : words) {
    if (auto it = counts_.find(text::casefold(w)); it != counts_.end()) {
      total += it->second;
    } else {
      total += fallback_->syllable_count(w, lang);
    }
  }
  return total;
}

int syllable_count(std::string_view word, Language lang) {
  return VowelGroupSyllabifier{}.syllable_count(word, lang);
}

}  // namespace lexsimp

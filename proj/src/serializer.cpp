#include "lexsimp/serializer.hpp"

#include <cctype>
#include <charconv>
#include <unordered_set>

#include "lexsimp/text.hpp"

namespace lexsimp {

namespace {

constexpr std::string_view kReserved[] = {"[T]", "[/T]", "</s>"};

bool has_reserved(std::string_view s) {
  for (auto r : kReserved) {
    if (s.find(r) != std::string_view::npos) return true;
  }
  return false;
}

std::optional<int> parse_nonneg(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty() || v < 0) return std::nullopt;
  return v;
}

// "#i-j" -> (i, j)
std::optional<std::pair<int, int>> parse_span_marker(std::string_view tok) {
  if (tok.size() < 4 || tok[0] != '#') return std::nullopt;
  const auto dash = tok.find('-', 1);
  if (dash == std::string_view::npos) return std::nullopt;
  auto a = parse_nonneg(tok.substr(1, dash - 1));
  auto b = parse_nonneg(tok.substr(dash + 1));
  if (!a || !b) return std::nullopt;
  return std::pair{*a, *b};
}

}  // namespace

std::string_view to_string(SourceErrorKind kind) {
  switch (kind) {
    case SourceErrorKind::MissingPrefix:
      return "MissingPrefix";
    case SourceErrorKind::BadTokens:
      return "BadTokens";
    case SourceErrorKind::MissingMarkers:
      return "MissingMarkers";
    case SourceErrorKind::MissingSeparator:
      return "MissingSeparator";
    case SourceErrorKind::BadTail:
      return "BadTail";
  }
  return "BadTail";
}

std::string language_prefix(Language lang) {
  return "simplify " + std::string(to_string(lang)) + ":";
}

std::pair<int, int> complex_word_span(const Instance& instance) {
  const int width = static_cast<int>(text::split_whitespace(instance.complex_word).size());
  if (instance.word_index) return {*instance.word_index, *instance.word_index + width - 1};
  const auto pos = instance.sentence.find(instance.complex_word);
  if (pos == std::string::npos) throw DataError(instance.id + ": complex word not in sentence");
  const auto before = std::string_view(instance.sentence).substr(0, pos);
  int first = static_cast<int>(text::split_whitespace(before).size());
  // complex word starting mid-token, e.g. "(word"
  if (!before.empty() && !std::isspace(static_cast<unsigned char>(before.back()))) --first;
  return {first, first + width - 1};
}

std::string build_source(const Instance& instance, const TokenVector& tokens,
                         const std::vector<std::string>& mlm_candidates,
                         const SerializationOptions& options) {
  const auto& cw = instance.complex_word;
  const auto& sentence = instance.sentence;
  if (cw.empty() || sentence.find(cw) == std::string::npos) {
    throw DataError(instance.id + ": complex word '" + cw + "' not found in sentence");
  }
  if (has_reserved(sentence) || has_reserved(cw)) {
    throw DataError(instance.id + ": sentence already contains [T], [/T] or </s> markers");
  }
  if (sentence != text::collapse_whitespace(sentence) || cw != text::collapse_whitespace(cw)) {
    throw DataError(instance.id + ": sentence or complex word is not whitespace-normalized");
  }
  const auto first_token = text::split_whitespace(sentence).front();
  if (parse_span_marker(first_token)) {
    throw DataError(instance.id + ": sentence starts with a span-marker-shaped token");
  }

  std::string out = language_prefix(instance.language);
  out += ' ';
  out += render_tokens(tokens);
  out += ' ';
  if (options.include_span_marker) {
    const auto [a, b] = complex_word_span(instance);
    out += "#" + std::to_string(a) + "-" + std::to_string(b) + " ";
  }
  const auto pos = sentence.find(cw);
  out.append(sentence, 0, pos);
  out += kOpenMarker;
  out += cw;
  out += kCloseMarker;
  out.append(sentence, pos + cw.size());
  out += kSeparator;
  out += cw;

  if (options.include_mlm && !mlm_candidates.empty()) {
    if (options.mlm_top_k < 0) throw DataError("mlm_top_k must be >= 0");
    if (mlm_candidates.size() > static_cast<std::size_t>(options.mlm_top_k)) {
      throw DataError(instance.id + ": more MLM candidates than mlm_top_k");
    }
    std::unordered_set<std::string> seen;
    for (const auto& c : mlm_candidates) {
      if (c.empty() || text::contains_whitespace(c) || has_reserved(c)) {
        throw DataError(instance.id + ": invalid MLM candidate '" + c + "'");
      }
      if (!seen.insert(normalize_term(c)).second) {
        throw DataError(instance.id + ": duplicate MLM candidate '" + c + "'");
      }
    }
    out += " : ";
    out += text::join(mlm_candidates, " ");
  }
  return out;
}

std::string build_eval_source(const Instance& instance, TokenVector tokens,
                              const std::vector<std::string>& mlm_candidates,
                              const SerializationOptions& options) {
  tokens.cr = TokenValue{1.0, GridValue::one()};
  return build_source(instance, tokens, mlm_candidates, options);
}

std::vector<SerializedExample> build_training_examples(
    const Instance& instance, const FrequencyLexicon& lexicon, const Syllabifier& syllabifier,
    const EmbeddingProvider& embedder, const std::vector<std::string>& mlm_candidates,
    const SerializationOptions& options) {
  if (instance.gold.empty()) throw DataError(instance.id + ": empty gold list");
  std::vector<SerializedExample> out;
  std::unordered_set<std::string> seen;
  int position = 0;
  for (const auto& g : instance.gold) {
    if (!seen.insert(normalize_term(g.substitute)).second) continue;
    ++position;
    TokenVector tv;
    try {
      tv = compute_token_vector(instance, g.substitute, position, lexicon, syllabifier, embedder);
    } catch (const BackendError& e) {
      throw BackendError(e.backend(), instance.id + " candidate '" + g.substitute + "': " + e.what());
    } catch (const std::exception& e) {
      throw DataError(instance.id + " candidate '" + g.substitute + "': " + e.what());
    }
    out.push_back({build_source(instance, tv, mlm_candidates, options), g.substitute, instance.id,
                   g.substitute, tv});
  }
  return out;
}

ParsedSource parse_source(std::string_view source) {
  ParsedSource p;

  constexpr std::string_view kSimplify = "simplify ";
  if (source.substr(0, kSimplify.size()) != kSimplify || source.size() < kSimplify.size() + 4 ||
      source.substr(kSimplify.size() + 2, 2) != ": ") {
    throw SourceParseError(SourceErrorKind::MissingPrefix, "source lacks 'simplify <lang>:' prefix");
  }
  try {
    p.language = parse_language(source.substr(kSimplify.size(), 2));
  } catch (const DataError&) {
    throw SourceParseError(SourceErrorKind::MissingPrefix, "unknown language prefix");
  }
  std::string_view rest = source.substr(kSimplify.size() + 4);

  // five tokens of nine characters each, single-space separated
  constexpr std::size_t kTokensWidth = 5 * 9 + 4;
  if (rest.size() < kTokensWidth + 1 || rest[kTokensWidth] != ' ') {
    throw SourceParseError(SourceErrorKind::BadTokens, "control tokens missing or malformed");
  }
  try {
    p.tokens = parse_tokens(rest.substr(0, kTokensWidth));
  } catch (const std::invalid_argument& e) {
    throw SourceParseError(SourceErrorKind::BadTokens, e.what());
  }
  rest.remove_prefix(kTokensWidth + 1);

  if (const auto sp = rest.find(' '); sp != std::string_view::npos) {
    if (auto span = parse_span_marker(rest.substr(0, sp))) {
      p.span = span;
      rest.remove_prefix(sp + 1);
    }
  }

  const auto sep = rest.find(kSeparator);
  if (sep == std::string_view::npos) {
    throw SourceParseError(SourceErrorKind::MissingSeparator, "no ' </s> ' separator");
  }
  const auto marked = rest.substr(0, sep);
  const auto tail = rest.substr(sep + kSeparator.size());

  const auto open = marked.find(kOpenMarker);
  const auto close = marked.find(kCloseMarker);
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open + kOpenMarker.size() ||
      marked.find(kOpenMarker, open + 1) != std::string_view::npos ||
      marked.find(kCloseMarker, close + 1) != std::string_view::npos) {
    throw SourceParseError(SourceErrorKind::MissingMarkers, "expected exactly one [T] ... [/T]");
  }
  p.complex_word = std::string(marked.substr(open + kOpenMarker.size(), close - open - kOpenMarker.size()));
  p.sentence = std::string(marked.substr(0, open)) + p.complex_word +
               std::string(marked.substr(close + kCloseMarker.size()));

  if (tail == p.complex_word) return p;
  const std::string lead = p.complex_word + " : ";
  if (tail.substr(0, lead.size()) != lead) {
    throw SourceParseError(SourceErrorKind::BadTail,
                           "text after </s> must be the complex word, optionally followed by ' : '");
  }
  for (auto c : text::split(tail.substr(lead.size()), ' ')) {
    if (c.empty()) throw SourceParseError(SourceErrorKind::BadTail, "empty MLM candidate");
    p.mlm_candidates.emplace_back(c);
  }
  return p;
}

}  // namespace lexsimp

#include "lexsimp/control_tokens.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lexsimp/text.hpp"

namespace lexsimp {

std::string GridValue::str() const {
  const int h = hundredths_ < 0 ? -hundredths_ : hundredths_;
  std::string frac = std::to_string(h % 100);
  if (frac.size() < 2) frac.insert(0, "0");
  return (hundredths_ < 0 ? "-" : "") + std::to_string(h / 100) + "." + frac;
}

GridValue quantize(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("quantize: non-finite token value");
  if (value < 0.0) throw std::invalid_argument("quantize: negative token value");
  // round() is half-away-from-zero; scaling by 20 keeps .x25/.x75 ties exact.
  const double steps = std::round(value * 20.0);
  const double clamped = std::clamp(steps * GridValue::kStep, double{GridValue::kMin},
                                    double{GridValue::kMax});
  return GridValue::from_hundredths(static_cast<int>(clamped));
}

GridValue candidate_rank_value(int gold_position) {
  if (gold_position < 1) throw std::invalid_argument("gold position must be >= 1");
  switch (gold_position) {
    case 1:
      return GridValue::from_hundredths(100);
    case 2:
      return GridValue::from_hundredths(75);
    case 3:
      return GridValue::from_hundredths(50);
    case 4:
      return GridValue::from_hundredths(25);
    default:
      return GridValue::from_hundredths(10);
  }
}

TokenVector TokenVector::defaults() {
  const auto one = GridValue::one();
  return from_grid(one, one, one, one, one);
}

TokenVector TokenVector::from_grid(GridValue cr, GridValue wl, GridValue wr, GridValue ws,
                                   GridValue ss) {
  const auto tv = [](GridValue g) { return TokenValue{g.value(), g}; };
  return TokenVector{tv(cr), tv(wl), tv(wr), tv(ws), tv(ss)};
}

bool TokenVector::quantized() const {
  return cr.grid.is_rank_level() && wl.grid.on_grid() && wr.grid.on_grid() && ws.grid.on_grid() &&
         ss.grid.on_grid();
}

std::string render_tokens(const TokenVector& v) {
  if (!v.quantized()) throw std::invalid_argument("render_tokens: vector is not quantized");
  return "<CR_" + v.cr.grid.str() + "> <WL_" + v.wl.grid.str() + "> <WR_" + v.wr.grid.str() +
         "> <WS_" + v.ws.grid.str() + "> <SS_" + v.ss.grid.str() + ">";
}

namespace {

GridValue parse_one(std::string_view tok, std::string_view name) {
  // <NN_d.dd>
  if (tok.size() != 9 || tok[0] != '<' || tok.substr(1, 2) != name || tok[3] != '_' ||
      tok[5] != '.' || tok[8] != '>' || !std::isdigit(static_cast<unsigned char>(tok[4])) ||
      !std::isdigit(static_cast<unsigned char>(tok[6])) ||
      !std::isdigit(static_cast<unsigned char>(tok[7]))) {
    throw std::invalid_argument("malformed control token '" + std::string(tok) + "'");
  }
  return GridValue::from_hundredths((tok[4] - '0') * 100 + (tok[6] - '0') * 10 + (tok[7] - '0'));
}

}  // namespace

TokenVector parse_tokens(std::string_view rendered) {
  const auto parts = text::split(rendered, ' ');
  if (parts.size() != 5) throw std::invalid_argument("expected five control tokens");
  auto v = TokenVector::from_grid(parse_one(parts[0], "CR"), parse_one(parts[1], "WL"),
                                  parse_one(parts[2], "WR"), parse_one(parts[3], "WS"),
                                  parse_one(parts[4], "SS"));
  if (!v.quantized()) throw std::invalid_argument("control token value off grid");
  return v;
}

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t salt) {
  std::uint64_t h = 1469598103934665603ULL ^ salt;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  // final avalanche so low bits are usable as an index
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

std::vector<double> HashEmbedder::embed(std::string_view sentence) const {
  std::vector<double> v(dimension_, 0.0);
  const auto add = [&](std::string_view feature, std::uint64_t salt, double weight) {
    const auto h = fnv1a(feature, salt);
    v[h % dimension_] += (h >> 63) ? -weight : weight;
  };
  const auto folded = text::casefold(sentence);
  for (auto word : text::split_whitespace(folded)) {
    add(word, 1, 1.0);
    const auto padded = "#" + std::string(word) + "#";
    const auto cps = text::decode_utf8(padded);
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
      add(text::encode_utf8(cps.substr(i, 3)), 2, 0.5);
    }
  }
  return v;
}

std::vector<double> CachingEmbedder::embed(std::string_view sentence) const {
  const std::string key(sentence);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto v = inner_->embed(sentence);
  std::lock_guard lock(mutex_);
  return cache_.emplace(key, std::move(v)).first->second;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): identical inputs give exactly 1.
  return dot / std::sqrt(na * nb);
}

std::string replace_first(std::string_view sentence, std::string_view target,
                          std::string_view replacement) {
  const auto pos = sentence.find(target);
  if (pos == std::string_view::npos || target.empty()) return std::string(sentence);
  std::string out(sentence.substr(0, pos));
  out += replacement;
  out += sentence.substr(pos + target.size());
  return out;
}

TokenVector compute_token_vector(const Instance& instance, std::string_view substitute,
                                 int gold_position, const FrequencyLexicon& lexicon,
                                 const Syllabifier& syllabifier,
                                 const EmbeddingProvider& embedder) {
  const auto& cw = instance.complex_word;
  if (cw.empty()) throw DataError(instance.id + ": zero-length complex word");
  if (text::trim(substitute).empty()) throw DataError(instance.id + ": empty substitute");
  if (instance.sentence.find(cw) == std::string::npos) {
    throw DataError(instance.id + ": complex word not in sentence");
  }

  TokenVector v;
  v.cr.grid = candidate_rank_value(gold_position);
  v.cr.raw = v.cr.grid.value();

  v.wl.raw = static_cast<double>(text::char_count(substitute)) /
             static_cast<double>(text::char_count(cw));
  v.wr.raw = static_cast<double>(lexicon.rank_of(substitute)) /
             static_cast<double>(lexicon.rank_of(cw));
  v.ws.raw = static_cast<double>(syllabifier.syllable_count(substitute, instance.language)) /
             static_cast<double>(syllabifier.syllable_count(cw, instance.language));

  std::vector<double> src, tgt;
  try {
    src = embedder.embed(instance.sentence);
    tgt = embedder.embed(replace_first(instance.sentence, cw, substitute));
  } catch (const BackendError&) {
    throw;
  } catch (const std::exception& e) {
    throw BackendError(embedder.id(), e.what());
  }
  v.ss.raw = std::clamp(cosine_similarity(src, tgt), 0.0, 1.0);

  v.wl.grid = quantize(v.wl.raw);
  v.wr.grid = quantize(v.wr.raw);
  v.ws.grid = quantize(v.ws.raw);
  v.ss.grid = quantize(v.ss.raw);
  return v;
}

}  // namespace lexsimp

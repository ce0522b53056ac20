#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexsimp/corpus.hpp"
#include "lexsimp/lexicon.hpp"

namespace lexsimp {

/// A token value in hundredths, e.g. 125 for 1.25. The searchable grid is
/// 0.50..2.00 in steps of 0.05 (31 values); CR additionally uses the ranking
/// levels 0.25 and 0.10.
class GridValue {
 public:
  static constexpr int kMin = 50;
  static constexpr int kMax = 200;
  static constexpr int kStep = 5;
  static constexpr int kLevels = (kMax - kMin) / kStep + 1;

  constexpr GridValue() = default;
  static constexpr GridValue from_hundredths(int h) { return GridValue(h); }
  /// i-th grid point, 0 <= i < kLevels.
  static constexpr GridValue level(int i) { return GridValue(kMin + i * kStep); }
  static constexpr GridValue one() { return GridValue(100); }

  constexpr int hundredths() const { return hundredths_; }
  constexpr double value() const { return hundredths_ / 100.0; }
  constexpr int level_index() const { return (hundredths_ - kMin) / kStep; }

  /// On the 0.05 grid inside [0.50, 2.00].
  constexpr bool on_grid() const {
    return hundredths_ >= kMin && hundredths_ <= kMax && hundredths_ % kStep == 0;
  }
  /// One of 1.00, 0.75, 0.50, 0.25, 0.10.
  constexpr bool is_rank_level() const {
    return hundredths_ == 100 || hundredths_ == 75 || hundredths_ == 50 || hundredths_ == 25 ||
           hundredths_ == 10;
  }

  /// "x.xx"
  std::string str() const;

  constexpr auto operator<=>(const GridValue&) const = default;

 private:
  constexpr explicit GridValue(int h) : hundredths_(h) {}
  int hundredths_ = 100;
};

/// Round to the nearest multiple of 0.05 (half away from zero), then clamp
/// to [0.50, 2.00]. Throws std::invalid_argument on NaN, infinity or
/// negative input.
GridValue quantize(double value);

/// Candidate-ranking level for a 1-based gold position:
/// 1 -> 1.00, 2 -> 0.75, 3 -> 0.50, 4 -> 0.25, >=5 -> 0.10.
GridValue candidate_rank_value(int gold_position);

struct TokenValue {
  double raw = 1.0;
  GridValue grid;

  bool operator==(const TokenValue&) const = default;
};

struct TokenVector {
  TokenValue cr, wl, wr, ws, ss;

  /// Every token at 1.00; the validation/inference default.
  static TokenVector defaults();
  /// Vector whose raw values are the grid values themselves.
  static TokenVector from_grid(GridValue cr, GridValue wl, GridValue wr, GridValue ws,
                               GridValue ss);

  /// CR on a ranking level and the other four on the search grid.
  bool quantized() const;

  bool operator==(const TokenVector&) const = default;
};

/// "<CR_x.xx> <WL_x.xx> <WR_x.xx> <WS_x.xx> <SS_x.xx>". Throws
/// std::invalid_argument when the vector is not quantized.
std::string render_tokens(const TokenVector& v);

/// Inverse of render_tokens. Returned raw values equal the grid values.
TokenVector parse_tokens(std::string_view rendered);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;
  /// Must be safe to call concurrently.
  virtual std::vector<double> embed(std::string_view sentence) const = 0;
};

/// Deterministic model-free embedder: signed feature hashing of casefolded
/// word unigrams and character trigrams.
class HashEmbedder final : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::size_t dimension = 256) : dimension_(dimension) {}
  std::string id() const override { return "hash-stub"; }
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view sentence) const override;

 private:
  std::size_t dimension_;
};

/// Memoizes another provider. Thread-safe.
class CachingEmbedder final : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner)
      : inner_(std::move(inner)) {}
  std::string id() const override { return inner_->id(); }
  std::size_t dimension() const override { return inner_->dimension(); }
  std::vector<double> embed(std::string_view sentence) const override;

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, std::vector<double>> cache_;
};

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

/// Replaces the first occurrence of `target` in `sentence`.
std::string replace_first(std::string_view sentence, std::string_view target,
                          std::string_view replacement);

TokenVector compute_token_vector(const Instance& instance, std::string_view substitute,
                                 int gold_position, const FrequencyLexicon& lexicon,
                                 const Syllabifier& syllabifier,
                                 const EmbeddingProvider& embedder);

}  // namespace lexsimp

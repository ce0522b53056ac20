#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "lexsimp/corpus.hpp"
#include "lexsimp/text.hpp"

namespace lexsimp {

/// Exact non-negative fraction, always reduced. Metric values are kept in
/// this form and converted to double only for display.
class Ratio {
 public:
  constexpr Ratio() = default;
  Ratio(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  Ratio operator+(const Ratio& o) const;
  Ratio operator/(std::int64_t d) const;

  bool operator==(const Ratio&) const = default;
  bool operator<(const Ratio& o) const;
  bool operator<=(const Ratio& o) const { return !(o < *this); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct GoldView {
  std::unordered_set<std::string> gold_set;  // normalized substitutes
  std::unordered_set<std::string> top_gold;  // normalized maximal-count substitutes
};

GoldView make_gold_view(const std::vector<GoldEntry>& gold);
GoldView make_gold_view(const Instance& instance);

using Predictions = std::vector<std::vector<std::string>>;

Ratio acc_at_1(const Predictions& predictions, const std::vector<GoldView>& gold);
Ratio acc_at_n_top1(int n, const Predictions& predictions, const std::vector<GoldView>& gold);
Ratio potential_at_k(int k, const Predictions& predictions, const std::vector<GoldView>& gold);
/// Per instance AP@K = (1/K) * sum_{i <= min(K, m)} precision@i * rel_i,
/// m = number of predictions. MAP@K is the mean over instances.
Ratio map_at_k(int k, const Predictions& predictions, const std::vector<GoldView>& gold);

inline constexpr std::array<int, 3> kTopN = {1, 2, 3};
inline constexpr std::array<int, 3> kTopK = {3, 5, 10};

struct MetricReport {
  Ratio acc_at_1;
  std::array<Ratio, 3> acc_at_n_top1;  // N = 1, 2, 3
  std::array<Ratio, 3> map_at_k;       // K = 3, 5, 10
  std::array<Ratio, 3> potential_at_k; // K = 3, 5, 10
  std::size_t instance_count = 0;

  bool operator==(const MetricReport&) const = default;
};

MetricReport evaluate_all(const Predictions& predictions, const std::vector<GoldView>& gold);

/// "key=value" lines, values with 4 decimals plus the exact fraction.
std::string format_key_value(const MetricReport& report);
/// One header line and one row per system, in the ACC@1 | ACC@N@Top1 |
/// MAP@K | Potential@K column order.
std::string format_table(const std::vector<std::pair<std::string, MetricReport>>& rows);

}  // namespace lexsimp

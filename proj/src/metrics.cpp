#include "lexsimp/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lexsimp {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("metric fraction overflow");
  return static_cast<std::int64_t>(v);
}

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Ratio make_reduced(i128 num, i128 den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Ratio(narrow(num), narrow(den));
}

void check_aligned(const Predictions& predictions, const std::vector<GoldView>& gold) {
  if (predictions.size() != gold.size()) {
    throw DataError("prediction/gold count mismatch: " + std::to_string(predictions.size()) +
                    " vs " + std::to_string(gold.size()));
  }
  if (gold.empty()) throw DataError("no instances to score");
}

// Normalizes the first `limit` predictions of one instance.
std::vector<std::string> head(const std::vector<std::string>& preds, std::size_t limit) {
  std::vector<std::string> out;
  const auto n = std::min(limit, preds.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(normalize_term(preds[i]));
  return out;
}

bool any_in(const std::vector<std::string>& preds, const std::unordered_set<std::string>& set) {
  return std::any_of(preds.begin(), preds.end(), [&](const auto& p) { return set.count(p) != 0; });
}

template <typename HitFn>
Ratio fraction_of_hits(const Predictions& predictions, const std::vector<GoldView>& gold,
                       HitFn&& hit) {
  check_aligned(predictions, gold);
  std::int64_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (hit(predictions[i], gold[i])) ++hits;
  }
  return Ratio(hits, static_cast<std::int64_t>(gold.size()));
}

}  // namespace

Ratio::Ratio(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::domain_error("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const auto g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Ratio Ratio::operator+(const Ratio& o) const {
  return make_reduced(i128{num_} * o.den_ + i128{o.num_} * den_, i128{den_} * o.den_);
}

Ratio Ratio::operator/(std::int64_t d) const { return make_reduced(num_, i128{den_} * d); }

bool Ratio::operator<(const Ratio& o) const { return i128{num_} * o.den_ < i128{o.num_} * den_; }

GoldView make_gold_view(const std::vector<GoldEntry>& gold) {
  if (gold.empty()) throw DataError("gold list is empty");
  GoldView v;
  int best = 0;
  for (const auto& g : gold) best = std::max(best, g.count);
  for (const auto& g : gold) {
    auto key = normalize_term(g.substitute);
    if (g.count == best) v.top_gold.insert(key);
    v.gold_set.insert(std::move(key));
  }
  return v;
}

GoldView make_gold_view(const Instance& instance) { return make_gold_view(instance.gold); }

Ratio acc_at_1(const Predictions& predictions, const std::vector<GoldView>& gold) {
  return fraction_of_hits(predictions, gold, [](const auto& preds, const GoldView& g) {
    return !preds.empty() && g.gold_set.count(normalize_term(preds.front())) != 0;
  });
}

Ratio acc_at_n_top1(int n, const Predictions& predictions, const std::vector<GoldView>& gold) {
  if (n < 1) throw std::invalid_argument("N must be >= 1");
  return fraction_of_hits(predictions, gold, [n](const auto& preds, const GoldView& g) {
    return any_in(head(preds, static_cast<std::size_t>(n)), g.top_gold);
  });
}

Ratio potential_at_k(int k, const Predictions& predictions, const std::vector<GoldView>& gold) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  return fraction_of_hits(predictions, gold, [k](const auto& preds, const GoldView& g) {
    return any_in(head(preds, static_cast<std::size_t>(k)), g.gold_set);
  });
}

Ratio map_at_k(int k, const Predictions& predictions, const std::vector<GoldView>& gold) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  check_aligned(predictions, gold);
  Ratio total;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto preds = head(predictions[i], static_cast<std::size_t>(k));
    Ratio ap;
    std::int64_t hits = 0;
    for (std::size_t pos = 0; pos < preds.size(); ++pos) {
      if (gold[i].gold_set.count(preds[pos]) == 0) continue;
      ++hits;
      ap = ap + Ratio(hits, static_cast<std::int64_t>(pos + 1));
    }
    total = total + ap / k;
  }
  return total / static_cast<std::int64_t>(gold.size());
}

MetricReport evaluate_all(const Predictions& predictions, const std::vector<GoldView>& gold) {
  check_aligned(predictions, gold);
  MetricReport r;
  r.instance_count = gold.size();
  r.acc_at_1 = acc_at_1(predictions, gold);
  for (std::size_t i = 0; i < kTopN.size(); ++i) {
    r.acc_at_n_top1[i] = acc_at_n_top1(kTopN[i], predictions, gold);
  }
  for (std::size_t i = 0; i < kTopK.size(); ++i) {
    r.map_at_k[i] = map_at_k(kTopK[i], predictions, gold);
    r.potential_at_k[i] = potential_at_k(kTopK[i], predictions, gold);
  }
  return r;
}

namespace {

std::string fixed4(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4) << v;
  return os.str();
}

}  // namespace

std::string format_key_value(const MetricReport& r) {
  std::ostringstream os;
  const auto line = [&os](const std::string& key, const Ratio& v) {
    os << key << '=' << fixed4(v.value()) << " (" << v.num() << '/' << v.den() << ")\n";
  };
  os << "instances=" << r.instance_count << '\n';
  line("acc@1", r.acc_at_1);
  for (std::size_t i = 0; i < kTopN.size(); ++i) {
    line("acc@" + std::to_string(kTopN[i]) + "@top1", r.acc_at_n_top1[i]);
  }
  for (std::size_t i = 0; i < kTopK.size(); ++i) {
    line("map@" + std::to_string(kTopK[i]), r.map_at_k[i]);
  }
  for (std::size_t i = 0; i < kTopK.size(); ++i) {
    line("potential@" + std::to_string(kTopK[i]), r.potential_at_k[i]);
  }
  return os.str();
}

std::string format_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::size_t name_width = 6;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(name_width)) << "System";
  for (const char* h : {"ACC@1", "ACC@1@Top1", "ACC@2@Top1", "ACC@3@Top1", "MAP@3", "MAP@5",
                        "MAP@10", "Potential@3", "Potential@5", "Potential@10"}) {
    os << "  " << std::setw(12) << h;
  }
  os << '\n';
  for (const auto& [name, r] : rows) {
    os << std::left << std::setw(static_cast<int>(name_width)) << name;
    const auto cell = [&os](const Ratio& v) { os << "  " << std::setw(12) << fixed4(v.value()); };
    cell(r.acc_at_1);
    for (const auto& v : r.acc_at_n_top1) cell(v);
    for (const auto& v : r.map_at_k) cell(v);
    for (const auto& v : r.potential_at_k) cell(v);
    os << '\n';
  }
  return os.str();
}

}  // namespace lexsimp

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lexsimp/corpus.hpp"
#include "lexsimp/lexicon.hpp"
#include "lexsimp/metrics.hpp"

namespace lexsimp {

struct ScoredCandidate {
  std::string candidate;
  double score = 0.0;

  bool operator==(const ScoredCandidate&) const = default;
};

/// Masked-word prediction. `text` holds exactly one "[MASK]".
class FillMaskClient {
 public:
  virtual ~FillMaskClient() = default;
  virtual std::string id() const = 0;
  virtual std::vector<ScoredCandidate> fill_mask(std::string_view text, int k) const = 0;
};

/// Table-driven fill-mask keyed by the full query text. Unknown queries
/// return an empty list.
class TableFillMaskClient final : public FillMaskClient {
 public:
  TableFillMaskClient(std::string id,
                      std::unordered_map<std::string, std::vector<ScoredCandidate>> table)
      : id_(std::move(id)), table_(std::move(table)) {}
  std::string id() const override { return id_; }
  std::vector<ScoredCandidate> fill_mask(std::string_view text, int k) const override;

 private:
  std::string id_;
  std::unordered_map<std::string, std::vector<ScoredCandidate>> table_;
};

inline constexpr std::string_view kMaskToken = "[MASK]";

/// "<sentence> </s> <sentence with the complex word replaced by [MASK]>"
std::string build_mlm_query(std::string_view sentence, std::string_view complex_word);

/// WordPiece "##" continuations, SentencePiece/BPE continuation pieces that
/// are not standalone words, and punctuation-only strings.
bool is_subword_fragment(std::string_view candidate);

/// Top-k fill-mask candidates by descending score; fragments, empties and
/// duplicates (normalize_term) are removed before truncation.
std::vector<std::string> extract_mlm_candidates(std::string_view sentence,
                                                std::string_view complex_word, int k,
                                                const FillMaskClient& client);

/// Stable dedup on normalize_term, drop the complex word, truncate.
std::vector<std::string> postfilter(const std::vector<std::string>& raw,
                                    std::string_view complex_word, std::size_t limit);

enum class BackendKind { mock_table, lexicon_baseline, remote_seq2seq, remote_fill_mask };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view s);

class GeneratorBackend {
 public:
  virtual ~GeneratorBackend() = default;
  virtual std::string id() const = 0;
  virtual BackendKind kind() const = 0;
  /// Up to `beam_width` raw candidates in model-score order. Must be
  /// deterministic and safe to call concurrently.
  virtual std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                            int beam_width) const = 0;
};

/// Returns a fixed list per (sentence, complex word).
class MockTableBackend final : public GeneratorBackend {
 public:
  using Key = std::pair<std::string, std::string>;

  explicit MockTableBackend(std::map<Key, std::vector<std::string>> table,
                            std::string id = "mock_table")
      : table_(std::move(table)), id_(std::move(id)) {}

  /// Answers every instance with its own gold substitutes in gold order.
  static MockTableBackend from_gold(const std::vector<Instance>& instances,
                                    std::string id = "mock_table");

  std::string id() const override { return id_; }
  BackendKind kind() const override { return BackendKind::mock_table; }
  std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                    int beam_width) const override;

 private:
  std::map<Key, std::vector<std::string>> table_;
  std::string id_;
};

/// Offline baseline: synonyms of the complex word ordered by frequency rank.
/// Exists to run the pipeline without models.
class LexiconBaselineBackend final : public GeneratorBackend {
 public:
  LexiconBaselineBackend(std::unordered_map<std::string, std::vector<std::string>> synonyms,
                         std::shared_ptr<const FrequencyLexicon> lexicon);

  /// One line per headword: "word<TAB>syn1<TAB>syn2..."
  static std::unordered_map<std::string, std::vector<std::string>> load_synonyms(
      const std::filesystem::path& path);

  std::string id() const override { return "lexicon_baseline"; }
  BackendKind kind() const override { return BackendKind::lexicon_baseline; }
  std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                    int beam_width) const override;

 private:
  std::unordered_map<std::string, std::vector<std::string>> synonyms_;
  std::shared_ptr<const FrequencyLexicon> lexicon_;
};

/// Uses fill-mask predictions as the candidate list.
class FillMaskBackend final : public GeneratorBackend {
 public:
  explicit FillMaskBackend(std::shared_ptr<const FillMaskClient> client)
      : client_(std::move(client)) {}
  std::string id() const override { return client_->id(); }
  BackendKind kind() const override { return BackendKind::remote_fill_mask; }
  std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                    int beam_width) const override;

 private:
  std::shared_ptr<const FillMaskClient> client_;
};

struct CandidateList {
  std::string instance_id;
  std::vector<std::string> candidates;
  std::string backend;
  std::size_t raw_count = 0;
};

inline constexpr int kDefaultBeamWidth = 15;
inline constexpr std::size_t kDefaultCandidateLimit = 10;

/// Throws BackendError when the backend fails and EmptyBackendOutput when it
/// returns nothing; an empty list after filtering is a normal result.
CandidateList generate_candidates(const Instance& instance, const GeneratorBackend& backend,
                                  std::string_view source, int beam_width = kDefaultBeamWidth,
                                  std::size_t limit = kDefaultCandidateLimit);

struct BackendPotential {
  std::string backend;
  std::optional<Ratio> potential;  // empty when the backend failed
  std::string diagnostic;
};

/// Potential@k of each backend's raw top-k over the dataset, best first.
/// Failed backends are listed last with a diagnostic.
std::vector<BackendPotential> rank_generators_by_potential(
    const std::vector<Instance>& dataset,
    const std::vector<std::shared_ptr<const GeneratorBackend>>& backends, int k = 10);

/// MLM candidate file: one {"id", "candidates": [...]} object per line.
using MlmTable = std::map<std::string, std::vector<std::string>>;
MlmTable read_mlm_file(const std::filesystem::path& path);
std::string format_mlm_line(const std::string& instance_id, const std::vector<std::string>& candidates);

/// TSAR submission row: sentence, complex word, ranked candidates.
struct PredictionRow {
  std::string sentence;
  std::string complex_word;
  std::vector<std::string> candidates;
};

std::vector<PredictionRow> read_predictions(const std::filesystem::path& path);
void write_predictions(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);
std::string format_prediction(const PredictionRow& row);

/// Pairs prediction rows with gold instances line by line; sentence and
/// complex word must agree (after whitespace normalization).
Predictions align_predictions(const std::vector<PredictionRow>& rows,
                              const std::vector<Instance>& gold);

}  // namespace lexsimp

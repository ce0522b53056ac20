#pragma once

// HTTP client for the model sidecar. Wire format (JSON bodies):
//
//   POST /fill_mask  {"model", "text", "k"}
//                 -> {"model", "results": [{"candidate", "score"}, ...]}
//   POST /embed      {"model", "sentence"}
//                 -> {"model", "vector": [float, ...]}
//   POST /generate   {"model", "source", "beam_width", "max_candidates"}
//                 -> {"model", "results": [{"candidate", "score"}, ...]}
//   GET  /healthz    -> 200
//
// Non-200 replies carry {"error": "..."}. Results must be score-descending
// with finite scores, and "model" must echo the request.

#include <chrono>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lexsimp/control_tokens.hpp"
#include "lexsimp/generation.hpp"

namespace lexsimp {

class SidecarClient {
 public:
  explicit SidecarClient(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::seconds(60));

  const std::string& base_url() const noexcept { return base_url_; }

  std::vector<ScoredCandidate> fill_mask(std::string_view model, std::string_view text,
                                         int k) const;
  std::vector<double> embed(std::string_view model, std::string_view sentence) const;
  std::vector<ScoredCandidate> generate(std::string_view model, std::string_view source,
                                        int beam_width, int max_candidates) const;
  bool healthy() const;

 private:
  std::string post(std::string_view path, const std::string& body) const;

  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

class SidecarFillMask final : public FillMaskClient {
 public:
  SidecarFillMask(std::shared_ptr<const SidecarClient> client, std::string model)
      : client_(std::move(client)), model_(std::move(model)) {}
  std::string id() const override { return model_; }
  std::vector<ScoredCandidate> fill_mask(std::string_view text, int k) const override {
    return client_->fill_mask(model_, text, k);
  }

 private:
  std::shared_ptr<const SidecarClient> client_;
  std::string model_;
};

class SidecarEmbedder final : public EmbeddingProvider {
 public:
  SidecarEmbedder(std::shared_ptr<const SidecarClient> client, std::string model,
                  std::size_t dimension = 0)
      : client_(std::move(client)), model_(std::move(model)), dimension_(dimension) {}
  std::string id() const override { return "sidecar:" + model_; }
  /// 0 until known; the sidecar defines it.
  std::size_t dimension() const override { return dimension_; }
  std::vector<double> embed(std::string_view sentence) const override;

 private:
  std::shared_ptr<const SidecarClient> client_;
  std::string model_;
  std::size_t dimension_;
};

/// Fine-tuned seq2seq model behind /generate; beam search, no sampling.
class RemoteSeq2SeqBackend final : public GeneratorBackend {
 public:
  RemoteSeq2SeqBackend(std::shared_ptr<const SidecarClient> client, std::string model)
      : client_(std::move(client)), model_(std::move(model)) {}
  std::string id() const override { return model_; }
  BackendKind kind() const override { return BackendKind::remote_seq2seq; }
  std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                    int beam_width) const override;

 private:
  std::shared_ptr<const SidecarClient> client_;
  std::string model_;
};

}  // namespace lexsimp

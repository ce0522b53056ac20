#include "lexsimp/sidecar_client.hpp"

#include <cmath>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace lexsimp {

namespace {

using nlohmann::json;

constexpr const char* kBackend = "sidecar";

json parse_reply(const std::string& body, std::string_view endpoint, std::string_view model) {
  json j;
  try {
    j = json::parse(body);
  } catch (const std::exception& e) {
    throw BackendError(kBackend, std::string(endpoint) + ": invalid JSON reply: " + e.what());
  }
  if (!j.is_object() || !j.contains("model") || j["model"] != model) {
    throw BackendError(kBackend, std::string(endpoint) + ": reply does not echo model '" +
                                     std::string(model) + "'");
  }
  return j;
}

std::vector<ScoredCandidate> parse_results(const json& j, std::string_view endpoint) {
  if (!j.contains("results") || !j["results"].is_array()) {
    throw BackendError(kBackend, std::string(endpoint) + ": reply lacks a results array");
  }
  std::vector<ScoredCandidate> out;
  for (const auto& r : j["results"]) {
    if (!r.contains("candidate") || !r["candidate"].is_string() || !r.contains("score") ||
        !r["score"].is_number()) {
      throw BackendError(kBackend, std::string(endpoint) + ": malformed result entry");
    }
    ScoredCandidate c{r["candidate"].get<std::string>(), r["score"].get<double>()};
    if (!std::isfinite(c.score)) {
      throw BackendError(kBackend, std::string(endpoint) + ": non-finite score");
    }
    if (!out.empty() && out.back().score < c.score) {
      throw BackendError(kBackend, std::string(endpoint) + ": results not score-descending");
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

SidecarClient::SidecarClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (!base_url_.starts_with("http://") && !base_url_.starts_with("https://")) {
    throw std::invalid_argument("sidecar URL must start with http:// or https://: '" + base_url_ + "'");
  }
}

std::string SidecarClient::post(std::string_view path, const std::string& body) const {
  // One connection per request: httplib::Client is not safe for concurrent use.
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);
  auto res = cli.Post(std::string(path), body, "application/json");
  if (!res) {
    throw BackendError(kBackend, base_url_ + std::string(path) +
                                     " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    std::string detail = res->body;
    try {
      auto j = json::parse(res->body);
      if (j.contains("error")) detail = j["error"].get<std::string>();
    } catch (const std::exception&) {
    }
    throw BackendError(kBackend, std::string(path) + " returned HTTP " +
                                     std::to_string(res->status) + ": " + detail);
  }
  return res->body;
}

std::vector<ScoredCandidate> SidecarClient::fill_mask(std::string_view model,
                                                      std::string_view text, int k) const {
  const json req = {{"model", model}, {"text", text}, {"k", k}};
  const auto j = parse_reply(post("/fill_mask", req.dump()), "/fill_mask", model);
  return parse_results(j, "/fill_mask");
}

std::vector<double> SidecarClient::embed(std::string_view model, std::string_view sentence) const {
  const json req = {{"model", model}, {"sentence", sentence}};
  const auto j = parse_reply(post("/embed", req.dump()), "/embed", model);
  if (!j.contains("vector") || !j["vector"].is_array() || j["vector"].empty()) {
    throw BackendError(kBackend, "/embed: reply lacks a vector");
  }
  std::vector<double> v;
  v.reserve(j["vector"].size());
  for (const auto& x : j["vector"]) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw BackendError(kBackend, "/embed: non-numeric vector entry");
    }
    v.push_back(x.get<double>());
  }
  return v;
}

std::vector<ScoredCandidate> SidecarClient::generate(std::string_view model,
                                                     std::string_view source, int beam_width,
                                                     int max_candidates) const {
  const json req = {{"model", model},
                    {"source", source},
                    {"beam_width", beam_width},
                    {"max_candidates", max_candidates}};
  const auto j = parse_reply(post("/generate", req.dump()), "/generate", model);
  auto out = parse_results(j, "/generate");
  if (out.size() > static_cast<std::size_t>(beam_width)) {
    throw BackendError(kBackend, "/generate: more candidates than beam width");
  }
  return out;
}

bool SidecarClient::healthy() const {
  httplib::Client cli(base_url_);
  cli.set_connection_timeout(timeout_);
  auto res = cli.Get("/healthz");
  return res && res->status == 200;
}

std::vector<double> SidecarEmbedder::embed(std::string_view sentence) const {
  auto v = client_->embed(model_, sentence);
  if (dimension_ != 0 && v.size() != dimension_) {
    throw BackendError(id(), "embedding dimension " + std::to_string(v.size()) + ", expected " +
                                 std::to_string(dimension_));
  }
  return v;
}

std::vector<std::string> RemoteSeq2SeqBackend::generate(const Instance&, std::string_view source,
                                                        int beam_width) const {
  std::vector<std::string> out;
  for (auto& c : client_->generate(model_, source, beam_width, beam_width)) {
    out.push_back(std::move(c.candidate));
  }
  return out;
}

}  // namespace lexsimp

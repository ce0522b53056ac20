#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "lexsimp/sidecar_client.hpp"
#include "support.hpp"

using namespace lexsimp;
using nlohmann::json;

namespace {

/// Stub sidecar. Misbehaviour is selected through the model name.
class StubServer {
 public:
  StubServer() {
    server_.Post("/fill_mask", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      const std::string model = body["model"];
      if (model == "broken") {
        res.status = 500;
        res.set_content(R"({"error":"model failed to load"})", "application/json");
        return;
      }
      json results = json::array();
      if (model == "unsorted") {
        results = {{{"candidate", "a"}, {"score", 0.1}}, {{"candidate", "b"}, {"score", 0.9}}};
      } else {
        const int k = body["k"];
        for (int i = 0; i < k; ++i) {
          results.push_back({{"candidate", "w" + std::to_string(i)}, {"score", 1.0 / (i + 1)}});
        }
      }
      const std::string echo = model == "liar" ? "other" : model;
      res.set_content(json{{"model", echo}, {"results", results}}.dump(), "application/json");
    });
    server_.Post("/embed", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      res.set_content(json{{"model", body["model"]}, {"vector", {1.0, 2.0, 2.0}}}.dump(), "application/json");
    });
    server_.Post("/generate", [](const httplib::Request& req, httplib::Response& res) {
      const auto body = json::parse(req.body);
      const int beam = body["beam_width"];
      json results = json::array();
      for (int i = 0; i < beam + (body["model"] == "overflow" ? 1 : 0); ++i) {
        results.push_back({{"candidate", i == 0 ? "awards" : "c" + std::to_string(i)}, {"score", -i}});
      }
      res.set_content(json{{"model", body["model"]}, {"results", results}}.dump(), "application/json");
    });
    server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("sidecar client against a stub server") {
  StubServer server;
  auto client = std::make_shared<SidecarClient>(server.url(), std::chrono::seconds(5));
  CHECK(client->healthy());

  const auto fm = client->fill_mask("roberta-base", "a [MASK] b", 3);
  REQUIRE(fm.size() == 3);
  CHECK(fm[0].candidate == "w0");
  CHECK(fm[0].score > fm[2].score);

  CHECK_THROWS_AS(client->fill_mask("unsorted", "a [MASK] b", 2), BackendError);
  CHECK_THROWS_AS(client->fill_mask("liar", "a [MASK] b", 2), BackendError);
  try {
    client->fill_mask("broken", "a [MASK] b", 2);
    FAIL("no error");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("model failed to load") != std::string::npos);
  }

  const SidecarEmbedder emb(client, "mpnet");
  CHECK(emb.embed("s") == std::vector<double>{1.0, 2.0, 2.0});
  CHECK(emb.id() == "sidecar:mpnet");

  const RemoteSeq2SeqBackend gen(client, "t5-large");
  const auto inst = testing::trophies_instance();
  const auto out = gen.generate(inst, testing::kTrophiesSource, 15);
  CHECK(out.size() == 15);
  CHECK(out.front() == "awards");
  const RemoteSeq2SeqBackend over(client, "overflow");
  CHECK_THROWS_AS(over.generate(inst, testing::kTrophiesSource, 15), BackendError);

  const FillMaskBackend fmb(std::make_shared<SidecarFillMask>(client, "roberta-base"));
  CHECK(fmb.generate(inst, "", 4).size() == 4);
}

TEST_CASE("unreachable sidecar is a backend error") {
  const SidecarClient client("http://127.0.0.1:1", std::chrono::milliseconds(500));
  CHECK_FALSE(client.healthy());
  CHECK_THROWS_AS(client.fill_mask("m", "a [MASK]", 1), BackendError);
  CHECK_THROWS_AS(SidecarClient("not a url"), std::invalid_argument);
}

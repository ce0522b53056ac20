#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "lexsimp/harness.hpp"
#include "support.hpp"

using namespace lexsimp;
using namespace lexsimp::testing;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string count_lines(const std::string& s) {
  return std::to_string(std::count(s.begin(), s.end(), '\n'));
}

struct Workspace {
  TempDir dir;
  std::string dataset;
  std::string freq;
  Workspace() {
    ::unsetenv("LEXSIMP_FREQ_DIR");
    ::unsetenv("LEXSIMP_SIDECAR_URL");
    dataset = dir.write("d.tsv", kMotiveEn + "\n" +
                                     "I want to continue playing at the highest level and win as many "
                                     "trophies as possible.\ttrophies\tawards:3\tmedals:2\tprizes:1\n")
                  .string();
    freq = dir.write("freq.en.txt", "the\nwas\nfor\nnot\nreason\naim\nawards\nprizes\nmotive\n").string();
  }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("stats") {
  Workspace w;
  const auto r = run({"stats", "--dataset", w.dataset});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("instances\t2\n") != std::string::npos);
  CHECK(r.out.find("min_tokens\t8\n") != std::string::npos);
  CHECK(r.out.find("max_tokens\t16\n") != std::string::npos);
  CHECK(r.out.find("avg_tokens\t12.00\n") != std::string::npos);
}

TEST_CASE("preprocess fan-out and reproducibility") {
  Workspace w;
  const auto en = w.dir.write("en.tsv", kMotiveEn + "\n").string();
  auto r = run({"preprocess", "--dataset", en, "--out", w.path("a/train.tsv"), "--freq", w.freq});
  REQUIRE(r.code == kExitOk);
  const auto first = slurp(w.path("a/train.tsv"));
  CHECK(count_lines(first) == "8");
  CHECK(first.starts_with("simplify en: <CR_1.00> "));
  CHECK(first.find("\treason\n") != std::string::npos);
  const auto manifest = slurp(w.path("a/manifest.json"));
  const auto m = nlohmann::json::parse(manifest);
  CHECK(m["command"] == "preprocess");
  CHECK(m["outputs"][0]["path"] == "train.tsv");

  r = run({"preprocess", "--dataset", en, "--out", w.path("b/train.tsv"), "--freq", w.freq, "--jobs", "4"});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(w.path("b/train.tsv")) == first);
  CHECK(slurp(w.path("b/manifest.json")) == manifest);

  r = run({"preprocess", "--dataset", w.dataset, "--mode", "eval", "--out", w.path("c/eval.txt"),
           "--span-marker", "--tokens", "1.25,1.05,1.60,1.00"});
  REQUIRE(r.code == kExitOk);
  const auto eval = slurp(w.path("c/eval.txt"));
  CHECK(eval.find("<CR_1.00> <WL_1.25> <WR_1.05> <WS_1.60> <SS_1.00> #13-13 I want") != std::string::npos);

  CHECK(run({"preprocess", "--dataset", w.dataset, "--mode", "eval", "--out", w.path("d.txt"), "--tokens",
             "1.03,1,1,1"})
            .code == kExitUsage);
}

TEST_CASE("generate then score gives perfect metrics with the gold mock") {
  Workspace w;
  auto r = run({"generate", "--dataset", w.dataset, "--out", w.path("gen/pred.tsv")});
  REQUIRE(r.code == kExitOk);
  r = run({"score", "--pred", w.path("gen/pred.tsv"), "--gold", w.dataset, "--out", w.path("score/report.txt")});
  REQUIRE(r.code == kExitOk);
  for (auto key : {"acc@1=1.0000", "acc@1@top1=1.0000", "acc@2@top1=1.0000", "acc@3@top1=1.0000",
                   "potential@3=1.0000", "potential@5=1.0000", "potential@10=1.0000"}) {
    CHECK(r.out.find(key) != std::string::npos);
  }
  CHECK(std::filesystem::exists(w.path("score/manifest.json")));

  w.dir.write("bad.tsv", "x\ty\n");
  CHECK(run({"score", "--pred", w.path("bad.tsv"), "--gold", w.dataset}).code == kExitData);
}

TEST_CASE("lexicon baseline via the command line") {
  Workspace w;
  const auto syn = w.dir.write("syn.tsv", "motive\tincentive\taim\treason\ntrophies\tprizes\tawards\n").string();
  const auto r = run({"generate", "--dataset", w.dataset, "--backend", "lexicon_baseline", "--synonyms", syn,
                      "--freq", w.freq, "--out", w.path("lb/pred.tsv")});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(w.path("lb/pred.tsv")).find("motive\treason\taim\tincentive") != std::string::npos);
}

TEST_CASE("split") {
  Workspace w;
  const auto r = run({"split", "--dataset", w.dataset, "--train", "0.5", "--validation", "0.5", "--test", "0",
                      "--out-dir", w.path("split")});
  REQUIRE(r.code == kExitOk);
  CHECK(count_lines(slurp(w.path("split/train.jsonl"))) == "1");
  CHECK(count_lines(slurp(w.path("split/validation.jsonl"))) == "1");
  CHECK(slurp(w.path("split/test.jsonl")).empty());
}

TEST_CASE("search-tokens with log and resume") {
  Workspace w;
  auto r = run({"search-tokens", "--dataset", w.dataset, "--trials", "12", "--seed", "5", "--log",
                w.path("s/log.jsonl"), "--out", w.path("s/result.json"), "--test", w.dataset});
  REQUIRE(r.code == kExitOk);
  const auto result = nlohmann::json::parse(slurp(w.path("s/result.json")));
  CHECK(result["trial_budget"] == 12);
  CHECK(result["top_sets"].size() == 10);
  CHECK(result["test_report"]["acc@1"] == 1.0);
  const auto log = slurp(w.path("s/log.jsonl"));
  CHECK(count_lines(log) == "13");

  const auto cut = log.substr(0, [&] {
    std::size_t pos = 0;
    for (int i = 0; i < 6; ++i) pos = log.find('\n', pos) + 1;
    return pos;
  }());
  w.dir.write("s/partial.jsonl", cut);
  r = run({"search-tokens", "--dataset", w.dataset, "--trials", "12", "--seed", "5", "--log",
           w.path("s/partial.jsonl"), "--resume", "--out", w.path("s/result2.json"), "--test", w.dataset});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(w.path("s/partial.jsonl")) == log);
  CHECK(slurp(w.path("s/result2.json")) == slurp(w.path("s/result.json")));

  r = run({"search-tokens", "--dataset", w.dataset, "--trials", "12", "--seed", "6", "--log",
           w.path("s/log.jsonl"), "--resume"});
  CHECK(r.code == kExitData);
}

TEST_CASE("rank-backends over prediction tables") {
  Workspace w;
  REQUIRE(run({"generate", "--dataset", w.dataset, "--out", w.path("g/pred.tsv")}).code == kExitOk);
  w.dir.write("none.tsv", "");
  const auto r = run({"rank-backends", "--dataset", w.dataset, "--table", "none=" + w.path("none.tsv"),
                      "--table", "gold=" + w.path("g/pred.tsv")});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("gold\t1.000\nnone\t0.000\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  Workspace w;
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"stats", "--bogus"}).code == kExitUsage);
  CHECK(run({"stats", "--dataset", w.path("missing.tsv")}).code == kExitUsage);
  CHECK(run({"stats", "--dataset", w.dataset, "--language", "fr"}).code == kExitUsage);

  const auto bad = w.dir.write("bad.tsv", "a sentence\tmissing\tx:1\n").string();
  const auto r = run({"stats", "--dataset", bad});
  CHECK(r.code == kExitData);
  CHECK(r.err.find("ComplexWordNotInSentence") != std::string::npos);

  CHECK(run({"preprocess", "--dataset", w.dataset, "--out", w.path("t.tsv")}).code == kExitUsage);
  CHECK(run({"generate", "--dataset", w.dataset, "--backend", "remote_seq2seq", "--model", "t5",
             "--out", w.path("p.tsv")})
            .code == kExitUsage);
  CHECK(run({"generate", "--dataset", w.dataset, "--backend", "remote_seq2seq", "--model", "t5",
             "--sidecar-url", "http://127.0.0.1:1", "--out", w.path("p.tsv")})
            .code == kExitBackend);
}

TEST_CASE("configuration precedence") {
  Workspace w;
  const auto en = w.dir.write("en.tsv", kMotiveEn + "\n").string();
  ::setenv("LEXSIMP_FREQ_DIR", w.path("nowhere").c_str(), 1);
  CHECK(run({"preprocess", "--dataset", en, "--out", w.path("e/train.tsv")}).code == kExitData);

  const auto cfg = w.dir.write("cfg.toml", "[preprocess]\nfreq-dir = \"" + w.dir.path().string() + "\"\n");
  CHECK(run({"--config", cfg.string(), "preprocess", "--dataset", en, "--out", w.path("e/train.tsv")}).code ==
        kExitOk);

  const auto cfg2 = w.dir.write("cfg2.toml", "[preprocess]\nfreq-dir = \"" + w.path("nowhere") + "\"\n");
  CHECK(run({"--config", cfg2.string(), "preprocess", "--dataset", en, "--out", w.path("e/train.tsv"),
             "--freq-dir", w.dir.path().string()})
            .code == kExitOk);
  ::unsetenv("LEXSIMP_FREQ_DIR");
}

#pragma once
// Fixtures shared by the unit tests and the acceptance runner.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include <unistd.h>

#include "lexsimp/corpus.hpp"
#include "lexsimp/generation.hpp"
#include "lexsimp/lexicon.hpp"
#include "lexsimp/text.hpp"
#include "lexsimp/serializer.hpp"
#include "lexsimp/random.hpp"
#include "lexsimp/token_search.hpp"

namespace lexsimp::testing {

inline const std::string kMotiveEn =
    "The motive for the killings was not known.\tmotive\treason:16\tincentive:2\tintention:2\t"
    "aim:1\tcause:1\tmotive:1\tinspiration:1\tobject:1";
inline const std::string kJurisdiccionEs =
    "Estaban en la jurisdicción de Santiago del Estero y en Catamarca.\tjurisdicción\t"
    "territorio:5\tautoridad:5\tzona:3\tcompetencia:2\tjurisdicción:1\tlegislación:1\t"
    "el territorio:1\tpoder:1\tel poder:1\tubicación:1\tmando:1\tatribución:1\tterritorial:1\t"
    "ley:1\tresguardo:1";
inline const std::string kPragaPt =
    "Naquele país a ave é considerada uma praga\tpraga\tpeste:9\tepidemia:5\tmaldição:3\t"
    "doença:2\tdesgraça:2\ttragédia:1\tinfestação:1";

inline Instance motive_en() { return parse_instance(kMotiveEn, InputFormat::tsar_aggregated, Language::en); }
inline Instance jurisdiccion_es() { return parse_instance(kJurisdiccionEs, InputFormat::tsar_aggregated, Language::es); }
inline Instance praga_pt() { return parse_instance(kPragaPt, InputFormat::tsar_aggregated, Language::pt); }

inline const std::string kTrophiesSource =
    "simplify en: <CR_1.00> <WL_1.25> <WR_1.05> <WS_1.60> <SS_1.00> #8-8 I want to continue "
    "playing at the highest level and win as many [T] trophies [/T] as possible. </s> trophies : "
    "trophies titles trophy competitions championships tournaments prizes awards cups medals";

inline Instance trophies_instance() {
  Instance inst;
  inst.id = "en-000001";
  inst.language = Language::en;
  inst.sentence = "I want to continue playing at the highest level and win as many trophies as possible.";
  inst.complex_word = "trophies";
  inst.gold = {{"awards", 3}, {"medals", 2}, {"prizes", 1}};
  inst.word_index = 8;
  return inst;
}

inline std::vector<std::string> trophies_mlm() {
  return {"trophies",      "titles",      "trophy", "competitions", "championships",
          "tournaments",   "prizes",      "awards", "cups",         "medals"};
}

inline TokenValueSet trophies_set() {
  return {GridValue::from_hundredths(125), GridValue::from_hundredths(105),
          GridValue::from_hundredths(160), GridValue::from_hundredths(100)};
}

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lexsimp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Random well-formed instance plus MLM list for serializer round trips.
struct FuzzCase {
  Instance instance;
  TokenVector tokens;
  std::vector<std::string> mlm;
  SerializationOptions options;
};

inline FuzzCase fuzz_case(Rng& rng, std::size_t n) {
  static const std::vector<std::string> words = {
      "the",  "motive", "for",      "killings", "was",   "not",   "known.", "país",     "ave",
      "é",    "praga",  "jurisdicción", "de",   "(word", "x-ray", "50%",    "naïve",    "Ünïcode",
      "a",    "b,",     "trophies", "win",      "as",    "many",  "it's",   "el",       "territorio",
      "[x]",  "<s>",    "T",        "#tag",     ":",     "::",    "s",      "maldição", "over"};
  auto pick = [&] { return words[uniform_below(rng, words.size())]; };
  FuzzCase c;
  auto& inst = c.instance;
  inst.id = make_instance_id(Language::en, n + 1);
  inst.language = static_cast<Language>(uniform_below(rng, 3));
  const auto len = 1 + uniform_below(rng, 20);
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < len; ++i) toks.push_back(pick());
  if (toks.front().starts_with("#")) toks.front() = "start";
  const auto first = uniform_below(rng, len);
  const auto width = 1 + uniform_below(rng, std::min<std::uint64_t>(3, len - first));
  std::vector<std::string> cw(toks.begin() + static_cast<long>(first),
                              toks.begin() + static_cast<long>(first + width));
  inst.sentence = text::join(toks, " ");
  inst.complex_word = text::join(cw, " ");
  inst.gold = {{"g", 1}};
  static const int cr[] = {100, 75, 50, 25, 10};
  auto lvl = [&] { return GridValue::level(static_cast<int>(uniform_below(rng, GridValue::kLevels))); };
  c.tokens = TokenVector::from_grid(GridValue::from_hundredths(cr[uniform_below(rng, 5)]), lvl(), lvl(),
                                    lvl(), lvl());
  c.options.include_mlm = uniform_below(rng, 4) != 0;
  c.options.include_span_marker = uniform_below(rng, 2) != 0;
  c.options.mlm_top_k = 10;
  std::unordered_set<std::string> seen;
  const auto m = uniform_below(rng, 11);
  for (std::size_t i = 0; c.mlm.size() < m && i < 40; ++i) {
    auto w = pick();
    if (w == ":" || w == "::") continue;
    if (seen.insert(normalize_term(w)).second && !normalize_term(w).empty()) c.mlm.push_back(w);
  }
  return c;
}

/// Validation set for the planted-optimum oracle: instance i (1-based) has
/// gold "best:2", "good:1".
inline std::vector<Instance> planted_validation(int n = 40) {
  std::vector<Instance> out;
  for (int i = 1; i <= n; ++i) {
    Instance inst;
    inst.id = make_instance_id(Language::en, static_cast<std::size_t>(i));
    inst.sentence = "sentence number " + std::to_string(i) + " has a difficult word";
    inst.complex_word = "difficult";
    inst.gold = {{"best", 2}, {"good", 1}};
    out.push_back(inst);
  }
  return out;
}

/// Reads the token values back out of the source. With d the Euclidean grid
/// distance from (1,1,1,1) in 0.05 steps, s = exp(-d^2 / 20); instance i of
/// n answers "best" first iff s > i / (n + 1). ACC@1@Top1 therefore peaks at
/// exactly 1.0 at the all-1.00 set and falls off smoothly.
class PlantedOptimumBackend final : public GeneratorBackend {
 public:
  explicit PlantedOptimumBackend(int n) : n_(n) {}
  std::string id() const override { return "planted-optimum"; }
  BackendKind kind() const override { return BackendKind::mock_table; }
  std::vector<std::string> generate(const Instance& instance, std::string_view source,
                                    int) const override {
    const auto tokens = parse_source(source).tokens;
    double d2 = 0;
    for (const auto* t : {&tokens.wl, &tokens.wr, &tokens.ws, &tokens.ss}) {
      const double steps = (t->grid.hundredths() - 100) / static_cast<double>(GridValue::kStep);
      d2 += steps * steps;
    }
    const double s = std::exp(-d2 / 20.0);
    const int i = std::stoi(instance.id.substr(instance.id.find('-') + 1));
    if (s > static_cast<double>(i) / (n_ + 1)) return {"best", "other"};
    return {"other", "good"};
  }

 private:
  int n_;
};

}  // namespace lexsimp::testing

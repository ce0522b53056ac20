#include "lexsimp/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include <openssl/evp.h>

namespace lexsimp {

namespace {

std::string hex(const unsigned char* bytes, unsigned int n) {
  std::ostringstream os;
  for (unsigned int i = 0; i < n; ++i) {
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(bytes[i]);
  }
  return os.str();
}

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256 init failed");
    }
  }
  void update(const void* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error("sha256 update failed");
  }
  std::string finish() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int n = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md, &n) != 1) throw Error("sha256 final failed");
    return hex(md, n);
  }

 private:
  std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.finish();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.finish();
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.emplace_back(path.string(), sha256_file(path));
}

nlohmann::ordered_json RunManifest::configuration() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = version;
  auto in = nlohmann::ordered_json::array();
  for (const auto& [path, digest] : inputs) in.push_back({{"path", path}, {"sha256", digest}});
  j["inputs"] = std::move(in);
  if (split) {
    j["split"] = {{"train", split->train_fraction},
                  {"validation", split->validation_fraction},
                  {"test", split->test_fraction},
                  {"seed", split->seed}};
  }
  if (serialization) {
    j["serialization"] = {{"include_mlm", serialization->include_mlm},
                          {"mlm_top_k", serialization->mlm_top_k},
                          {"include_span_marker", serialization->include_span_marker}};
  }
  j["backend"] = backend;
  j["parameters"] = parameters;
  j["seeds"] = seeds;
  return j;
}

std::string RunManifest::digest() const { return sha256_hex(configuration().dump()); }

std::filesystem::path RunManifest::write(const std::filesystem::path& dir,
                                         const std::vector<std::filesystem::path>& outputs) const {
  auto j = configuration();
  j["manifest_digest"] = digest();
  auto out = nlohmann::ordered_json::array();
  for (const auto& p : outputs) {
    out.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)}});
  }
  j["outputs"] = std::move(out);
  const auto path = dir / kManifestName;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << j.dump(2) << '\n';
  return path;
}

}  // namespace lexsimp

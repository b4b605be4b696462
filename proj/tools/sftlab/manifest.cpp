#include "sftlab/manifest.hpp"

#include <array>
#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "sft/error.hpp"
#include "sftlab/config.hpp"

#ifndef SFT_VERSION
#define SFT_VERSION "0"
#endif

namespace sftlab {

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 15];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view data) {
  Sha256 h;
  h.update(data.data(), data.size());
  return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sft::UsageError("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunRecorder::RunRecorder(std::filesystem::path dir, std::string subcommand, nlohmann::json config)
    : dir_(std::move(dir)), subcommand_(std::move(subcommand)), config_(std::move(config)), started_(utc_now()) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw sft::UsageError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

void RunRecorder::write_json(const std::string& name, const nlohmann::json& j) {
  write_text(name, j.dump(2) + "\n");
}

void RunRecorder::write_csv(const std::string& name, const sft::io::CsvTable& table) {
  table.save(dir_ / name);
  record(dir_ / name);
}

void RunRecorder::write_text(const std::string& name, const std::string& text) {
  std::ofstream out(dir_ / name, std::ios::binary);
  out << text;
  if (!out) throw sft::UsageError("cannot write " + (dir_ / name).string());
  out.close();
  record(dir_ / name);
}

void RunRecorder::record(const std::filesystem::path& file) { files_.push_back(file); }

std::filesystem::path RunRecorder::finish(const nlohmann::json& summary) {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& f : files_)
    artifacts.push_back({{"path", std::filesystem::relative(f, dir_).generic_string()},
                         {"bytes", std::filesystem::file_size(f)},
                         {"sha256", sha256_file(f)}});
  const nlohmann::json manifest{{"subcommand", subcommand_},
                                {"config_hash", config_hash(config_)},
                                {"config", config_},
                                {"code_version", SFT_VERSION},
                                {"started", started_},
                                {"finished", utc_now()},
                                {"artifacts", artifacts},
                                {"summary", summary}};
  const auto path = dir_ / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  out << manifest.dump(2) << "\n";
  if (!out) throw sft::UsageError("cannot write " + path.string());
  return path;
}

}  // namespace sftlab

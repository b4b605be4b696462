#pragma once
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sft/io.hpp"

namespace sftlab {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Collects the artifacts of one run and writes manifest.json listing each
/// with its SHA-256. Artifacts are written in full before they are recorded.
class RunRecorder {
 public:
  RunRecorder(std::filesystem::path dir, std::string subcommand, nlohmann::json config);
  const std::filesystem::path& dir() const { return dir_; }
  void write_json(const std::string& name, const nlohmann::json& j);
  void write_csv(const std::string& name, const sft::io::CsvTable& table);
  void write_text(const std::string& name, const std::string& text);
  void record(const std::filesystem::path& file);
  /// Writes manifest.json with the summary attached; returns its path.
  std::filesystem::path finish(const nlohmann::json& summary);

 private:
  std::filesystem::path dir_;
  std::string subcommand_;
  nlohmann::json config_;
  std::string started_;
  std::vector<std::filesystem::path> files_;
};

std::string utc_now();

}  // namespace sftlab

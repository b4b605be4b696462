#pragma once

// On-disk formats.
//
// Matrix container: 8-byte magic "SFTMAT01", little-endian uint64 header
// length, UTF-8 JSON header ({"rows", "cols", "dtype": "complex128", ...}),
// then rows * cols complex doubles in row-major order.
//
// Sample directories hold chunks samples_NNNNN.bin (one matrix per chunk, one
// row per sample) and samples_manifest.json with the field parameters, seed
// and chunk list.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sft/measure.hpp"

namespace sft::io {

struct MatrixFile {
  Eigen::MatrixXcd data;
  nlohmann::json header;
};

void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m, const nlohmann::json& extra = nlohmann::json::object());
MatrixFile read_matrix(std::istream& is);
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m,
                 const nlohmann::json& extra = nlohmann::json::object());
MatrixFile load_matrix(const std::filesystem::path& path);

measure::FieldParams field_params_from_json(const nlohmann::json& j);

/// Draws samples first .. first + count - 1 and writes them in chunks.
/// Returns every file written, manifest last.
std::vector<std::filesystem::path> write_samples(const std::filesystem::path& dir, const measure::FreeFieldSampler& sampler,
                                                 std::uint64_t first, std::uint64_t count, std::uint64_t chunk);
std::vector<measure::StringFieldSample> read_samples(const std::filesystem::path& dir);

/// Number formatted for CSV/JSON text: shortest round-trip form, '.' decimal.
std::string num(double x);

/// CSV with a header row; cells are written verbatim.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row);
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }
  void write(std::ostream& os) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace sft::io

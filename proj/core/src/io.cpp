#include "sft/io.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "sft/error.hpp"

namespace sft::io {

namespace {

constexpr std::array<char, 8> kMagic = {'S', 'F', 'T', 'M', 'A', 'T', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
  std::array<unsigned char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t read_u64(std::istream& is) {
  std::array<unsigned char, 8> b{};
  is.read(reinterpret_cast<char*>(b.data()), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
  return v;
}

std::string chunk_name(std::uint64_t i) {
  std::ostringstream s;
  s << "samples_" << std::setw(5) << std::setfill('0') << i << ".bin";
  return s.str();
}

}  // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m, const nlohmann::json& extra) {
  nlohmann::json header = extra;
  header["rows"] = m.rows();
  header["cols"] = m.cols();
  header["dtype"] = "complex128";
  const std::string text = header.dump();
  os.write(kMagic.data(), kMagic.size());
  write_u64(os, text.size());
  os.write(text.data(), static_cast<std::streamsize>(text.size()));
  const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  os.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(std::complex<double>) * rm.size()));
  if (!os) throw NumericError("matrix write failed");
}

MatrixFile read_matrix(std::istream& is) {
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw UsageError("not an SFTMAT01 matrix file");
  const auto len = read_u64(is);
  if (len > (1u << 26)) throw UsageError("matrix header too long");
  std::string text(len, '\0');
  is.read(text.data(), static_cast<std::streamsize>(len));
  MatrixFile out;
  out.header = nlohmann::json::parse(text);
  if (out.header.value("dtype", "") != "complex128") throw UsageError("unsupported matrix dtype");
  const auto rows = out.header.at("rows").get<Eigen::Index>(), cols = out.header.at("cols").get<Eigen::Index>();
  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  is.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(std::complex<double>) * rm.size()));
  if (!is) throw UsageError("matrix file truncated");
  out.data = rm;
  return out;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXcd& m, const nlohmann::json& extra) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open " + path.string() + " for writing");
  write_matrix(os, m, extra);
}

MatrixFile load_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw UsageError("cannot open " + path.string());
  return read_matrix(is);
}

measure::FieldParams field_params_from_json(const nlohmann::json& j) {
  measure::FieldParams p;
  p.d = j.at("d").get<int>();
  p.mass = j.at("m").get<double>();
  p.min_length = j.at("L0").get<double>();
  p.max_length = j.at("Linf").get<double>();
  p.cutoff = j.at("M").get<double>();
  p.kappa = j.at("kappa").get<double>();
  p.t_half = j.at("t_half").get<double>();
  p.dt = j.at("dt").get<double>();
  p.n_cells = j.at("n_cells").get<int>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

std::vector<std::filesystem::path> write_samples(const std::filesystem::path& dir, const measure::FreeFieldSampler& sampler,
                                                 std::uint64_t first, std::uint64_t count, std::uint64_t chunk) {
  if (chunk == 0) throw UsageError("sample chunk size must be positive");
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  nlohmann::json list = nlohmann::json::array();
  for (std::uint64_t start = 0, c = 0; start < count; start += chunk, ++c) {
    const std::uint64_t n = std::min(chunk, count - start);
    Eigen::MatrixXcd block;
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto s = sampler.sample(first + start + i);
      if (i == 0) block.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(s.amplitudes.size()));
      block.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Eigen::RowVectorXcd>(s.amplitudes.data(), static_cast<Eigen::Index>(s.amplitudes.size()));
    }
    const auto path = dir / chunk_name(c);
    save_matrix(path, block, {{"first_index", first + start}});
    files.push_back(path);
    list.push_back({{"file", path.filename().string()}, {"first_index", first + start}, {"count", n}});
  }
  const nlohmann::json manifest = {{"params", measure::to_json(sampler.params())},
                                   {"seed", sampler.params().seed},
                                   {"first", first},
                                   {"count", count},
                                   {"fock_dim", sampler.basis()->size()},
                                   {"layout", "time-major, then length cell, then Fock state"},
                                   {"chunks", list}};
  const auto mpath = dir / "samples_manifest.json";
  std::ofstream(mpath) << manifest.dump(2) << '\n';
  files.push_back(mpath);
  return files;
}

std::vector<measure::StringFieldSample> read_samples(const std::filesystem::path& dir) {
  std::ifstream in(dir / "samples_manifest.json");
  if (!in) throw UsageError("no samples_manifest.json in " + dir.string());
  const auto manifest = nlohmann::json::parse(in);
  const auto params = field_params_from_json(manifest.at("params"));
  const measure::FreeFieldSampler sampler(params);
  std::vector<measure::StringFieldSample> out;
  for (const auto& c : manifest.at("chunks")) {
    const auto m = load_matrix(dir / c.at("file").get<std::string>());
    for (Eigen::Index r = 0; r < m.data.rows(); ++r) {
      auto s = measure::StringFieldSample::zeros(params, sampler.basis());
      if (static_cast<Eigen::Index>(s.amplitudes.size()) != m.data.cols()) throw UsageError("sample chunk has the wrong width");
      for (Eigen::Index k = 0; k < m.data.cols(); ++k) s.amplitudes[static_cast<std::size_t>(k)] = m.data(r, k);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string num(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw UsageError("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
}

void CsvTable::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw UsageError("cannot open " + path.string() + " for writing");
  write(os);
}

}  // namespace sft::io

#include "lab/output.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace mckean::lab {

namespace {

std::string to_hex(const unsigned char* data, unsigned len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 15]);
  }
  return out;
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw std::runtime_error("SHA-256 initialisation failed");
    }
  }
  void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md.data(), &len);
    return to_hex(md.data(), len);
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

std::string sha256_text(const std::string& text) {
  Sha256 h;
  h.update(text.data(), text.size());
  return h.hex();
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  row_text(header);
}

CsvTable& CsvTable::row(std::initializer_list<double> values) {
  return row(std::span<const double>(values.begin(), values.size()));
}

CsvTable& CsvTable::row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(number(v));
  return row_text(cells);
}

CsvTable& CsvTable::row_text(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write_text(const std::string& name, const std::string& content) {
  const auto path = root_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files_.push_back(name);
}

void OutputDir::write_json(const std::string& name, const Json& value) {
  write_text(name, value.dump(2) + "\n");
}

void OutputDir::write_binary(const std::string& name, std::span<const double> values,
                             const Json& sidecar) {
  const auto path = root_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw std::runtime_error("cannot write " + path.string());
  files_.push_back(name);
  write_json(name + ".json", sidecar);
}

void OutputDir::write_manifest(const ExperimentConfig& config, double wall_seconds, bool partial,
                               const std::string& error) const {
  const Json echo = config.echo();
  Json m;
  m["tool"] = "mckean-lab";
  m["version"] = MCKEAN_LAB_VERSION;
  m["experiment"] = config.experiment;
  m["seed"] = config.seed;
  m["config"] = echo;
  m["config_sha256"] = sha256_text(echo.dump());
  m["wall_time_seconds"] = wall_seconds;
  m["partial"] = partial;
  if (!error.empty()) m["error"] = error;
  m["warnings"] = warnings_;
  Json files = Json::array();
  for (const auto& f : files_) {
    const auto path = root_ / f;
    files.push_back({{"path", f},
                     {"bytes", std::filesystem::file_size(path)},
                     {"sha256", sha256_file(path)}});
  }
  m["files"] = files;
  std::ofstream out(root_ / "manifest.json", std::ios::binary | std::ios::trunc);
  out << m.dump(2) << "\n";
}

}  // namespace mckean::lab

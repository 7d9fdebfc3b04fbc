#ifndef MCKEAN_LAB_OUTPUT_HPP
#define MCKEAN_LAB_OUTPUT_HPP

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "lab/config.hpp"

namespace mckean::lab {

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_text(const std::string& text);

/// CSV table: header first, numbers with round-trip precision, LF endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(std::initializer_list<double> values);
  CsvTable& row(std::span<const double> values);
  // Mixed rows (e.g. a regime name); cells are written verbatim.
  CsvTable& row_text(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

std::string number(double v);

/// Output directory of one run. Every file goes through this class so that
/// the manifest lists all of them; writes are serialised by construction
/// (one experiment per process, written from the calling thread).
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const noexcept { return root_; }
  void write_text(const std::string& name, const std::string& content);
  void write_csv(const std::string& name, const CsvTable& table) { write_text(name, table.str()); }
  void write_json(const std::string& name, const Json& value);
  // Little-endian float64 array plus a JSON sidecar "<name>.json".
  void write_binary(const std::string& name, std::span<const double> values, const Json& sidecar);

  void warn(std::string message) { warnings_.push_back(std::move(message)); }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const std::vector<std::string>& files() const noexcept { return files_; }

  // manifest.json; not listed in itself.
  void write_manifest(const ExperimentConfig& config, double wall_seconds, bool partial,
                      const std::string& error) const;

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
  std::vector<std::string> warnings_;
};

}  // namespace mckean::lab

#endif  // MCKEAN_LAB_OUTPUT_HPP

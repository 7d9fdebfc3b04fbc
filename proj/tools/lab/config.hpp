#ifndef MCKEAN_LAB_CONFIG_HPP
#define MCKEAN_LAB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mckean/model.hpp"

namespace mckean::lab {

using Json = nlohmann::ordered_json;

enum class Level { kError, kWarning };

struct Diagnostic {
  Level level;
  std::string key;  // dotted path, e.g. "model.beta"
  std::string message;
};

std::string format(const Diagnostic& d);
bool has_errors(const std::vector<Diagnostic>& diags);

// Names accepted as <experiment>.
const std::vector<std::string>& experiment_names();

/// Typed view of the "numerics" block. Each experiment declares its keys;
/// undeclared keys are rejected and missing optional keys fall back to their
/// declared defaults.
class Numerics {
 public:
  Numerics() = default;
  Numerics(std::string experiment, Json values) : experiment_(std::move(experiment)), values_(std::move(values)) {}

  std::int64_t integer(const std::string& key) const;
  std::size_t size(const std::string& key) const { return static_cast<std::size_t>(integer(key)); }
  double real(const std::string& key) const;
  std::optional<double> optional_real(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<std::size_t> sizes(const std::string& key) const;

  // The block with defaults filled in, as echoed in the manifest.
  Json resolved() const;

 private:
  Json lookup(const std::string& key) const;

  std::string experiment_;
  Json values_ = Json::object();
};

struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::filesystem::path output = "mckean-out";
  Json model_block;
  std::shared_ptr<const PotentialSpec> model;
  Numerics numerics;
  std::vector<std::string> model_warnings;  // from check_model

  // Effective configuration after command-line overrides and defaults.
  Json echo() const;
};

struct Overrides {
  std::optional<std::string> experiment;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

// Reads and checks a config file; collects every violation instead of
// stopping at the first. Relative CSV paths resolve against the config's
// directory. The model is only built when the model block is valid.
struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<Diagnostic> diagnostics;
};
ParseResult parse_config(const std::filesystem::path& path, const Overrides& overrides = {});
ParseResult parse_config(const Json& doc, const std::filesystem::path& base_dir,
                         const Overrides& overrides = {});

}  // namespace mckean::lab

#endif  // MCKEAN_LAB_CONFIG_HPP

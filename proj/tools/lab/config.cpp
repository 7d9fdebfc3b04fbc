#include "lab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "mckean/errors.hpp"

namespace mckean::lab {

namespace {

enum class Kind { kInt, kReal, kBool, kString, kSizeList };

struct KeySpec {
  const char* name;
  Kind kind;
  bool required;
  Json fallback;  // null when there is no default
  bool positive = true;
};

using Schema = std::vector<KeySpec>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> table = {
      {"simulate",
       {{"N", Kind::kInt, true, nullptr},
        {"dt", Kind::kReal, true, nullptr},
        {"t_end", Kind::kReal, true, nullptr},
        {"record_every", Kind::kInt, false, 10},
        {"snapshot_every", Kind::kInt, false, 0, false},
        {"M", Kind::kInt, false, 256},
        {"initial", Kind::kString, false, "default"},
        {"kappa", Kind::kReal, false, 3.0}}},
      {"gibbs",
       {{"N", Kind::kInt, true, nullptr},
        {"samples", Kind::kInt, true, nullptr},
        {"scheme", Kind::kString, false, "mala"},
        {"step", Kind::kReal, false, 1e-3},
        {"burn_in", Kind::kInt, false, 1000, false},
        {"thin", Kind::kInt, false, 10}}},
      {"meanfield",
       {{"dt", Kind::kReal, true, nullptr},
        {"t_end", Kind::kReal, true, nullptr},
        {"M", Kind::kInt, false, 256},
        {"record_every", Kind::kInt, false, 10},
        {"initial", Kind::kString, false, "default"},
        {"amplitude", Kind::kReal, false, 0.1},
        {"kappa", Kind::kReal, false, 3.0}}},
      {"steady-states",
       {{"M", Kind::kInt, false, 256},
        {"tol", Kind::kReal, false, 1e-10},
        {"damping", Kind::kReal, false, 0.5},
        {"max_iter", Kind::kInt, false, 20000}}},
      {"phase-scan",
       {{"beta_min", Kind::kReal, true, nullptr},
        {"beta_max", Kind::kReal, true, nullptr},
        {"beta_step", Kind::kReal, true, nullptr},
        {"M", Kind::kInt, false, 256},
        {"amplitude", Kind::kReal, false, 0.1},
        {"tol", Kind::kReal, false, 1e-10},
        {"k_max", Kind::kInt, false, kDefaultKMax}}},
      {"lsi",
       {{"Ns", Kind::kSizeList, true, nullptr},
        {"M", Kind::kInt, false, 256},
        {"lambda_single", Kind::kReal, false, nullptr},
        {"weak_interaction", Kind::kBool, false, false},
        {"eps", Kind::kReal, false, 1.0}}},
      {"poc",
       {{"Ns", Kind::kSizeList, true, nullptr},
        {"dt", Kind::kReal, true, nullptr},
        {"t_end", Kind::kReal, true, nullptr},
        {"replicas", Kind::kInt, false, 20},
        {"M", Kind::kInt, false, 256},
        {"log_every", Kind::kInt, false, 10},
        {"initial", Kind::kString, false, "default"},
        {"kappa", Kind::kReal, false, 3.0}}},
      {"talagrand",
       {{"M", Kind::kInt, false, 1024},
        {"perturbations", Kind::kInt, false, 100},
        {"modes", Kind::kInt, false, 3},
        {"amplitude", Kind::kReal, false, 0.3},
        {"lambda", Kind::kReal, false, nullptr}}},
      {"fluctuations",
       {{"N", Kind::kInt, true, nullptr},
        {"dt", Kind::kReal, true, nullptr},
        {"t_end", Kind::kReal, true, nullptr},
        {"burn_in", Kind::kReal, false, 1.0, false},
        {"k_max", Kind::kInt, false, 4},
        {"record_every", Kind::kInt, false, 10}}},
      {"spde",
       {{"dt", Kind::kReal, true, nullptr},
        {"t_end", Kind::kReal, true, nullptr},
        {"k_max", Kind::kInt, false, 4},
        {"record_every", Kind::kInt, false, 1},
        {"trajectory", Kind::kBool, false, true}}},
      {"lln",
       {{"Ns", Kind::kSizeList, true, nullptr},
        {"s", Kind::kReal, false, 2.0},
        {"k_max", Kind::kInt, false, 16},
        {"replicas", Kind::kInt, false, 8},
        {"samples_per_replica", Kind::kInt, false, 50},
        {"step", Kind::kReal, false, 1e-3},
        {"burn_in", Kind::kInt, false, 1000, false},
        {"thin", Kind::kInt, false, 10},
        {"M", Kind::kInt, false, 256}}},
  };
  return table;
}

const KeySpec* find_key(const std::string& experiment, const std::string& key) {
  const auto& schema = schemas().at(experiment);
  for (const auto& k : schema) {
    if (key == k.name) return &k;
  }
  return nullptr;
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::kInt: return "an integer";
    case Kind::kReal: return "a number";
    case Kind::kBool: return "a boolean";
    case Kind::kString: return "a string";
    case Kind::kSizeList: return "a non-empty list of positive integers";
  }
  return "?";
}

// Empty string when v fits k.
std::string type_problem(const Json& v, const KeySpec& k) {
  switch (k.kind) {
    case Kind::kInt:
      if (!v.is_number_integer()) return std::string("must be ") + kind_name(k.kind);
      if (k.positive ? v.get<std::int64_t>() <= 0 : v.get<std::int64_t>() < 0) {
        return k.positive ? "must be positive" : "must be non-negative";
      }
      return {};
    case Kind::kReal:
      if (!v.is_number()) return std::string("must be ") + kind_name(k.kind);
      if (!std::isfinite(v.get<double>())) return "must be finite";
      if (k.positive ? v.get<double>() <= 0.0 : v.get<double>() < 0.0) {
        return k.positive ? "must be positive" : "must be non-negative";
      }
      return {};
    case Kind::kBool:
      return v.is_boolean() ? std::string() : std::string("must be ") + kind_name(k.kind);
    case Kind::kString:
      return v.is_string() ? std::string() : std::string("must be ") + kind_name(k.kind);
    case Kind::kSizeList:
      if (!v.is_array() || v.empty()) return std::string("must be ") + kind_name(k.kind);
      for (const auto& e : v) {
        if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
          return std::string("must be ") + kind_name(k.kind);
        }
      }
      return {};
  }
  return {};
}

class Collector {
 public:
  explicit Collector(std::vector<Diagnostic>& out) : out_(out) {}
  void error(std::string key, std::string msg) {
    out_.push_back({Level::kError, std::move(key), std::move(msg)});
  }
  void warning(std::string key, std::string msg) {
    out_.push_back({Level::kWarning, std::move(key), std::move(msg)});
  }
  // Rejects members of obj outside allowed.
  void only(const Json& obj, const std::string& prefix, std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::none_of(allowed.begin(), allowed.end(),
                       [&](const char* a) { return it.key() == a; })) {
        error(prefix + it.key(), "unknown key");
      }
    }
  }

 private:
  std::vector<Diagnostic>& out_;
};

std::optional<TableBoundary> parse_boundary(const Json& v) {
  if (v == "periodic") return TableBoundary::kPeriodic;
  if (v == "clamped") return TableBoundary::kClamped;
  return std::nullopt;
}

// {"type": "tabulated", "file": ..., "boundary": ...}
std::optional<TabulatedFunction> parse_table(const Json& obj, const std::string& key,
                                             const std::optional<Domain>& domain,
                                             const std::filesystem::path& base, Collector& c) {
  c.only(obj, key + ".", {"type", "file", "boundary"});
  if (!obj.contains("file") || !obj["file"].is_string()) {
    c.error(key + ".file", "missing path of the two-column CSV table");
    return std::nullopt;
  }
  TableBoundary boundary = domain && domain->is_torus() ? TableBoundary::kPeriodic
                                                        : TableBoundary::kClamped;
  if (obj.contains("boundary")) {
    const auto b = parse_boundary(obj["boundary"]);
    if (!b) {
      c.error(key + ".boundary", "must be \"periodic\" or \"clamped\"");
      return std::nullopt;
    }
    boundary = *b;
  }
  std::filesystem::path file = obj["file"].get<std::string>();
  if (file.is_relative()) file = base / file;
  try {
    return TabulatedFunction::from_csv(file, boundary);
  } catch (const std::exception& e) {
    c.error(key + ".file", e.what());
    return std::nullopt;
  }
}

std::optional<Domain> parse_domain(const Json& v, Collector& c) {
  if (v == "torus") return Domain::torus();
  if (v == "line") return Domain::line();
  if (v.is_object() && v.value("type", "") == "box") {
    c.only(v, "model.domain.", {"type", "dim", "lower", "upper"});
    try {
      return Domain::box(v.at("dim").get<int>(), v.at("lower").get<double>(),
                         v.at("upper").get<double>());
    } catch (const std::exception& e) {
      c.error("model.domain", std::string("invalid box: ") + e.what());
      return std::nullopt;
    }
  }
  c.error("model.domain", "must be \"torus\", \"line\" or {\"type\": \"box\", ...}");
  return std::nullopt;
}

std::string type_of(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("type") && v["type"].is_string()) return v["type"].get<std::string>();
  return {};
}

std::optional<Confinement> parse_confinement(const Json& v, const std::optional<Domain>& domain,
                                             const std::filesystem::path& base, Collector& c) {
  const std::string t = type_of(v);
  const std::string key = "model.confining";
  if (t == "zero") return ZeroConfinement{};
  if (t == "double-well") return DoubleWellConfinement{};
  if (t == "quadratic") {
    QuadraticConfinement q;
    if (v.is_object()) {
      c.only(v, key + ".", {"type", "a"});
      if (v.contains("a")) {
        if (!v["a"].is_number()) {
          c.error(key + ".a", "must be a number");
          return std::nullopt;
        }
        q.a = v["a"].get<double>();
      }
    }
    return q;
  }
  if (t == "tabulated" && v.is_object()) {
    auto table = parse_table(v, key, domain, base, c);
    if (!table) return std::nullopt;
    return TabulatedConfinement{*table};
  }
  c.error(key, "must be one of zero, quadratic, double-well, tabulated");
  return std::nullopt;
}

std::optional<Interaction> parse_interaction(const Json& v, const std::optional<Domain>& domain,
                                             const std::filesystem::path& base, Collector& c) {
  const std::string t = type_of(v);
  const std::string key = "model.interaction";
  if (t == "zero") return ZeroInteraction{};
  if (t == "quadratic") return QuadraticInteraction{};
  if (t == "kuramoto") return CosineSumInteraction{{1.0}};
  if (t == "cosine" && v.is_object()) {
    c.only(v, key + ".", {"type", "coefficients"});
    const Json coeffs = v.value("coefficients", Json());
    if (!coeffs.is_array() || coeffs.empty() ||
        !std::all_of(coeffs.begin(), coeffs.end(), [](const Json& e) { return e.is_number(); })) {
      c.error(key + ".coefficients", "must be a non-empty list of numbers");
      return std::nullopt;
    }
    return CosineSumInteraction{coeffs.get<std::vector<double>>()};
  }
  if (t == "tabulated" && v.is_object()) {
    auto table = parse_table(v, key, domain, base, c);
    if (!table) return std::nullopt;
    return TabulatedInteraction{*table};
  }
  c.error(key, "must be one of zero, quadratic, kuramoto, cosine, tabulated");
  return std::nullopt;
}

std::optional<double> parse_beta(const Json& v, Collector& c) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  if (!v.is_number()) {
    c.error("model.beta", "must be a positive number or \"inf\"");
    return std::nullopt;
  }
  const double b = v.get<double>();
  if (!(b > 0.0)) {
    c.error("model.beta", "must be strictly positive");
    return std::nullopt;
  }
  return b;
}

std::optional<double> parse_optional_real(const Json& block, const char* name, Collector& c) {
  if (!block.contains(name)) return std::nullopt;
  if (!block[name].is_number()) {
    c.error(std::string("model.") + name, "must be a number");
    return std::nullopt;
  }
  return block[name].get<double>();
}

std::shared_ptr<const PotentialSpec> parse_model(const Json& block,
                                                 const std::filesystem::path& base,
                                                 std::vector<std::string>& warnings,
                                                 Collector& c) {
  if (!block.is_object()) {
    c.error("model", "missing or not an object");
    return nullptr;
  }
  c.only(block, "model.", {"domain", "confining", "interaction", "beta", "K_V", "K_W"});
  bool ok = true;
  for (const char* key : {"domain", "confining", "interaction", "beta"}) {
    if (!block.contains(key)) {
      c.error(std::string("model.") + key, "required key is missing");
      ok = false;
    }
  }
  const auto domain = block.contains("domain") ? parse_domain(block["domain"], c) : std::nullopt;
  const auto conf = block.contains("confining")
                        ? parse_confinement(block["confining"], domain, base, c)
                        : std::nullopt;
  const auto inter = block.contains("interaction")
                         ? parse_interaction(block["interaction"], domain, base, c)
                         : std::nullopt;
  const auto beta = block.contains("beta") ? parse_beta(block["beta"], c) : std::nullopt;
  const auto k_v = parse_optional_real(block, "K_V", c);
  const auto k_w = parse_optional_real(block, "K_W", c);
  if (!ok || !domain || !conf || !inter || !beta) return nullptr;
  try {
    auto spec = std::make_shared<const PotentialSpec>(*domain, *conf, *inter, *beta, k_v, k_w);
    for (const auto& d : check_model(*spec)) {
      if (d.severity == Severity::kError) {
        c.error("model", d.message);
      } else {
        c.warning("model", d.message);
        warnings.push_back(d.message);
      }
    }
    return spec;
  } catch (const std::exception& e) {
    c.error("model", e.what());
    return nullptr;
  }
}

void check_experiment_constraints(const std::string& exp, const Numerics& num,
                                  const PotentialSpec* spec, Collector& c) {
  auto need_torus = [&](const char* what) {
    if (spec && !spec->domain().is_torus()) c.error("model.domain", std::string(what) + " needs the torus");
  };
  auto need_1d = [&](const char* what) {
    if (spec && spec->dim() != 1) c.error("model.domain", std::string(what) + " is one-dimensional only");
  };
  auto need_finite_beta = [&] {
    if (spec && !std::isfinite(spec->beta())) c.error("model.beta", "this experiment needs a finite beta");
  };
  if (exp == "phase-scan" || exp == "talagrand" || exp == "fluctuations" || exp == "spde" ||
      exp == "lln") {
    need_torus(exp.c_str());
  }
  if (exp == "meanfield" || exp == "steady-states" || exp == "poc" || exp == "lsi") need_1d(exp.c_str());
  if (exp != "phase-scan") need_finite_beta();
  if (exp == "phase-scan") {
    if (num.real("beta_max") < num.real("beta_min")) {
      c.error("numerics.beta_max", "must not be smaller than beta_min");
    }
  }
  if (exp == "gibbs") {
    const auto s = num.text("scheme");
    if (s != "mala" && s != "ula") c.error("numerics.scheme", "must be \"mala\" or \"ula\"");
  }
  if (exp == "simulate" || exp == "meanfield" || exp == "poc") {
    const auto s = num.text("initial");
    const bool known = s == "default" || s == "von-mises" || (exp == "meanfield" && s == "perturbed");
    if (!known) c.error("numerics.initial", "unknown initial law \"" + s + "\"");
    if (s == "von-mises") need_torus("the von Mises initial law");
  }
  if (exp == "steady-states") {
    const double d = num.real("damping");
    if (d > 1.0) c.error("numerics.damping", "must lie in (0, 1]");
  }
  if (exp == "lln" && !(num.real("s") > 1.5)) c.error("numerics.s", "must exceed 3/2");
  for (const char* key : {"M"}) {
    if (!find_key(exp, key)) continue;
    const auto m = num.integer(key);
    if (m < 4 || (m & (m - 1)) != 0) c.error(std::string("numerics.") + key, "must be a power of two >= 4");
  }
}

}  // namespace

std::string format(const Diagnostic& d) {
  return std::string(d.level == Level::kError ? "error" : "warning") + ": " + d.key + ": " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.level == Level::kError; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, schema] : schemas()) v.push_back(name);
    return v;
  }();
  return names;
}

Json Numerics::lookup(const std::string& key) const {
  const KeySpec* spec = find_key(experiment_, key);
  if (!spec) throw ConfigError("numerics key '" + key + "' is not defined for " + experiment_);
  if (values_.contains(key)) return values_[key];
  return spec->fallback;
}

std::int64_t Numerics::integer(const std::string& key) const { return lookup(key).get<std::int64_t>(); }
double Numerics::real(const std::string& key) const { return lookup(key).get<double>(); }
bool Numerics::flag(const std::string& key) const { return lookup(key).get<bool>(); }
std::string Numerics::text(const std::string& key) const { return lookup(key).get<std::string>(); }

std::optional<double> Numerics::optional_real(const std::string& key) const {
  const Json v = lookup(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::vector<std::size_t> Numerics::sizes(const std::string& key) const {
  return lookup(key).get<std::vector<std::size_t>>();
}

Json Numerics::resolved() const {
  Json out = Json::object();
  for (const auto& k : schemas().at(experiment_)) {
    const Json v = values_.contains(k.name) ? values_[k.name] : k.fallback;
    if (!v.is_null()) out[k.name] = v;
  }
  return out;
}

Json ExperimentConfig::echo() const {
  Json j;
  j["experiment"] = experiment;
  j["seed"] = seed;
  j["output"] = output.string();
  j["model"] = model_block;
  j["numerics"] = numerics.resolved();
  return j;
}

ParseResult parse_config(const Json& doc, const std::filesystem::path& base_dir,
                         const Overrides& overrides) {
  ParseResult result;
  Collector c(result.diagnostics);
  if (!doc.is_object()) {
    c.error("(root)", "config must be a JSON object");
    return result;
  }
  c.only(doc, "", {"experiment", "seed", "output", "model", "numerics"});

  std::string experiment;
  if (overrides.experiment) {
    experiment = *overrides.experiment;
  } else if (doc.contains("experiment") && doc["experiment"].is_string()) {
    experiment = doc["experiment"].get<std::string>();
  } else {
    c.error("experiment", "required key is missing");
  }
  const bool known = schemas().count(experiment) > 0;
  if (!experiment.empty() && !known) c.error("experiment", "unknown experiment \"" + experiment + "\"");

  std::uint64_t seed = 0;
  if (overrides.seed) {
    seed = *overrides.seed;
  } else if (!doc.contains("seed")) {
    c.error("seed", "required key is missing");
  } else if (!doc["seed"].is_number_unsigned()) {
    c.error("seed", "must be a non-negative 64-bit integer");
  } else {
    seed = doc["seed"].get<std::uint64_t>();
  }

  std::filesystem::path output = "mckean-out";
  if (overrides.output) {
    output = *overrides.output;
  } else if (doc.contains("output")) {
    if (doc["output"].is_string()) {
      output = doc["output"].get<std::string>();
    } else {
      c.error("output", "must be a string");
    }
  }

  std::vector<std::string> warnings;
  const Json model_block = doc.contains("model") ? doc["model"] : Json();
  auto model = parse_model(model_block, base_dir, warnings, c);

  Json numerics = doc.contains("numerics") ? doc["numerics"] : Json::object();
  if (!numerics.is_object()) {
    c.error("numerics", "must be an object");
    numerics = Json::object();
  }
  if (!known) return result;

  bool numerics_ok = true;
  for (auto it = numerics.begin(); it != numerics.end(); ++it) {
    if (!find_key(experiment, it.key())) {
      c.error("numerics." + it.key(), "unknown key for experiment " + experiment);
      numerics_ok = false;
    }
  }
  for (const auto& k : schemas().at(experiment)) {
    const std::string key = std::string("numerics.") + k.name;
    if (!numerics.contains(k.name)) {
      if (k.required) {
        c.error(key, "required key is missing");
        numerics_ok = false;
      }
      continue;
    }
    const auto problem = type_problem(numerics[k.name], k);
    if (!problem.empty()) {
      c.error(key, problem);
      numerics_ok = false;
    }
  }
  Numerics num(experiment, numerics);
  if (numerics_ok) check_experiment_constraints(experiment, num, model.get(), c);

  if (!has_errors(result.diagnostics)) {
    ExperimentConfig cfg;
    cfg.experiment = experiment;
    cfg.seed = seed;
    cfg.output = output;
    cfg.model_block = model_block;
    cfg.model = std::move(model);
    cfg.numerics = std::move(num);
    cfg.model_warnings = std::move(warnings);
    result.config = std::move(cfg);
  }
  return result;
}

ParseResult parse_config(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    ParseResult r;
    r.diagnostics.push_back({Level::kError, "(root)", std::string("invalid JSON: ") + e.what()});
    return r;
  }
  return parse_config(doc, path.parent_path(), overrides);
}

}  // namespace mckean::lab

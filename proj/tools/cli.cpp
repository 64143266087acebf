#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <thread>

#include <CLI11.hpp>

#include "coalex/complexity.hpp"
#include "coalex/dataset.hpp"
#include "coalex/errors.hpp"
#include "coalex/evaluation.hpp"
#include "coalex/grouping.hpp"
#include "coalex/influence.hpp"
#include "coalex/model.hpp"
#include "coalex/serialize.hpp"
#include "coalex/synthetic.hpp"

namespace coalex::cli {

namespace {

// Every setting lives in one JSON object assembled from four layers:
// defaults < config file < COALEX_* environment < command-line flags.

enum class Kind { text, count, real, list };

struct Key {
  std::string_view name;
  Kind kind;
  std::string_view help;
};

constexpr Key kKeys[] = {
    {"target", Kind::text, "label column: header name or 0-based index (default: last column)"},
    {"delimiter", Kind::text, "CSV field delimiter"},
    {"model", Kind::text, "rf | tree | prior"},
    {"trees", Kind::count, "trees per random forest"},
    {"max_depth", Kind::count, "tree depth limit, 0 = unbounded"},
    {"min_leaf", Kind::count, "minimum rows per leaf"},
    {"seed", Kind::count, "seed for every random draw"},
    {"method", Kind::text, "explanation method or grouping name"},
    {"k", Kind::count, "depth for kdepth"},
    {"t", Kind::real, "grouping threshold in (0, 0.5)"},
    {"proportion", Kind::real, "target complexity proportion in (0, 1]"},
    {"delta", Kind::real, "fidelity margin for modelbased grouping"},
    {"class", Kind::text, "class to explain (default: predicted class)"},
    {"instances", Kind::text, "all | comma list of row indices or ranges a-b"},
    {"output", Kind::text, "output file (default: stdout)"},
    {"json_output", Kind::text, "JSON mirror of the benchmark records"},
    {"format", Kind::text, "json | csv"},
    {"jobs", Kind::count, "worker threads"},
    {"cap", Kind::count, "largest attribute count for exhaustive enumeration"},
    {"repetitions", Kind::count, "fidelity rounds for modelbased grouping"},
    {"tol", Kind::real, "bisection tolerance on the complexity proportion"},
    {"max_iter", Kind::count, "bisection iterations"},
    {"methods", Kind::list, "comma-separated benchmark methods"},
    {"datasets", Kind::list, "CSV files"},
    {"synthetic", Kind::count, "number of generated datasets"},
    {"synthetic_min_attributes", Kind::count, "generated attribute count, lower bound"},
    {"synthetic_max_attributes", Kind::count, "generated attribute count, upper bound"},
    {"synthetic_min_rows", Kind::count, "generated row count, lower bound"},
    {"synthetic_max_rows", Kind::count, "generated row count, upper bound"},
    {"max_instances", Kind::count, "instances per dataset, 0 = all"},
};

const Key* find_key(std::string_view name) {
  for (const auto& k : kKeys) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

std::string flag_name(std::string_view key) {
  std::string s = "--" + std::string(key);
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

std::string env_name(std::string_view key) {
  std::string s = "COALEX_" + std::string(key);
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::uint64_t parse_count(const std::string& text, std::string_view key) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

double parse_real(const std::string& text, std::string_view key) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Converts a raw value from any layer to the canonical JSON type of `key`.
Json normalize_value(const Key& key, const Json& raw) {
  const std::string name(key.name);
  switch (key.kind) {
    case Kind::text:
      if (raw.is_string()) return raw;
      if (raw.is_number_unsigned()) return raw.get<std::uint64_t>();  // e.g. a target index
      break;
    case Kind::count:
      if (raw.is_number_unsigned()) return raw;
      if (raw.is_string()) return parse_count(raw.get<std::string>(), name);
      break;
    case Kind::real:
      if (raw.is_number()) return raw.get<double>();
      if (raw.is_string()) return parse_real(raw.get<std::string>(), name);
      break;
    case Kind::list:
      if (raw.is_string()) return split_list(raw.get<std::string>());
      if (raw.is_array() && std::all_of(raw.begin(), raw.end(), [](const Json& v) { return v.is_string(); })) {
        return raw;
      }
      break;
  }
  throw ConfigError(name + ": unsupported value " + raw.dump());
}

void apply_layer(Json& merged, const Json& layer, const std::string& source) {
  if (layer.contains("t") && layer.contains("proportion")) {
    throw ConfigError(source + ": t and proportion are mutually exclusive");
  }
  if (layer.contains("t") || layer.contains("proportion")) {
    merged.erase("t");
    merged.erase("proportion");
  }
  for (const auto& [k, v] : layer.items()) merged[k] = v;
}

bool uses(const std::vector<std::string_view>& keys, std::string_view key) {
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

// Keys that the running command does not use are accepted and ignored, so
// one file can serve every command.
Json file_layer(const std::string& path, const std::vector<std::string_view>& keys) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json raw;
  try {
    raw = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!raw.is_object()) throw ConfigError("config file '" + path + "': expected a JSON object");
  Json layer = Json::object();
  for (const auto& [k, v] : raw.items()) {
    const Key* key = find_key(k);
    if (key == nullptr) throw ConfigError("config file '" + path + "': unknown key '" + k + "'");
    if (uses(keys, key->name)) layer[k] = normalize_value(*key, v);
  }
  return layer;
}

Json env_layer(const std::vector<std::string_view>& keys) {
  Json layer = Json::object();
  for (const auto& key : kKeys) {
    if (!uses(keys, key.name)) continue;
    if (const char* v = std::getenv(env_name(key.name).c_str()); v != nullptr && *v != '\0') {
      layer[std::string(key.name)] = normalize_value(key, std::string(v));
    }
  }
  return layer;
}

// --- typed access to the merged settings ------------------------------------

struct Settings {
  std::string command;
  Json values;

  bool has(const char* key) const { return values.contains(key); }
  std::string text(const char* key) const {
    const auto& v = values.at(key);
    return v.is_string() ? v.get<std::string>() : std::to_string(v.get<std::uint64_t>());
  }
  std::size_t count(const char* key) const { return values.at(key).get<std::size_t>(); }
  double real(const char* key) const { return values.at(key).get<double>(); }
  std::vector<std::string> list(const char* key) const {
    return has(key) ? values.at(key).get<std::vector<std::string>>() : std::vector<std::string>{};
  }

  Json echo() const {
    Json j = Json::object();
    j["command"] = command;
    for (const auto& [k, v] : values.items()) j[k] = v;
    return j;
  }
};

CsvOptions csv_options(const Settings& s) {
  const std::string d = s.text("delimiter");
  if (d.size() != 1) throw ConfigError("delimiter must be a single character");
  return CsvOptions{d[0]};
}

TargetColumn target_column(const Settings& s) {
  if (!s.has("target")) return LastColumn{};
  const auto& v = s.values.at("target");
  if (v.is_number_unsigned()) return static_cast<std::size_t>(v.get<std::uint64_t>());
  return v.get<std::string>();
}

Dataset load(const Settings& s, const std::string& path) {
  const TargetColumn target = target_column(s);
  const CsvOptions opts = csv_options(s);
  try {
    return load_csv(path, target, opts);
  } catch (const DataError&) {
    // A numeric target that is not a header name is read as a column index.
    const auto* name = std::get_if<std::string>(&target);
    if (name == nullptr || name->empty() ||
        !std::all_of(name->begin(), name->end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw;
    }
    return load_csv(path, static_cast<std::size_t>(parse_count(*name, "target")), opts);
  }
}

const Dataset& single_dataset(const Settings& s, std::optional<Dataset>& storage) {
  const auto paths = s.list("datasets");
  if (paths.size() != 1) throw ConfigError(s.command + " needs exactly one dataset file");
  storage = load(s, paths.front());
  return *storage;
}

ModelSpec model_spec(const Settings& s) {
  ModelSpec spec;
  spec.kind = parse_model_kind(s.text("model"));
  spec.tree_count = s.count("trees");
  spec.max_depth = s.count("max_depth");
  spec.min_leaf = s.count("min_leaf");
  spec.seed = s.values.at("seed").get<std::uint64_t>();
  spec.validate();
  return spec;
}

GroupingConfig grouping_config(const Settings& s) {
  GroupingConfig g;
  g.repetitions = s.count("repetitions");
  g.seed = s.values.at("seed").get<std::uint64_t>();
  if (g.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  return g;
}

BisectionOptions bisection(const Settings& s) {
  BisectionOptions b;
  b.tol = s.real("tol");
  b.max_iter = s.count("max_iter");
  if (!(b.tol >= 0.0)) throw ConfigError("tol must be >= 0");
  if (b.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  return b;
}

std::string format(const Settings& s) {
  const std::string f = s.text("format");
  if (f != "json" && f != "csv") throw ConfigError("format must be json or csv, got '" + f + "'");
  return f;
}

// The method of explain / groups / complexity, with --k, --t, --proportion
// and --delta folded in. A bare grouping name means coalitional:<name>.
MethodConfig method_config(const Settings& s) {
  std::string text = s.text("method");
  if (text != "complete" && text != "kdepth" && text.rfind("kdepth:", 0) != 0 &&
      text.rfind("coalitional", 0) != 0) {
    try {
      parse_grouping_method(text.substr(0, text.find(':')));
    } catch (const ConfigError&) {
      throw ConfigError("unknown method '" + text +
                        "' (valid: complete, kdepth, coalitional:<grouping>[:<value>] or a grouping name: pca, "
                        "vif, rev_vif, spearman, rev_spearman, modelbased)");
    }
    text = "coalitional:" + text;
  }
  const bool has_k = s.has("k");
  if (text == "kdepth") {
    if (!has_k) throw ConfigError("method kdepth needs --k");
    text += ":" + std::to_string(s.count("k"));
  } else if (has_k) {
    throw ConfigError("--k only applies to method kdepth");
  }
  MethodConfig m = MethodConfig::parse(text);

  const bool has_t = s.has("t"), has_p = s.has("proportion"), has_delta = s.has("delta");
  if (m.kind != InfluenceKind::coalitional) {
    if (has_t || has_p || has_delta) throw ConfigError("--t, --proportion and --delta need a coalitional method");
    return m;
  }
  const int given = int{has_t} + int{has_p} + int{has_delta};
  if (given > 1) throw ConfigError("give only one of --t, --proportion and --delta");
  if (given == 1) {
    if (m.param != MethodConfig::Param::none) {
      throw ConfigError("method '" + text + "' already carries a parameter");
    }
    if (has_t) m.param = MethodConfig::Param::threshold, m.value = s.real("t");
    if (has_p) m.param = MethodConfig::Param::proportion, m.value = s.real("proportion");
    if (has_delta) m.param = MethodConfig::Param::delta, m.value = s.real("delta");
    m.validate();
  }
  return m;
}

std::vector<std::size_t> instance_list(const Settings& s, std::size_t rows) {
  const std::string spec = s.text("instances");
  std::vector<std::size_t> out;
  if (spec == "all") {
    for (std::size_t r = 0; r < rows; ++r) out.push_back(r);
    return out;
  }
  for (const auto& item : split_list(spec)) {
    const auto dash = item.find('-');
    const std::size_t lo = parse_count(item.substr(0, dash), "instances");
    const std::size_t hi = dash == std::string::npos ? lo : parse_count(item.substr(dash + 1), "instances");
    if (hi < lo) throw ConfigError("instances: empty range '" + item + "'");
    if (hi >= rows) {
      throw ConfigError("instances: row " + std::to_string(hi) + " out of range (dataset has " +
                        std::to_string(rows) + " rows)");
    }
    for (std::size_t r = lo; r <= hi; ++r) out.push_back(r);
  }
  if (out.empty()) throw ConfigError("instances: nothing selected");
  return out;
}

void emit(const Settings& s, const std::string& key, const std::string& content, std::ostream& out) {
  if (!s.has(key.c_str()) || s.text(key.c_str()) == "-") {
    out << content;
    return;
  }
  const std::string path = s.text(key.c_str());
  std::ofstream file(path, std::ios::binary);
  if (!file || !(file << content)) throw DataError("cannot write '" + path + "'");
}

std::string config_comment(const Settings& s) { return "config: " + s.echo().dump(); }

Json coalition_json(const ResolvedCoalition& r, const Dataset& d, const MethodConfig& m) {
  Json j = to_json(r.coalition, d, m.id(), r.parameter);
  if (r.target_proportion) j["target_proportion"] = *r.target_proportion;
  j["achieved_proportion"] = r.achieved_proportion;
  j["closest_achievable"] = r.closest_achievable;
  return j;
}

// --- commands ---------------------------------------------------------------

int cmd_explain(const Settings& s, std::ostream& out) {
  const std::string fmt = format(s);
  std::optional<Dataset> storage;
  const Dataset& d = single_dataset(s, storage);
  const ModelSpec spec = model_spec(s);
  const MethodConfig m = method_config(s);
  const std::size_t cap = s.count("cap");
  const std::size_t n = d.attribute_count();
  if (m.kind == InfluenceKind::complete && n > cap) {
    throw CapExceeded("complete influence refused: " + std::to_string(n) + " attributes exceed the cap of " +
                      std::to_string(cap) + " (use kdepth or a coalitional method)");
  }
  if (m.kind == InfluenceKind::kdepth && m.value > static_cast<double>(n)) {
    throw ConfigError("kdepth needs k <= " + std::to_string(n));
  }
  const auto rows = instance_list(s, d.row_count());
  std::optional<ClassTarget> target;
  if (s.has("class")) target = d.target(s.text("class"));

  std::optional<ResolvedCoalition> resolved;
  InfluenceMethod method;
  if (m.kind == InfluenceKind::kdepth) {
    method = InfluenceMethod::kdepth(static_cast<std::size_t>(m.value));
  } else if (m.kind == InfluenceKind::coalitional) {
    resolved = resolve_coalition(m, d, spec, grouping_config(s), bisection(s));
    method = InfluenceMethod::coalitional(resolved->coalition, m.id());
  }

  InfluenceEngine engine(d, spec, InfluenceOptions{cap});
  std::vector<InfluenceVector> results(rows.size());
  const std::size_t workers = std::clamp<std::size_t>(s.count("jobs"), 1, rows.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      try {
        results[i] = engine.explain(rows[i], method, target);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  std::ostringstream text;
  if (fmt == "csv") {
    std::vector<std::string> comments{config_comment(s)};
    if (resolved) {
      comments.push_back("coalition: " + coalition_json(*resolved, d, m).dump());
    }
    write_influence_csv(text, results, d, comments);
  } else {
    Json j;
    j["config"] = s.echo();
    j["dataset"] = {{"attributes", d.attribute_names()},
                    {"rows", d.row_count()},
                    {"classes", d.class_set()}};
    j["method"] = method.tag();
    if (resolved) j["coalition"] = coalition_json(*resolved, d, m);
    j["trainings"] = engine.trainings();
    Json list = Json::array();
    for (const auto& v : results) list.push_back(to_json(v, d));
    j["results"] = std::move(list);
    text << j.dump(2) << "\n";
  }
  emit(s, "output", text.str(), out);
  return kExitOk;
}

MethodConfig grouping_method(const Settings& s) {
  const MethodConfig m = method_config(s);
  if (m.kind != InfluenceKind::coalitional) {
    throw ConfigError("method '" + m.id() + "' is not a grouping method");
  }
  return m;
}

int cmd_groups(const Settings& s, std::ostream& out) {
  const std::string fmt = format(s);
  std::optional<Dataset> storage;
  const Dataset& d = single_dataset(s, storage);
  const MethodConfig m = grouping_method(s);
  const auto resolved = resolve_coalition(m, d, model_spec(s), grouping_config(s), bisection(s));

  std::ostringstream text;
  if (fmt == "csv") {
    text << "# " << config_comment(s) << "\n";
    text << "# threshold=" << resolved.parameter << " achieved_proportion=" << resolved.achieved_proportion
         << " closest_achievable=" << (resolved.closest_achievable ? "true" : "false") << "\n";
    text << "group,attribute\n";
    const auto named = resolved.coalition.named_groups(d.attribute_names());
    for (std::size_t g = 0; g < named.size(); ++g) {
      for (const auto& a : named[g]) text << g << "," << a << "\n";
    }
  } else {
    Json j;
    j["config"] = s.echo();
    const Json groups = coalition_json(resolved, d, m);
    for (const auto& [k, v] : groups.items()) j[k] = v;
    j["complexity"] = to_json(complexity_report(resolved.coalition));
    text << j.dump(2) << "\n";
  }
  emit(s, "output", text.str(), out);
  return kExitOk;
}

int cmd_complexity(const Settings& s, std::ostream& out) {
  const std::string fmt = format(s);
  std::optional<Dataset> storage;
  const Dataset& d = single_dataset(s, storage);
  const MethodConfig m = method_config(s);
  const std::size_t n = d.attribute_count();

  ComplexityReport report;
  std::optional<ResolvedCoalition> resolved;
  if (m.kind == InfluenceKind::coalitional) {
    resolved = resolve_coalition(m, d, model_spec(s), grouping_config(s), bisection(s));
    report = complexity_report(resolved->coalition);
  } else {
    const std::size_t k = m.kind == InfluenceKind::kdepth ? static_cast<std::size_t>(m.value) : n;
    if (k > n) throw ConfigError("kdepth needs k <= " + std::to_string(n));
    double subsets = 0.0, binom = 1.0;
    for (std::size_t size = 1; size <= k; ++size) {
      binom = binom * static_cast<double>(n - size + 1) / static_cast<double>(size);
      subsets += binom;
    }
    report.closure_size = static_cast<std::size_t>(std::llround(subsets));
    report.complete_size = complete_complexity(n);
    report.proportion = subsets / report.complete_size;
  }

  std::ostringstream text;
  if (fmt == "csv") {
    text << "# " << config_comment(s) << "\n";
    text << "method,closure_size,complete_size,proportion\n";
    text << m.id() << "," << report.closure_size << "," << report.complete_size << "," << report.proportion
         << "\n";
  } else {
    Json j;
    j["config"] = s.echo();
    j["method"] = m.id();
    j["attributes"] = n;
    const Json summary = to_json(report);
    for (const auto& [k, v] : summary.items()) j[k] = v;
    if (resolved) j["coalition"] = coalition_json(*resolved, d, m);
    text << j.dump(2) << "\n";
  }
  emit(s, "output", text.str(), out);
  return kExitOk;
}

int cmd_benchmark(const Settings& s, std::ostream& out, std::ostream& err) {
  const std::string fmt = format(s);
  const ModelSpec spec = model_spec(s);
  std::vector<MethodConfig> methods;
  for (const auto& text : s.list("methods")) methods.push_back(MethodConfig::parse(text));
  if (methods.empty()) throw ConfigError("benchmark needs at least one method");

  std::vector<NamedDataset> datasets;
  for (const auto& path : s.list("datasets")) datasets.push_back({path, load(s, path)});
  if (const std::size_t count = s.count("synthetic"); count > 0) {
    SuiteConfig suite;
    suite.count = count;
    suite.min_attributes = s.count("synthetic_min_attributes");
    suite.max_attributes = s.count("synthetic_max_attributes");
    suite.min_rows = s.count("synthetic_min_rows");
    suite.max_rows = s.count("synthetic_max_rows");
    suite.seed = spec.seed;
    if (suite.min_attributes < 1 || suite.min_rows < 2 || suite.min_attributes > suite.max_attributes ||
        suite.min_rows > suite.max_rows) {
      throw ConfigError("synthetic ranges must satisfy 1 <= min <= max attributes and 2 <= min <= max rows");
    }
    for (auto& named : synthetic_suite(suite)) datasets.push_back(std::move(named));
  }
  if (datasets.empty()) throw ConfigError("benchmark needs dataset files or --synthetic N");

  BenchmarkOptions options;
  options.seed = spec.seed;
  options.max_instances = s.count("max_instances");
  options.jobs = std::max<std::size_t>(1, s.count("jobs"));
  options.complete_cap = s.count("cap");
  options.bisection = bisection(s);
  options.grouping = grouping_config(s);
  const auto records = run_benchmark(datasets, methods, spec, options, &err);

  Json mirror;
  mirror["config"] = s.echo();
  Json list = Json::array();
  for (const auto& r : records) list.push_back(to_json(r));
  mirror["records"] = std::move(list);

  std::ostringstream text;
  if (fmt == "csv") {
    write_benchmark_csv(text, records, {config_comment(s)});
  } else {
    text << mirror.dump(2) << "\n";
  }
  emit(s, "output", text.str(), out);
  if (s.has("json_output")) emit(s, "json_output", mirror.dump(2) + "\n", out);
  return kExitOk;
}

// --- command-line wiring ------------------------------------------------------

struct Command {
  CLI::App* app = nullptr;
  std::vector<std::string_view> keys;
  Json defaults;
};

constexpr std::string_view kCommonKeys[] = {"target", "delimiter", "model", "trees",  "max_depth",
                                            "min_leaf", "seed",    "output", "format", "jobs",
                                            "cap",      "repetitions", "tol", "max_iter"};

Json common_defaults() {
  return Json{{"delimiter", ","},
              {"model", "rf"},
              {"trees", 100},
              {"max_depth", 0},
              {"min_leaf", 1},
              {"seed", 0},
              {"format", "json"},
              {"jobs", 1},
              {"cap", 20},
              {"repetitions", 10},
              {"tol", 0.02},
              {"max_iter", 20}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coalitional influence explanations for tabular classifiers", "coalex"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "coalex 0.1.0");

  std::vector<Command> commands;
  auto add = [&](const char* name, const char* description, std::vector<std::string_view> extra,
                 Json defaults) -> Command& {
    Command c;
    c.app = app.add_subcommand(name, description);
    c.keys.assign(std::begin(kCommonKeys), std::end(kCommonKeys));
    c.keys.insert(c.keys.end(), extra.begin(), extra.end());
    c.defaults = common_defaults();
    for (const auto& [k, v] : defaults.items()) c.defaults[k] = v;
    commands.push_back(std::move(c));
    return commands.back();
  };
  add("explain", "influence of every attribute for selected instances",
      {"method", "k", "t", "proportion", "delta", "class", "instances", "datasets"},
      {{"method", "complete"}, {"instances", "all"}});
  add("groups", "attribute coalition produced by a grouping method",
      {"method", "t", "proportion", "delta", "datasets"}, {{"method", "spearman"}});
  add("complexity", "number of subsets a method evaluates",
      {"method", "k", "t", "proportion", "delta", "datasets"}, {{"method", "complete"}});
  add("benchmark", "error and time of methods against the complete influence",
      {"methods", "datasets", "json_output", "synthetic", "synthetic_min_attributes", "synthetic_max_attributes",
       "synthetic_min_rows", "synthetic_max_rows", "max_instances"},
      {{"format", "csv"},
       {"methods", Json::array({"complete", "kdepth:1", "kdepth:2", "coalitional:spearman:p=0.25"})},
       {"synthetic", 0},
       {"synthetic_min_attributes", 2},
       {"synthetic_max_attributes", 8},
       {"synthetic_min_rows", 50},
       {"synthetic_max_rows", 300},
       {"max_instances", 0}});

  // Raw flag text per command and key; present only when given.
  std::vector<std::map<std::string, std::string>> flag_text(commands.size());
  std::vector<std::vector<std::string>> positional(commands.size());
  std::vector<std::string> config_path(commands.size());
  std::vector<std::map<std::string, CLI::Option*>> options(commands.size());
  for (std::size_t c = 0; c < commands.size(); ++c) {
    auto* sub = commands[c].app;
    sub->add_option("--config", config_path[c], "JSON config file (flags and COALEX_* variables override it)");
    for (const auto key_name : commands[c].keys) {
      const Key* key = find_key(key_name);
      const std::string name(key->name);
      if (name == "datasets") {
        options[c][name] = sub->add_option("datasets", positional[c], "CSV dataset files");
        continue;
      }
      std::string flags = flag_name(name);
      if (name == "output") flags = "-o," + flags;
      static constexpr const char* kTypeNames[] = {"TEXT", "UINT", "FLOAT", "LIST"};
      options[c][name] = sub->add_option(flags, flag_text[c][name], std::string(key->help))
                             ->type_name(kTypeNames[static_cast<int>(key->kind)]);
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    for (std::size_t c = 0; c < commands.size(); ++c) {
      if (!commands[c].app->parsed()) continue;
      Settings s;
      s.command = commands[c].app->get_name();
      s.values = commands[c].defaults;
      if (!config_path[c].empty()) apply_layer(s.values, file_layer(config_path[c], commands[c].keys), "config file");
      apply_layer(s.values, env_layer(commands[c].keys), "environment");
      Json flags = Json::object();
      for (const auto& [name, opt] : options[c]) {
        if (opt->count() == 0) continue;
        const Key* key = find_key(name);
        flags[name] = name == "datasets" ? Json(positional[c]) : normalize_value(*key, flag_text[c][name]);
      }
      apply_layer(s.values, flags, "command line");

      if (s.command == "explain") return cmd_explain(s, out);
      if (s.command == "groups") return cmd_groups(s, out);
      if (s.command == "complexity") return cmd_complexity(s, out);
      return cmd_benchmark(s, out, err);
    }
    return kExitFailure;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace coalex::cli

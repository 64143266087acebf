#include "coalex/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "coalex/errors.hpp"

namespace coalex {

double influence_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("influence_distance: length mismatch");
  if (a.empty()) throw std::invalid_argument("influence_distance: empty vectors");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sum += std::sqrt(diff * diff);
  }
  return sum / (2.0 * std::sqrt(static_cast<double>(a.size())));
}

double influence_distance(const InfluenceVector& a, const InfluenceVector& b) {
  return influence_distance(a.values, b.values);
}

ErrorScore error_score(const InfluenceVector& approx, const InfluenceVector& oracle) {
  if (approx.instance != oracle.instance || approx.target != oracle.target ||
      approx.values.size() != oracle.values.size()) {
    throw std::invalid_argument("error_score: vectors explain different instances, classes or sizes");
  }
  return {influence_distance(approx.values, oracle.values), approx.values.size(), approx.method};
}

GroupStats group_stats(const Coalition& g) {
  GroupStats s;
  s.count = g.size();
  std::size_t total = 0;
  for (const auto& group : g.groups()) total += group.size();
  s.mean_size = s.count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(s.count);
  return s;
}

namespace {

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("invalid number '" + text + "' in method '" + context + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) out.push_back(part);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

template <typename Fn>
void for_each_index(std::size_t count, bool parallel, Fn fn) {
  const std::size_t workers =
      parallel ? std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()))
               : 1;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Oracle {
  std::vector<std::size_t> instances;
  std::vector<ClassTarget> targets;
  std::vector<InfluenceVector> influences;
  double seconds = 0.0;
  std::size_t trainings = 0;
};

Oracle compute_oracle(const Dataset& d, const ModelSpec& spec, const BenchmarkOptions& options) {
  Oracle o;
  const std::size_t count =
      options.max_instances == 0 ? d.row_count() : std::min(options.max_instances, d.row_count());
  for (std::size_t r = 0; r < count; ++r) o.instances.push_back(r);
  o.targets.resize(count);
  o.influences.resize(count);

  const auto start = Clock::now();
  InfluenceEngine engine(d, spec, InfluenceOptions{options.complete_cap});
  for (std::size_t i = 0; i < count; ++i) o.targets[i] = engine.predicted_class(o.instances[i]);
  for_each_index(count, options.parallel_instances, [&](std::size_t i) {
    o.influences[i] = engine.complete(o.instances[i], o.targets[i]);
  });
  o.seconds = seconds_since(start);
  o.trainings = engine.trainings();
  return o;
}

BenchmarkRecord run_cell(const NamedDataset& named, const MethodConfig& method, const ModelSpec& spec,
                         const BenchmarkOptions& options, const Oracle& oracle) {
  const Dataset& d = named.data;
  const std::size_t n = d.attribute_count();
  const std::size_t count = oracle.instances.size();

  BenchmarkRecord rec;
  rec.dataset = named.id;
  rec.method = method.name();
  rec.param = method.param_string();
  rec.seed = options.seed;
  rec.instances = count;
  rec.attributes = n;
  rec.model = spec;
  rec.parallel_timed = options.parallel_instances;

  if (method.kind == InfluenceKind::complete) {
    rec.mean_error = 0.0;
    rec.time_per_instance_s = std::max(oracle.seconds / static_cast<double>(count), 1e-12);
    rec.time_ratio_vs_complete = 1.0;
    rec.complexity_proportion = 1.0;
    rec.group_count_mean = 1.0;
    rec.group_size_mean = static_cast<double>(n);
    rec.trainings = oracle.trainings;
    return rec;
  }

  std::vector<InfluenceVector> results(count);
  const auto start = Clock::now();
  InfluenceEngine engine(d, spec, InfluenceOptions{options.complete_cap});
  Coalition coalition;
  if (method.kind == InfluenceKind::coalitional) {
    GroupingConfig gc = options.grouping;
    gc.seed = options.seed;
    auto resolved = resolve_coalition(method, d, spec, gc, options.bisection);
    rec.threshold = resolved.parameter;
    rec.closest_achievable = resolved.closest_achievable;
    coalition = std::move(resolved.coalition);
  }
  const InfluenceMethod im = method.kind == InfluenceKind::kdepth
                                 ? InfluenceMethod::kdepth(static_cast<std::size_t>(method.value))
                                 : InfluenceMethod::coalitional(coalition, method.id());
  for_each_index(count, options.parallel_instances, [&](std::size_t i) {
    results[i] = engine.explain(oracle.instances[i], im, oracle.targets[i]);
  });
  const double elapsed = seconds_since(start);

  double total_error = 0.0;
  for (std::size_t i = 0; i < count; ++i) total_error += error_score(results[i], oracle.influences[i]).value;
  rec.mean_error = total_error / static_cast<double>(count);
  rec.time_per_instance_s = std::max(elapsed / static_cast<double>(count), 1e-12);
  rec.time_ratio_vs_complete = elapsed / std::max(oracle.seconds, 1e-12);
  rec.trainings = engine.trainings();
  if (method.kind == InfluenceKind::kdepth) {
    const auto k = static_cast<std::size_t>(method.value);
    double subsets = 0.0;
    for (std::size_t s = 1; s <= k; ++s) subsets += binomial(n, s);
    rec.complexity_proportion = subsets / complete_complexity(n);
  } else {
    const auto stats = group_stats(coalition);
    rec.complexity_proportion = complexity_proportion(coalition);
    rec.group_count_mean = static_cast<double>(stats.count);
    rec.group_size_mean = stats.mean_size;
  }
  return rec;
}

}  // namespace

MethodConfig MethodConfig::parse(const std::string& text) {
  const auto parts = split(text, ':');
  MethodConfig m;
  if (parts.empty()) throw ConfigError("empty method");
  if (parts[0] == "complete" && parts.size() == 1) return m;
  if (parts[0] == "kdepth" && parts.size() == 2) {
    m.kind = InfluenceKind::kdepth;
    m.param = Param::k;
    const std::string v = parts[1].rfind("k=", 0) == 0 ? parts[1].substr(2) : parts[1];
    m.value = parse_double(v, text);
    if (m.value < 1 || m.value != std::floor(m.value)) throw ConfigError("kdepth needs an integer k >= 1");
    return m;
  }
  if (parts[0] == "coalitional" && (parts.size() == 2 || parts.size() == 3)) {
    m.kind = InfluenceKind::coalitional;
    m.grouping = parse_grouping_method(parts[1]);
    if (parts.size() == 2) return m;
    std::string v = parts[2];
    if (v.rfind("p=", 0) == 0) {
      m.param = Param::proportion;
      v = v.substr(2);
    } else if (v.rfind("t=", 0) == 0) {
      m.param = Param::threshold;
      v = v.substr(2);
    } else if (v.rfind("delta=", 0) == 0) {
      m.param = Param::delta;
      v = v.substr(6);
    } else {
      m.param = m.grouping == GroupingMethod::model_based ? Param::delta : Param::proportion;
    }
    m.value = parse_double(v, text);
    m.validate();
    return m;
  }
  throw ConfigError("invalid method '" + text +
                    "' (expected complete, kdepth:<k> or coalitional:<grouping>[:<value>])");
}

void MethodConfig::validate() const {
  const std::string text = id();
  if (kind == InfluenceKind::kdepth) {
    if (param != Param::k || value < 1 || value != std::floor(value)) {
      throw ConfigError("method '" + text + "': kdepth needs an integer k >= 1");
    }
    return;
  }
  if (kind != InfluenceKind::coalitional || param == Param::none) return;
  const bool model_based = grouping == GroupingMethod::model_based;
  if (model_based != (param == Param::delta)) {
    throw ConfigError("method '" + text + "': modelbased takes delta=, other groupings take p= or t=");
  }
  if (param == Param::proportion && !(value > 0 && value <= 1)) {
    throw ConfigError("method '" + text + "': proportion must be in (0, 1]");
  }
  if (param == Param::threshold && !(value > 0 && value < 0.5)) {
    throw ConfigError("method '" + text + "': threshold must be in (0, 0.5)");
  }
  if (param == Param::delta && !(value > 0)) {
    throw ConfigError("method '" + text + "': delta must be > 0");
  }
}

std::string MethodConfig::name() const {
  switch (kind) {
    case InfluenceKind::complete: return "complete";
    case InfluenceKind::kdepth: return "kdepth";
    case InfluenceKind::coalitional: return "coalitional:" + to_string(grouping);
  }
  return "unknown";
}

std::string MethodConfig::param_string() const {
  switch (param) {
    case Param::none: return "";
    case Param::k: return "k=" + format_number(value);
    case Param::threshold: return "t=" + format_number(value);
    case Param::proportion: return "p=" + format_number(value);
    case Param::delta: return "delta=" + format_number(value);
  }
  return "";
}

std::string MethodConfig::id() const {
  const auto p = param_string();
  return p.empty() ? name() : name() + ":" + p;
}

ResolvedCoalition resolve_coalition(const MethodConfig& method, const Dataset& d, const ModelSpec& spec,
                                    const GroupingConfig& grouping, const BisectionOptions& bisection) {
  if (method.kind != InfluenceKind::coalitional) {
    throw ConfigError("method '" + method.id() + "' is not coalitional");
  }
  PreparedGrouping prepared(method.grouping, d, grouping, spec);
  ResolvedCoalition out;
  if (method.param == MethodConfig::Param::proportion) {
    auto found = find_threshold(prepared, method.value, bisection);
    out.parameter = found.threshold;
    out.target_proportion = method.value;
    out.closest_achievable = found.closest_achievable;
    out.coalition = std::move(found.coalition);
  } else {
    if (method.param == MethodConfig::Param::none) {
      out.parameter = method.grouping == GroupingMethod::model_based ? grouping.delta : grouping.threshold;
    } else {
      out.parameter = method.value;
    }
    out.coalition = prepared.at(out.parameter);
  }
  out.achieved_proportion = complexity_proportion(out.coalition);
  return out;
}

std::vector<BenchmarkRecord> run_benchmark(const std::vector<NamedDataset>& datasets,
                                           const std::vector<MethodConfig>& methods, const ModelSpec& spec,
                                           const BenchmarkOptions& options, std::ostream* log) {
  ModelSpec seeded = spec;
  seeded.seed = options.seed;
  std::vector<std::vector<BenchmarkRecord>> per_dataset(datasets.size());
  std::mutex log_mutex;

  auto run_dataset = [&](std::size_t i) {
    const auto& named = datasets[i];
    const std::size_t n = named.data.attribute_count();
    if (n > options.complete_cap) {
      if (log != nullptr) {
        std::lock_guard lock(log_mutex);
        *log << "skipping dataset '" << named.id << "': " << n << " attributes exceed the complete cap of "
             << options.complete_cap << "\n";
      }
      return;
    }
    for (const auto& m : methods) {
      if (m.kind == InfluenceKind::kdepth && m.value > static_cast<double>(n)) {
        throw ConfigError("method '" + m.id() + "' needs k <= " + std::to_string(n) + " for dataset '" +
                          named.id + "'");
      }
    }
    const Oracle oracle = compute_oracle(named.data, seeded, options);
    for (const auto& m : methods) per_dataset[i].push_back(run_cell(named, m, seeded, options, oracle));
  };

  const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < datasets.size(); ++i) run_dataset(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(jobs, datasets.size()); ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < datasets.size(); i = next++) {
          try {
            run_dataset(i);
          } catch (...) {
            std::lock_guard lock(log_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<BenchmarkRecord> out;
  for (auto& records : per_dataset) {
    for (auto& r : records) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace coalex

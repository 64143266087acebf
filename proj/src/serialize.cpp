#include "coalex/serialize.hpp"

#include <iomanip>
#include <sstream>

namespace coalex {

namespace {

std::string csv_number(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_comments(std::ostream& out, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << "\n";
}

}  // namespace

Json to_json(const InfluenceVector& v, const Dataset& d) {
  Json influences = Json::object();
  for (std::size_t a = 0; a < v.values.size(); ++a) influences[d.attribute_names().at(a)] = v.values[a];
  return Json{{"instance", v.instance}, {"class", v.target.class_id}, {"method", v.method},
              {"influences", influences}};
}

Json to_json(const Coalition& g, const Dataset& d, const std::string& method, double threshold) {
  return Json{{"groups", g.named_groups(d.attribute_names())}, {"method", method}, {"threshold", threshold}};
}

Json to_json(const ComplexityReport& r) {
  return Json{{"closure_size", r.closure_size},   {"complete_size", r.complete_size},
              {"proportion", r.proportion},       {"group_count", r.group_count},
              {"mean_group_size", r.mean_group_size}};
}

Json to_json(const ModelSpec& spec) {
  return Json{{"kind", to_string(spec.kind)},
              {"tree_count", spec.tree_count},
              {"max_depth", spec.max_depth},
              {"min_leaf", spec.min_leaf},
              {"seed", spec.seed}};
}

Json to_json(const BenchmarkRecord& r) {
  Json j{{"dataset", r.dataset},
         {"method", r.method},
         {"param", r.param},
         {"mean_error", r.mean_error},
         {"time_per_instance_s", r.time_per_instance_s},
         {"time_ratio_vs_complete", r.time_ratio_vs_complete},
         {"complexity_proportion", r.complexity_proportion},
         {"group_count_mean", r.group_count_mean ? Json(*r.group_count_mean) : Json(nullptr)},
         {"group_size_mean", r.group_size_mean ? Json(*r.group_size_mean) : Json(nullptr)},
         {"seed", r.seed},
         {"instances", r.instances},
         {"attributes", r.attributes},
         {"trainings", r.trainings},
         {"threshold", r.threshold ? Json(*r.threshold) : Json(nullptr)},
         {"closest_achievable", r.closest_achievable},
         {"parallel_timed", r.parallel_timed},
         {"model", to_json(r.model)}};
  return j;
}

const std::vector<std::string>& benchmark_csv_columns() {
  static const std::vector<std::string> columns{
      "dataset",           "method",          "param",         "mean_error", "time_per_instance_s",
      "time_ratio_vs_complete", "complexity_proportion", "group_count_mean", "group_size_mean", "seed"};
  return columns;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records,
                         const std::vector<std::string>& header_comments) {
  write_comments(out, header_comments);
  const auto& cols = benchmark_csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : records) {
    out << csv_field(r.dataset) << ',' << csv_field(r.method) << ',' << csv_field(r.param) << ','
        << csv_number(r.mean_error) << ',' << csv_number(r.time_per_instance_s) << ','
        << csv_number(r.time_ratio_vs_complete) << ',' << csv_number(r.complexity_proportion) << ','
        << (r.group_count_mean ? csv_number(*r.group_count_mean) : "") << ','
        << (r.group_size_mean ? csv_number(*r.group_size_mean) : "") << ',' << r.seed << "\n";
  }
}

void write_influence_csv(std::ostream& out, const std::vector<InfluenceVector>& vectors, const Dataset& d,
                         const std::vector<std::string>& header_comments) {
  write_comments(out, header_comments);
  out << "instance,class,method";
  for (const auto& name : d.attribute_names()) out << ',' << csv_field(name);
  out << "\n";
  for (const auto& v : vectors) {
    out << v.instance << ',' << csv_field(v.target.class_id) << ',' << csv_field(v.method);
    for (double x : v.values) out << ',' << csv_number(x);
    out << "\n";
  }
}

}  // namespace coalex

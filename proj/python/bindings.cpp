#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

#include "coalex/coalition.hpp"
#include "coalex/complexity.hpp"
#include "coalex/dataset.hpp"
#include "coalex/errors.hpp"
#include "coalex/evaluation.hpp"
#include "coalex/grouping.hpp"
#include "coalex/influence.hpp"
#include "coalex/model.hpp"
#include "coalex/synthetic.hpp"

namespace py = pybind11;
using namespace coalex;

namespace {

TargetColumn target_column(const py::object& target) {
  if (target.is_none()) return LastColumn{};
  if (py::isinstance<py::int_>(target)) return target.cast<std::size_t>();
  return target.cast<std::string>();
}

Coalition coalition_from_groups(const std::vector<std::vector<std::size_t>>& groups, std::size_t n) {
  std::vector<AttributeSubset> subsets;
  subsets.reserve(groups.size());
  for (const auto& g : groups) subsets.push_back(AttributeSubset::of(n, g));
  return Coalition::normalize(std::move(subsets), n);
}

std::vector<std::vector<std::size_t>> group_indices(const Coalition& g) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : g.groups()) out.push_back(s.indices());
  return out;
}

std::optional<ClassTarget> class_target(const Dataset& d, const std::optional<std::string>& class_id) {
  if (!class_id) return std::nullopt;
  return d.target(*class_id);
}

py::dict record_dict(const BenchmarkRecord& r) {
  py::dict out;
  out["dataset"] = r.dataset;
  out["method"] = r.method;
  out["param"] = r.param;
  out["mean_error"] = r.mean_error;
  out["time_per_instance_s"] = r.time_per_instance_s;
  out["time_ratio_vs_complete"] = r.time_ratio_vs_complete;
  out["complexity_proportion"] = r.complexity_proportion;
  out["group_count_mean"] = r.group_count_mean;
  out["group_size_mean"] = r.group_size_mean;
  out["seed"] = r.seed;
  out["instances"] = r.instances;
  out["attributes"] = r.attributes;
  out["trainings"] = r.trainings;
  out["threshold"] = r.threshold;
  out["closest_achievable"] = r.closest_achievable;
  return out;
}

}  // namespace

PYBIND11_MODULE(_coalex, m) {
  m.doc() = "Coalitional influence explanations for tabular classifiers";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<CapExceeded>(m, "CapExceeded", PyExc_RuntimeError);

  py::class_<ClassTarget>(m, "ClassTarget")
      .def_readonly("class_id", &ClassTarget::class_id)
      .def_readonly("index", &ClassTarget::index)
      .def("__repr__", [](const ClassTarget& c) { return "ClassTarget('" + c.class_id + "')"; });

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](std::vector<std::string> names, const std::vector<std::vector<double>>& rows,
                       std::vector<std::string> labels) {
             std::vector<double> flat;
             for (const auto& row : rows) {
               if (row.size() != names.size()) throw DataError("every row needs one value per attribute");
               flat.insert(flat.end(), row.begin(), row.end());
             }
             return Dataset(std::move(names), std::move(flat), std::move(labels));
           }),
           py::arg("attribute_names"), py::arg("rows"), py::arg("labels"))
      .def_static(
          "from_csv",
          [](const std::filesystem::path& path, const py::object& target, char delimiter) {
            return load_csv(path, target_column(target), CsvOptions{delimiter});
          },
          py::arg("path"), py::arg("target") = py::none(), py::arg("delimiter") = ',')
      .def_static(
          "parse_csv",
          [](const std::string& text, const py::object& target, char delimiter) {
            return parse_csv(text, target_column(target), CsvOptions{delimiter});
          },
          py::arg("text"), py::arg("target") = py::none(), py::arg("delimiter") = ',')
      .def_property_readonly("attribute_names", &Dataset::attribute_names)
      .def_property_readonly("class_set", &Dataset::class_set)
      .def_property_readonly("labels", &Dataset::labels)
      .def_property_readonly("attribute_count", &Dataset::attribute_count)
      .def_property_readonly("row_count", &Dataset::row_count)
      .def("row", [](const Dataset& d, std::size_t r) {
        if (r >= d.row_count()) throw py::index_error("row out of range");
        const auto row = d.row(r);
        return std::vector<double>(row.begin(), row.end());
      })
      .def("class_prior", [](const Dataset& d, const std::string& c) { return class_prior(d, d.target(c)); })
      .def("__len__", &Dataset::row_count);

  py::class_<ModelSpec>(m, "ModelSpec")
      .def(py::init([](const std::string& kind, std::size_t trees, std::size_t max_depth, std::size_t min_leaf,
                       std::uint64_t seed) {
             ModelSpec s;
             s.kind = parse_model_kind(kind);
             s.tree_count = trees;
             s.max_depth = max_depth;
             s.min_leaf = min_leaf;
             s.seed = seed;
             s.validate();
             return s;
           }),
           py::arg("kind") = "rf", py::arg("trees") = 100, py::arg("max_depth") = 0, py::arg("min_leaf") = 1,
           py::arg("seed") = 0)
      .def_property_readonly("kind", [](const ModelSpec& s) { return to_string(s.kind); })
      .def_readonly("trees", &ModelSpec::tree_count)
      .def_readonly("max_depth", &ModelSpec::max_depth)
      .def_readonly("min_leaf", &ModelSpec::min_leaf)
      .def_readonly("seed", &ModelSpec::seed);

  py::class_<Coalition>(m, "Coalition")
      .def(py::init(&coalition_from_groups), py::arg("groups"), py::arg("attribute_count"))
      .def_static("singletons", &Coalition::singletons)
      .def_static("single_group", &Coalition::single_group)
      .def_property_readonly("groups", &group_indices)
      .def_property_readonly("attribute_count", &Coalition::attribute_count)
      .def("named_groups", &Coalition::named_groups)
      .def("__len__", &Coalition::size)
      .def("__eq__", [](const Coalition& a, const Coalition& b) { return a == b; })
      .def("__repr__", [](const Coalition& c) {
        return "Coalition(" + py::repr(py::cast(group_indices(c))).cast<std::string>() + ")";
      });

  py::class_<InfluenceVector>(m, "InfluenceVector")
      .def_readonly("values", &InfluenceVector::values)
      .def_readonly("instance", &InfluenceVector::instance)
      .def_property_readonly("class_id", [](const InfluenceVector& v) { return v.target.class_id; })
      .def_readonly("method", &InfluenceVector::method);

  py::class_<InfluenceEngine>(m, "Explainer")
      .def(py::init([](const Dataset& d, const ModelSpec& spec, std::size_t cap) {
             return std::make_unique<InfluenceEngine>(d, spec, InfluenceOptions{cap});
           }),
           py::arg("dataset"), py::arg("model") = ModelSpec{}, py::arg("cap") = 20, py::keep_alive<1, 2>())
      .def_property_readonly("trainings", &InfluenceEngine::trainings)
      .def(
          "predicted_class", [](InfluenceEngine& e, std::size_t row) { return e.predicted_class(row).class_id; },
          py::arg("row"), py::call_guard<py::gil_scoped_release>())
      .def(
          "complete",
          [](InfluenceEngine& e, std::size_t row, const std::optional<std::string>& c) {
            return e.complete(row, class_target(e.dataset(), c));
          },
          py::arg("row"), py::arg("class_id") = py::none(), py::call_guard<py::gil_scoped_release>())
      .def(
          "kdepth",
          [](InfluenceEngine& e, std::size_t row, std::size_t k, const std::optional<std::string>& c) {
            return e.kdepth(row, k, class_target(e.dataset(), c));
          },
          py::arg("row"), py::arg("k"), py::arg("class_id") = py::none(), py::call_guard<py::gil_scoped_release>())
      .def(
          "coalitional",
          [](InfluenceEngine& e, std::size_t row, const Coalition& g, const std::optional<std::string>& c) {
            return e.coalitional(row, g, class_target(e.dataset(), c));
          },
          py::arg("row"), py::arg("coalition"), py::arg("class_id") = py::none(),
          py::call_guard<py::gil_scoped_release>());

  m.def("grouping_methods", [] {
    std::vector<std::string> out;
    for (auto g : {GroupingMethod::pca, GroupingMethod::vif, GroupingMethod::rev_vif, GroupingMethod::spearman,
                   GroupingMethod::rev_spearman, GroupingMethod::model_based}) {
      out.push_back(to_string(g));
    }
    return out;
  });

  m.def(
      "group",
      [](const std::string& method, const Dataset& d, double parameter, const ModelSpec& spec,
         std::size_t repetitions, std::uint64_t seed) {
        GroupingConfig config;
        config.repetitions = repetitions;
        config.seed = seed;
        return PreparedGrouping(parse_grouping_method(method), d, config, spec).at(parameter);
      },
      "Coalition for threshold t (or delta for modelbased).", py::arg("method"), py::arg("dataset"),
      py::arg("parameter"), py::arg("model") = ModelSpec{}, py::arg("repetitions") = 10, py::arg("seed") = 0,
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "find_threshold",
      [](const std::string& method, const Dataset& d, double target, double tol, std::size_t max_iter) {
        BisectionOptions options;
        options.tol = tol;
        options.max_iter = max_iter;
        ThresholdSearch found;
        {
          py::gil_scoped_release release;
          found = find_threshold(parse_grouping_method(method), d, target, options);
        }
        py::dict out;
        out["threshold"] = found.threshold;
        out["achieved"] = found.achieved;
        out["coalition"] = found.coalition;
        out["closest_achievable"] = found.closest_achievable;
        out["probes"] = found.probes;
        return out;
      },
      py::arg("method"), py::arg("dataset"), py::arg("target"), py::arg("tol") = 0.02, py::arg("max_iter") = 20);

  m.def("closure_size", &closure_size);
  m.def("complexity_proportion", &complexity_proportion);
  m.def("influence_distance", [](const std::vector<double>& a, const std::vector<double>& b) {
    return influence_distance(a, b);
  });

  m.def(
      "make_synthetic",
      [](std::size_t attributes, std::size_t rows, std::uint64_t seed) {
        SyntheticConfig c;
        c.attributes = attributes;
        c.rows = rows;
        c.seed = seed;
        return make_synthetic(c);
      },
      py::arg("attributes") = 6, py::arg("rows") = 200, py::arg("seed") = 0);

  m.def(
      "run_benchmark",
      [](const std::vector<std::pair<std::string, Dataset>>& datasets, const std::vector<std::string>& methods,
         const ModelSpec& spec, std::uint64_t seed, std::size_t max_instances, std::size_t cap) {
        std::vector<NamedDataset> named;
        for (const auto& [id, d] : datasets) named.push_back({id, d});
        std::vector<MethodConfig> configs;
        for (const auto& text : methods) configs.push_back(MethodConfig::parse(text));
        BenchmarkOptions options;
        options.seed = seed;
        options.max_instances = max_instances;
        options.complete_cap = cap;
        std::vector<BenchmarkRecord> records;
        {
          py::gil_scoped_release release;
          records = run_benchmark(named, configs, spec, options);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
      },
      py::arg("datasets"), py::arg("methods"), py::arg("model") = ModelSpec{}, py::arg("seed") = 0,
      py::arg("max_instances") = 0, py::arg("cap") = 20);
}

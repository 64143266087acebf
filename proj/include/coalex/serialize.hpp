#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coalex/coalition.hpp"
#include "coalex/complexity.hpp"
#include "coalex/dataset.hpp"
#include "coalex/evaluation.hpp"
#include "coalex/influence.hpp"
#include "coalex/model.hpp"

namespace coalex {

using Json = nlohmann::ordered_json;

/// {instance, class, method, influences: {attribute_name: value}}
Json to_json(const InfluenceVector& v, const Dataset& d);

/// {groups: [[attribute_name, ...], ...], method, threshold}
Json to_json(const Coalition& g, const Dataset& d, const std::string& method, double threshold);

Json to_json(const ComplexityReport& r);
Json to_json(const ModelSpec& spec);
Json to_json(const BenchmarkRecord& r);

/// Column order of the benchmark CSV.
const std::vector<std::string>& benchmark_csv_columns();

/// Writes `# `-prefixed header lines followed by the CSV table.
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records,
                         const std::vector<std::string>& header_comments = {});

/// One row per vector: instance,class,method,<attribute names...>
void write_influence_csv(std::ostream& out, const std::vector<InfluenceVector>& vectors, const Dataset& d,
                         const std::vector<std::string>& header_comments = {});

}  // namespace coalex

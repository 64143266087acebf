#include "coalex/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "coalex/errors.hpp"

namespace coalex {

Dataset::Dataset(std::vector<std::string> attribute_names, std::vector<double> features,
                 std::vector<std::string> labels)
    : names_(std::move(attribute_names)), features_(std::move(features)), labels_(std::move(labels)) {
  if (labels_.empty()) throw DataError("dataset has no rows");
  if (features_.size() != names_.size() * labels_.size()) {
    throw DataError("feature matrix size does not match rows x attributes");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (!seen.insert(name).second) throw DataError("duplicate attribute name '" + name + "'");
  }
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (!std::isfinite(features_[i])) {
      throw DataError("non-finite value at row " + std::to_string(i / names_.size()) +
                      ", column '" + names_[i % names_.size()] + "'");
    }
  }
  std::unordered_map<std::string, std::size_t> index;
  label_index_.reserve(labels_.size());
  for (const auto& label : labels_) {
    auto [it, inserted] = index.try_emplace(label, classes_.size());
    if (inserted) classes_.push_back(label);
    label_index_.push_back(it->second);
  }
}

std::span<const double> Dataset::row(std::size_t r) const {
  if (r >= row_count()) throw std::out_of_range("row index out of range");
  return std::span<const double>(features_).subspan(r * names_.size(), names_.size());
}

std::vector<double> Dataset::column(std::size_t c) const {
  if (c >= attribute_count()) throw std::out_of_range("column index out of range");
  std::vector<double> out(row_count());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
  return out;
}

ClassTarget Dataset::target(const std::string& class_id) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == class_id) return {class_id, i};
  }
  throw std::invalid_argument("unknown class '" + class_id + "'");
}

ClassTarget Dataset::target(std::size_t class_index) const {
  if (class_index >= classes_.size()) throw std::invalid_argument("class index out of range");
  return {classes_[class_index], class_index};
}

namespace {

std::vector<std::vector<std::string>> split_records(const std::string& text, char delim,
                                                    const std::string& source) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t line = 1;
  std::size_t i = 0;
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) i = 3;

  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
    // Lines that are completely empty are skipped.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field += ch;
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == delim) {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\r') {
      // CR of a CRLF pair; a bare CR is treated the same way.
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_record();
      ++line;
    } else if (ch == '\n') {
      end_record();
      ++line;
    } else {
      field += ch;
      field_started = true;
    }
  }
  if (quoted) throw DataError(source + ": unterminated quoted field near line " + std::to_string(line));
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
  const std::string t = trim(cell);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

Dataset parse_csv(const std::string& text, const TargetColumn& target, const CsvOptions& options,
                  const std::string& source) {
  auto records = split_records(text, options.delimiter, source);
  if (records.empty()) throw DataError(source + ": missing header row");
  const auto header = records.front();
  if (records.size() < 2) throw DataError(source + ": empty data section");

  std::size_t target_col = 0;
  if (const auto* name = std::get_if<std::string>(&target)) {
    bool found = false;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (trim(header[c]) == *name) {
        target_col = c;
        found = true;
        break;
      }
    }
    if (!found) throw DataError(source + ": target column '" + *name + "' not found");
  } else if (std::holds_alternative<LastColumn>(target)) {
    target_col = header.size() - 1;
  } else {
    target_col = std::get<std::size_t>(target);
    if (target_col >= header.size()) {
      throw DataError(source + ": target column index " + std::to_string(target_col) +
                      " out of range");
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != target_col) names.push_back(trim(header[c]));
  }
  if (names.empty()) throw DataError(source + ": no feature columns");

  std::vector<double> features;
  std::vector<std::string> labels;
  features.reserve((records.size() - 1) * names.size());
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw DataError(source + ": row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < rec.size(); ++c) {
      if (c == target_col) {
        const std::string label = trim(rec[c]);
        if (label.empty()) throw DataError(source + ": missing label at row " + std::to_string(r));
        labels.push_back(label);
        continue;
      }
      double value = 0.0;
      if (!parse_number(rec[c], value)) {
        throw DataError(source + ": non-numeric cell '" + rec[c] + "' at row " + std::to_string(r) +
                        ", column '" + trim(header[c]) + "'");
      }
      features.push_back(value);
    }
  }
  return Dataset(std::move(names), std::move(features), std::move(labels));
}

Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target,
                 const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), target, options, path.string());
}

Dataset project(const Dataset& d, const AttributeSubset& subset) {
  if (subset.universe() != d.attribute_count()) {
    throw std::invalid_argument("subset universe does not match the dataset");
  }
  const auto cols = subset.indices();
  std::vector<std::string> names;
  for (std::size_t c : cols) names.push_back(d.attribute_names()[c]);
  std::vector<double> features;
  features.reserve(cols.size() * d.row_count());
  for (std::size_t r = 0; r < d.row_count(); ++r) {
    for (std::size_t c : cols) features.push_back(d.at(r, c));
  }
  return Dataset(std::move(names), std::move(features), d.labels());
}

double class_prior(const Dataset& d, const ClassTarget& c) {
  if (c.index >= d.class_count() || d.class_set()[c.index] != c.class_id) {
    throw std::invalid_argument("unknown class '" + c.class_id + "'");
  }
  std::size_t count = 0;
  for (std::size_t idx : d.label_indices()) count += idx == c.index ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(d.row_count());
}

std::vector<double> class_priors(const Dataset& d) {
  std::vector<double> counts(d.class_count(), 0.0);
  for (std::size_t idx : d.label_indices()) counts[idx] += 1.0;
  for (auto& c : counts) c /= static_cast<double>(d.row_count());
  return counts;
}

}  // namespace coalex

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coalex/subset.hpp"

namespace coalex {

/// A class label together with its position in the owning dataset's class set.
struct ClassTarget {
  std::string class_id;
  std::size_t index = 0;

  bool operator==(const ClassTarget&) const = default;
};

/// An immutable numeric classification dataset.
///
/// Features are stored row-major. The class set is ordered by first
/// appearance in the label column, so row order fully determines it.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<std::string> attribute_names, std::vector<double> features,
          std::vector<std::string> labels);

  std::size_t attribute_count() const { return names_.size(); }
  std::size_t row_count() const { return labels_.size(); }

  const std::vector<std::string>& attribute_names() const { return names_; }
  const std::vector<std::string>& class_set() const { return classes_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t class_count() const { return classes_.size(); }

  std::span<const double> row(std::size_t r) const;
  double at(std::size_t r, std::size_t c) const { return features_[r * names_.size() + c]; }
  std::vector<double> column(std::size_t c) const;
  std::span<const double> features() const { return features_; }

  std::size_t label_index(std::size_t r) const { return label_index_[r]; }
  const std::vector<std::size_t>& label_indices() const { return label_index_; }

  ClassTarget target(const std::string& class_id) const;
  ClassTarget target(std::size_t class_index) const;

  AttributeSubset all_attributes() const { return AttributeSubset::full(attribute_count()); }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<double> features_;
  std::vector<std::string> labels_;
  std::vector<std::string> classes_;
  std::vector<std::size_t> label_index_;
};

struct CsvOptions {
  char delimiter = ',';
};

struct LastColumn {};

/// Column selector for the label column: a header name, a 0-based index,
/// or the last column.
using TargetColumn = std::variant<std::string, std::size_t, LastColumn>;

/// Reads a header-first CSV file. The target column becomes the label
/// vector; every other cell must parse as a finite number.
Dataset load_csv(const std::filesystem::path& path, const TargetColumn& target,
                 const CsvOptions& options = {});
Dataset parse_csv(const std::string& text, const TargetColumn& target,
                  const CsvOptions& options = {}, const std::string& source = "<memory>");

/// Keeps only the columns in `subset`, in original order. Labels and the
/// class set are untouched, so an empty subset yields a zero-column dataset.
Dataset project(const Dataset& d, const AttributeSubset& subset);

/// Fraction of rows labelled with `c`.
double class_prior(const Dataset& d, const ClassTarget& c);
std::vector<double> class_priors(const Dataset& d);

}  // namespace coalex

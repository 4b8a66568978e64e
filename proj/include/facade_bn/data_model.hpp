#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facade_bn {

/// A categorical variable with an ordered list of level codes.
struct VariableSpec {
  std::string name;
  std::vector<std::string> levels;

  std::size_t cardinality() const noexcept { return levels.size(); }
  std::optional<int> level_index(std::string_view code) const;
};

/// Ordered set of categorical variables. Names are unique, each variable has
/// at least two distinct levels.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<VariableSpec> variables);

  std::size_t size() const noexcept { return variables_.size(); }
  const std::vector<VariableSpec>& variables() const noexcept { return variables_; }
  const VariableSpec& variable(std::size_t i) const { return variables_.at(i); }
  std::size_t cardinality(std::size_t i) const { return variables_.at(i).cardinality(); }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Index of `name`; throws UnknownVariable.
  std::size_t index_of(std::string_view name) const;
  /// Level index of `code` for variable `var`; throws InvalidLevel.
  int level_of(std::size_t var, std::string_view code) const;

  std::vector<std::string> names() const;
  /// Product of all cardinalities.
  std::uint64_t joint_state_count() const;

  friend bool operator==(const Schema& a, const Schema& b);

 private:
  std::vector<VariableSpec> variables_;
};

bool operator==(const VariableSpec& a, const VariableSpec& b);

/// TR, MD, CE, B, T, C, DC, DO, PL, RF with three levels each.
Schema default_facade_schema();

enum class MissingPolicy { Reject, DropRow };

/// Complete categorical observations in schema column order. Cells hold level
/// indices; row i is stored at [i * width, (i + 1) * width).
class Dataset {
 public:
  Dataset(Schema schema, std::vector<int> cells);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t width() const noexcept { return schema_.size(); }
  int at(std::size_t row, std::size_t var) const { return cells_[row * width() + var]; }
  std::span<const int> row(std::size_t r) const {
    return {cells_.data() + r * width(), width()};
  }
  const std::vector<int>& cells() const noexcept { return cells_; }

  /// Non-fatal ingestion notes (ignored columns, dropped rows).
  std::vector<std::string> warnings;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.schema_ == b.schema_ && a.cells_ == b.cells_;
  }

 private:
  Schema schema_;
  std::vector<int> cells_;
  std::size_t rows_ = 0;
};

Dataset load_dataset(std::istream& source, const Schema& schema,
                     MissingPolicy policy = MissingPolicy::Reject);
Dataset load_dataset(std::string_view csv_text, const Schema& schema,
                     MissingPolicy policy = MissingPolicy::Reject);
Dataset load_dataset_file(const std::string& path, const Schema& schema,
                          MissingPolicy policy = MissingPolicy::Reject);

/// CSV with a header row and level codes, in schema order.
std::string to_csv(const Dataset& data);

/// Counts over the cross product of `axes` among rows matching `given`.
/// Cell order is row-major: the last axis varies fastest.
struct CountTable {
  std::vector<std::string> axes;
  std::vector<std::size_t> shape;
  std::map<std::string, std::string> given;
  std::vector<std::int64_t> counts;
  std::int64_t total = 0;

  std::int64_t at(std::span<const int> levels) const;
};

CountTable contingency_table(const Dataset& data, const std::vector<std::string>& axes,
                             const std::map<std::string, std::string>& given = {});

}  // namespace facade_bn

#include "facade_bn/data_model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "facade_bn/error.hpp"

namespace facade_bn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    auto field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "NA"; }

}  // namespace

std::optional<int> VariableSpec::level_index(std::string_view code) const {
  auto it = std::find(levels.begin(), levels.end(), code);
  if (it == levels.end()) return std::nullopt;
  return static_cast<int>(it - levels.begin());
}

bool operator==(const VariableSpec& a, const VariableSpec& b) {
  return a.name == b.name && a.levels == b.levels;
}

Schema::Schema(std::vector<VariableSpec> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) throw Error(ErrorKind::SchemaMismatch, "schema has no variables");
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw Error(ErrorKind::SchemaMismatch, "empty variable name");
    if (!seen.insert(v.name).second) {
      throw Error(ErrorKind::SchemaMismatch, "duplicate variable '" + v.name + "'");
    }
    if (v.levels.size() < 2) {
      throw Error(ErrorKind::SchemaMismatch, "variable '" + v.name + "' needs at least 2 levels");
    }
    std::set<std::string> codes(v.levels.begin(), v.levels.end());
    if (codes.size() != v.levels.size()) {
      throw Error(ErrorKind::SchemaMismatch, "duplicate level code in '" + v.name + "'");
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorKind::UnknownVariable, "'" + std::string(name) + "'");
}

int Schema::level_of(std::size_t var, std::string_view code) const {
  if (auto l = variables_.at(var).level_index(code)) return *l;
  throw Error(ErrorKind::InvalidLevel, "'" + std::string(code) + "' is not a level of '" +
                                           variables_.at(var).name + "'");
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

std::uint64_t Schema::joint_state_count() const {
  std::uint64_t total = 1;
  for (const auto& v : variables_) total *= v.cardinality();
  return total;
}

bool operator==(const Schema& a, const Schema& b) { return a.variables_ == b.variables_; }

Schema default_facade_schema() {
  return Schema({
      {"TR", {"TR_S", "TR_M", "TR_N"}},
      {"MD", {"MD_S", "MD_M", "MD_N"}},
      {"CE", {"C_B", "C_E", "C_C"}},
      {"B", {"B_S", "B_N", "B_W"}},
      {"T", {"T_S", "T_N", "T_W"}},
      {"C", {"C_S", "C_N", "C_W"}},
      {"DC", {"DC_FR", "DC_CN", "DC_HY"}},
      {"DO", {"DO_FR", "DO_CN", "DO_HY"}},
      {"PL", {"PL_FR", "PL_CN", "PL_HY"}},
      {"RF", {"RF_FR", "RF_CN", "RF_HY"}},
  });
}

Dataset::Dataset(Schema schema, std::vector<int> cells)
    : schema_(std::move(schema)), cells_(std::move(cells)) {
  const std::size_t w = schema_.size();
  if (cells_.size() % w != 0) {
    throw Error(ErrorKind::SchemaMismatch, "cell count is not a multiple of the schema width");
  }
  rows_ = cells_.size() / w;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const auto card = static_cast<int>(schema_.cardinality(i % w));
    if (cells_[i] < 0 || cells_[i] >= card) {
      throw Error(ErrorKind::InvalidLevel, "level index out of range at row " +
                                               std::to_string(i / w + 1) + ", column " +
                                               schema_.variable(i % w).name);
    }
  }
}

Dataset load_dataset(std::istream& source, const Schema& schema, MissingPolicy policy) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(source, line)) {
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw Error(ErrorKind::EmptyData, "no header row");
  if (header.front().rfind("\xEF\xBB\xBF", 0) == 0) header.front().erase(0, 3);

  std::vector<std::string> warnings;
  // column_of[var] = CSV column holding that schema variable
  std::vector<std::size_t> column_of(schema.size(), header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (auto var = schema.find(header[c])) {
      if (column_of[*var] != header.size()) {
        throw Error(ErrorKind::SchemaMismatch, "duplicate column '" + header[c] + "'");
      }
      column_of[*var] = c;
    } else {
      warnings.push_back("ignored column '" + header[c] + "'");
    }
  }
  for (std::size_t v = 0; v < schema.size(); ++v) {
    if (column_of[v] == header.size()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "header lacks variable '" + schema.variable(v).name + "'");
    }
  }

  std::vector<int> cells;
  std::size_t record = 0;
  std::size_t dropped = 0;
  std::vector<int> row(schema.size());
  while (std::getline(source, line)) {
    if (trim(line).empty()) continue;
    ++record;
    auto fields = split_csv_line(line);
    if (fields.size() > header.size()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "row " + std::to_string(record) + " has more cells than the header");
    }
    bool missing = false;
    for (std::size_t v = 0; v < schema.size(); ++v) {
      const auto c = column_of[v];
      const std::string_view cell = c < fields.size() ? std::string_view(fields[c]) : "";
      if (is_missing(cell)) {
        if (policy == MissingPolicy::Reject) {
          throw Error(ErrorKind::MissingValue, "row " + std::to_string(record) + ", column " +
                                                   schema.variable(v).name);
        }
        missing = true;
        break;
      }
      auto level = schema.variable(v).level_index(cell);
      if (!level) {
        throw Error(ErrorKind::InvalidLevel, "row " + std::to_string(record) + ", column " +
                                                 schema.variable(v).name + ", value '" +
                                                 std::string(cell) + "'");
      }
      row[v] = *level;
    }
    if (missing) {
      ++dropped;
      continue;
    }
    cells.insert(cells.end(), row.begin(), row.end());
  }
  if (dropped > 0) warnings.push_back("dropped " + std::to_string(dropped) + " row(s) with missing cells");
  if (cells.empty()) throw Error(ErrorKind::EmptyData, "dataset has no complete rows");

  Dataset data(schema, std::move(cells));
  data.warnings = std::move(warnings);
  return data;
}

Dataset load_dataset(std::string_view csv_text, const Schema& schema, MissingPolicy policy) {
  std::istringstream in{std::string(csv_text)};
  return load_dataset(in, schema, policy);
}

Dataset load_dataset_file(const std::string& path, const Schema& schema, MissingPolicy policy) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  return load_dataset(in, schema, policy);
}

std::string to_csv(const Dataset& data) {
  std::string out;
  const auto& schema = data.schema();
  for (std::size_t v = 0; v < schema.size(); ++v) {
    if (v) out += ',';
    out += schema.variable(v).name;
  }
  out += '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t v = 0; v < schema.size(); ++v) {
      if (v) out += ',';
      out += schema.variable(v).levels[data.at(r, v)];
    }
    out += '\n';
  }
  return out;
}

std::int64_t CountTable::at(std::span<const int> levels) const {
  std::size_t index = 0;
  for (std::size_t a = 0; a < shape.size(); ++a) index = index * shape[a] + levels[a];
  return counts.at(index);
}

CountTable contingency_table(const Dataset& data, const std::vector<std::string>& axes,
                             const std::map<std::string, std::string>& given) {
  const auto& schema = data.schema();
  if (axes.empty()) throw Error(ErrorKind::DomainError, "contingency table needs at least one axis");

  std::vector<std::size_t> axis_idx;
  CountTable table;
  table.axes = axes;
  table.given = given;
  for (const auto& name : axes) {
    auto v = schema.index_of(name);
    if (given.contains(name)) {
      throw Error(ErrorKind::DomainError, "'" + name + "' is both an axis and conditioned on");
    }
    if (std::find(axis_idx.begin(), axis_idx.end(), v) != axis_idx.end()) {
      throw Error(ErrorKind::DomainError, "repeated axis '" + name + "'");
    }
    axis_idx.push_back(v);
    table.shape.push_back(schema.cardinality(v));
  }
  std::vector<std::pair<std::size_t, int>> filter;
  for (const auto& [name, code] : given) {
    auto v = schema.index_of(name);
    filter.emplace_back(v, schema.level_of(v, code));
  }

  std::size_t cells = 1;
  for (auto s : table.shape) cells *= s;
  table.counts.assign(cells, 0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    bool match = std::all_of(filter.begin(), filter.end(),
                             [&](const auto& f) { return data.at(r, f.first) == f.second; });
    if (!match) continue;
    std::size_t index = 0;
    for (std::size_t a = 0; a < axis_idx.size(); ++a) {
      index = index * table.shape[a] + static_cast<std::size_t>(data.at(r, axis_idx[a]));
    }
    ++table.counts[index];
    ++table.total;
  }
  return table;
}

}  // namespace facade_bn

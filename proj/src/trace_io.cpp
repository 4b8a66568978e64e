#include "facade_bn/trace_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "facade_bn/error.hpp"

namespace facade_bn {

namespace {

std::string file_stem(std::size_t index, const std::string& label) {
  std::string stem;
  for (unsigned char ch : label) {
    stem += std::isalnum(ch) ? static_cast<char>(ch) : '_';
  }
  char prefix[16];
  std::snprintf(prefix, sizeof prefix, "c%03zu_", index);
  return prefix + stem;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_traces(const std::filesystem::path& dir, const std::vector<ChainSet>& sets,
                  const Json& run_info) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  Json manifest = run_info;
  Json entries = Json::array();
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto& set = sets[i];
    const auto name = file_stem(i, set.coefficient.label) + ".csv";
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + (dir / name).string() + "'");
    out << "iteration";
    for (std::size_t c = 0; c < set.chains.size(); ++c) out << ",chain_" << c + 1;
    out << '\n';
    const std::size_t len = set.chains.empty() ? 0 : set.chains.front().size();
    for (std::size_t t = 0; t < len; ++t) {
      out << t + 1;
      for (const auto& chain : set.chains) out << ',' << format_double(chain[t]);
      out << '\n';
    }
    entries.push_back({{"child", set.coefficient.child}, {"label", set.coefficient.label}, {"file", name},
                       {"warmup_dropped", set.warmup_dropped}, {"seed", set.seed}});
  }
  manifest["coefficients"] = entries;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::Io, "cannot write manifest in '" + dir.string() + "'");
  out << manifest.dump(2) << '\n';
}

std::vector<ChainSet> read_traces(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw Error(ErrorKind::Io, "no manifest.json in '" + dir.string() + "'");
  Json manifest;
  try {
    manifest = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Io, std::string("bad manifest: ") + e.what());
  }

  std::vector<ChainSet> sets;
  for (const auto& entry : manifest.at("coefficients")) {
    ChainSet set;
    set.coefficient = {entry.at("child").get<std::string>(), entry.at("label").get<std::string>()};
    set.warmup_dropped = entry.value("warmup_dropped", std::size_t{0});
    set.seed = entry.value("seed", std::uint64_t{0});
    const auto path = dir / entry.at("file").get<std::string>();
    std::ifstream csv(path);
    if (!csv) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
    std::string line;
    std::getline(csv, line);
    const auto columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    set.chains.assign(columns, {});
    while (std::getline(csv, line)) {
      if (line.empty() || line == "\r") continue;
      std::stringstream fields(line);
      std::string cell;
      std::getline(fields, cell, ',');
      for (std::size_t c = 0; c < columns; ++c) {
        if (!std::getline(fields, cell, ',')) {
          throw Error(ErrorKind::Io, "short row in '" + path.string() + "'");
        }
        try {
          set.chains[c].push_back(std::stod(cell));
        } catch (const std::exception&) {
          throw Error(ErrorKind::Io, "non-numeric cell '" + cell + "' in '" + path.string() + "'");
        }
      }
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

}  // namespace facade_bn

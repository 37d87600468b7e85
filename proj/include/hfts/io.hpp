#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hfts/forecast.hpp"
#include "hfts/hierarchy.hpp"
#include "hfts/simulate.hpp"

// File formats: CSV matrices (one row per time index, one column per grid
// point) and JSON documents for hierarchy configs and simulation specs.
// Numbers are written with 17 significant digits so doubles round-trip
// exactly; all writes go through a temp file plus rename.

namespace hfts {

namespace detail {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline bool parse_double(std::string_view token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && begin != end;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace detail

/// Writes `text` to `path` atomically (temp file in the same directory, then
/// rename).
inline void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw DataError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename '" + tmp.string() + "' to '" + path.string() + "'");
}

/// Reads a rectangular numeric CSV. A single non-numeric first row is
/// treated as a header and skipped.
template <typename Scalar = double>
Matrix<Scalar> read_csv_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::vector<std::vector<Scalar>> rows;
  std::string line;
  Index line_no = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    std::vector<Scalar> row;
    row.reserve(fields.size());
    bool ok = true;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      double v = 0;
      if (!detail::parse_double(fields[f], v)) {
        if (first_content_row) {
          ok = false;  // header row
          break;
        }
        throw DataError("'" + path.string() + "': line " + std::to_string(line_no) + ", field " +
                        std::to_string(f + 1) + " is not numeric");
      }
      row.push_back(static_cast<Scalar>(v));
    }
    if (!ok) {
      first_content_row = false;
      continue;
    }
    first_content_row = false;
    if (!rows.empty() && rows.front().size() != row.size())
      throw DataError("'" + path.string() + "': line " + std::to_string(line_no) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("'" + path.string() + "': no numeric rows");
  Matrix<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

template <typename Scalar = double>
void write_csv_matrix(const std::filesystem::path& path, const Matrix<Scalar>& values,
                      const std::vector<std::string>& header = {}) {
  std::string text;
  if (!header.empty()) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j) text += ',';
      text += header[j];
    }
    text += '\n';
  }
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (j) text += ',';
      text += detail::format_double(static_cast<double>(values(i, j)));
    }
    text += '\n';
  }
  atomic_write_text(path, text);
}

inline DepthKind depth_kind_from_string(const std::string& s) {
  if (s == "mbd") return DepthKind::MBD;
  if (s == "gbd") return DepthKind::GBD;
  throw ConfigError("unknown depth kind '" + s + "' (expected mbd or gbd)");
}

inline ForecastMethod method_from_string(const std::string& s) {
  if (s == "aggregated-median") return ForecastMethod::AggregatedMedian;
  if (s == "moving-mean") return ForecastMethod::MovingMean;
  throw ConfigError("unknown method '" + s + "' (expected aggregated-median or moving-mean)");
}

inline KernelKind kernel_kind_from_string(const std::string& s) {
  if (s == "sloping-s") return KernelKind::SlopingS;
  if (s == "sloping-t") return KernelKind::SlopingT;
  if (s == "exponential") return KernelKind::Exponential;
  throw ConfigError("unknown kernel kind '" + s + "'");
}

inline LeafProcess leaf_process_from_string(const std::string& s) {
  if (s == "far1") return LeafProcess::Far1;
  if (s == "wiener") return LeafProcess::ScaledWiener;
  throw ConfigError("unknown leaf process '" + s + "' (expected far1 or wiener)");
}

/// Run parameters carried by a hierarchy config; CLI flags override them.
struct RunParams {
  Index window = 10;
  DepthKind depth = DepthKind::MBD;
  ForecastMethod method = ForecastMethod::AggregatedMedian;
  Index grid_points = 0;  // 0: use the data's column count
  double t0 = 0.0;
  double t1 = 1.0;
  std::uint64_t seed = 42;
  int min_children = 2;
};

namespace detail {

inline nlohmann::json parse_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

inline void read_run_params(const nlohmann::json& doc, RunParams& params) {
  try {
    if (doc.contains("window")) params.window = doc.at("window").get<Index>();
    if (doc.contains("depth")) params.depth = depth_kind_from_string(doc.at("depth").get<std::string>());
    if (doc.contains("method"))
      params.method = method_from_string(doc.at("method").get<std::string>());
    if (doc.contains("seed")) params.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("min_children")) params.min_children = doc.at("min_children").get<int>();
    if (doc.contains("grid")) {
      const auto& g = doc.at("grid");
      if (g.contains("points")) params.grid_points = g.at("points").get<Index>();
      if (g.contains("t0")) params.t0 = g.at("t0").get<double>();
      if (g.contains("t1")) params.t1 = g.at("t1").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad run parameters: ") + e.what());
  }
  if (params.window < 1) throw ConfigError("window length must be positive");
}

}  // namespace detail

template <typename Scalar = double>
struct LoadedHierarchy {
  HierarchyData<Scalar> data;
  RunParams params;
};

/// Loads a hierarchy config: node list with optional per-node CSVs plus run
/// parameters. Data paths are resolved relative to the config file. Leaves
/// must have data; internal nodes without data are synthesized as child sums.
template <typename Scalar = double>
LoadedHierarchy<Scalar> load_hierarchy(const std::filesystem::path& config_path) {
  const nlohmann::json doc = detail::parse_json_file(config_path);
  RunParams params;
  detail::read_run_params(doc, params);
  if (!doc.contains("nodes") || !doc.at("nodes").is_array() || doc.at("nodes").empty())
    throw ConfigError("'" + config_path.string() + "': missing non-empty 'nodes' array");

  std::vector<HierarchySpec::NodeDef> defs;
  std::map<std::string, std::filesystem::path> data_files;
  const std::filesystem::path base = config_path.parent_path();
  for (const auto& node : doc.at("nodes")) {
    HierarchySpec::NodeDef def;
    try {
      def.id = node.at("id").get<std::string>();
      if (node.contains("children"))
        def.children = node.at("children").get<std::vector<std::string>>();
      if (node.contains("data")) {
        const auto rel = node.at("data").get<std::string>();
        data_files[def.id] = base / rel;
      }
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("'" + config_path.string() + "': bad node entry: " + e.what());
    }
    defs.push_back(std::move(def));
  }
  const HierarchySpec spec = HierarchySpec::build(defs, params.min_children);

  std::map<std::string, Matrix<Scalar>> matrices;
  Index n_rows = -1, n_cols = -1;
  for (const auto& [id, path] : data_files) {
    if (!std::filesystem::exists(path))
      throw ConfigError("node '" + id + "': data file '" + path.string() + "' does not exist");
    Matrix<Scalar> m = read_csv_matrix<Scalar>(path);
    if (n_rows < 0) {
      n_rows = m.rows();
      n_cols = m.cols();
    } else if (m.rows() != n_rows || m.cols() != n_cols) {
      throw DataError("node '" + id + "': data is " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()) + ", expected " + std::to_string(n_rows) + "x" +
                      std::to_string(n_cols));
    }
    matrices.emplace(id, std::move(m));
  }
  if (matrices.empty()) throw ConfigError("'" + config_path.string() + "': no node has data");
  if (params.grid_points != 0 && params.grid_points != n_cols)
    throw DataError("config grid has " + std::to_string(params.grid_points) +
                    " points but data files have " + std::to_string(n_cols) + " columns");
  const Grid<Scalar> grid = Grid<Scalar>::uniform(n_cols, static_cast<Scalar>(params.t0),
                                                  static_cast<Scalar>(params.t1));
  params.grid_points = n_cols;

  std::map<std::string, FunctionalTimeSeries<Scalar>> provided;
  for (auto& [id, m] : matrices) {
    try {
      provided.emplace(id, FunctionalTimeSeries<Scalar>(grid, std::move(m)));
    } catch (const DataError& e) {
      throw DataError("node '" + id + "': " + e.what());
    }
  }
  return {fill_internal_series(spec, provided), params};
}

/// Writes one CSV per node plus a reloadable hierarchy.json (and planted.csv
/// when outlier ground truth is given).
template <typename Scalar = double>
void write_hierarchy_dataset(const std::filesystem::path& dir, const HierarchyData<Scalar>& data,
                             const RunParams& params,
                             const std::map<std::string, std::vector<Index>>& planted = {}) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec && !fs::exists(dir)) throw DataError("cannot create directory '" + dir.string() + "'");

  const HierarchySpec& spec = data.spec();
  nlohmann::json doc;
  doc["window"] = params.window;
  doc["depth"] = to_string(params.depth);
  doc["method"] = to_string(params.method);
  doc["seed"] = params.seed;
  doc["min_children"] = params.min_children;
  doc["grid"] = {{"points", data.grid().size()},
                 {"t0", static_cast<double>(data.grid().t0())},
                 {"t1", static_cast<double>(data.grid().t1())}};
  doc["nodes"] = nlohmann::json::array();
  for (int v = 0; v < spec.node_count(); ++v) {
    nlohmann::json node;
    node["id"] = spec.id(v);
    if (!spec.is_leaf(v)) {
      std::vector<std::string> child_ids;
      for (int c : spec.children(v)) child_ids.push_back(spec.id(c));
      node["children"] = child_ids;
    }
    const std::string file = spec.id(v) + ".csv";
    node["data"] = file;
    doc["nodes"].push_back(std::move(node));
    write_csv_matrix(dir / file, data.series(v).values());
  }
  atomic_write_text(dir / "hierarchy.json", doc.dump(2) + "\n");

  if (!planted.empty()) {
    std::string text = "node,index\n";
    for (const auto& [id, indices] : planted)
      for (const Index i : indices) text += id + "," + std::to_string(i) + "\n";
    atomic_write_text(dir / "planted.csv", text);
  }
}

/// Parses a simulation spec document. Topology is either "fig4" or an inline
/// node list of {id, children}.
inline SimulationSpec load_simulation_spec(const std::filesystem::path& path) {
  const nlohmann::json doc = detail::parse_json_file(path);
  SimulationSpec spec;
  try {
    if (doc.contains("topology")) {
      const auto& topo = doc.at("topology");
      if (topo.is_string()) {
        if (topo.get<std::string>() != "fig4")
          throw ConfigError("unknown topology '" + topo.get<std::string>() + "'");
      } else {
        std::vector<HierarchySpec::NodeDef> defs;
        for (const auto& node : topo) {
          HierarchySpec::NodeDef def;
          def.id = node.at("id").get<std::string>();
          if (node.contains("children"))
            def.children = node.at("children").get<std::vector<std::string>>();
          defs.push_back(std::move(def));
        }
        const int min_children = doc.value("min_children", 2);
        spec.topology = HierarchySpec::build(defs, min_children);
      }
    }
    if (doc.contains("leaf_process"))
      spec.leaf_process = leaf_process_from_string(doc.at("leaf_process").get<std::string>());
    if (doc.contains("kernel")) {
      const auto& k = doc.at("kernel");
      const auto kind = kernel_kind_from_string(k.value("kind", std::string("exponential")));
      if (k.contains("constant"))
        spec.kernel = KernelSpec{kind, k.at("constant").get<double>()};
      else
        spec.kernel = KernelSpec::normalized(kind, k.value("norm", 0.5));
    }
    if (doc.contains("n_obs")) spec.n_obs = doc.at("n_obs").get<Index>();
    if (doc.contains("grid_points")) spec.grid_points = doc.at("grid_points").get<Index>();
    if (doc.contains("t0")) spec.t0 = doc.at("t0").get<double>();
    if (doc.contains("t1")) spec.t1 = doc.at("t1").get<double>();
    if (doc.contains("error_scale")) spec.error_scale = doc.at("error_scale").get<double>();
    if (doc.contains("wiener_leaf_scale"))
      spec.wiener_leaf_scale = doc.at("wiener_leaf_scale").get<double>();
    if (doc.contains("contamination")) spec.contamination = doc.at("contamination").get<double>();
    if (doc.contains("burn_in")) spec.burn_in = doc.at("burn_in").get<Index>();
    if (doc.contains("replications")) spec.replications = doc.at("replications").get<Index>();
    if (doc.contains("allow_nonstationary"))
      spec.allow_nonstationary = doc.at("allow_nonstationary").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
  if (spec.n_obs < 2) throw ConfigError("simulation spec: n_obs must be at least 2");
  if (spec.grid_points < 2) throw ConfigError("simulation spec: grid_points must be at least 2");
  if (spec.contamination < 0.0 || spec.contamination > 1.0)
    throw ConfigError("simulation spec: contamination must lie in [0, 1]");
  return spec;
}

}  // namespace hfts

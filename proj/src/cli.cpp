#include "hfts/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hfts/evaluate.hpp"
#include "hfts/io.hpp"

namespace hfts::cli {

namespace {

std::uint64_t env_seed() {
  if (const char* env = std::getenv("HFTS_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("HFTS_SEED is not an unsigned integer: '") + env + "'");
    }
  }
  return 42;
}

struct Overrides {
  std::optional<Index> window;
  std::optional<std::string> depth;
  std::optional<std::string> method;

  ForecastConfig apply(const RunParams& params) const {
    ForecastConfig cfg;
    cfg.window = window.value_or(params.window);
    cfg.depth = depth ? depth_kind_from_string(*depth) : params.depth;
    cfg.method = method ? method_from_string(*method) : params.method;
    if (cfg.window < 1) throw ConfigError("window length must be positive");
    return cfg;
  }
};

std::vector<std::string> forecast_header(const Grid<double>& grid) {
  std::vector<std::string> header{"node"};
  for (Index j = 0; j < grid.size(); ++j) header.push_back(detail::format_double(grid[j]));
  return header;
}

int cmd_simulate(const std::string& spec_path, std::uint64_t seed, const std::string& out_dir) {
  SimulationSpec spec;
  if (!spec_path.empty()) spec = load_simulation_spec(spec_path);
  const auto sim = build_hierarchy_dataset<double>(spec, seed);
  RunParams params;
  params.seed = seed;
  params.grid_points = spec.grid_points;
  params.t0 = spec.t0;
  params.t1 = spec.t1;
  params.min_children = 1;  // reload anything we can generate
  write_hierarchy_dataset(out_dir, sim.data, params, sim.planted);
  std::cout << "wrote " << sim.data.spec().node_count() << " node series (" << sim.data.length()
            << " x " << sim.data.grid().size() << ") to " << out_dir << "\n";
  return 0;
}

int cmd_forecast(const std::string& config_path, const Overrides& over, Index n,
                 const std::string& out_path) {
  const auto loaded = load_hierarchy<double>(config_path);
  const ForecastConfig cfg = over.apply(loaded.params);
  const Index at = n > 0 ? n : loaded.data.length();
  const auto forecasts = hierarchical_forecast(loaded.data, at, cfg);
  const HierarchySpec& spec = loaded.data.spec();

  std::string text;
  const auto header = forecast_header(loaded.data.grid());
  for (std::size_t j = 0; j < header.size(); ++j) text += (j ? "," : "") + header[j];
  text += '\n';
  for (int v = 0; v < spec.node_count(); ++v) {
    text += spec.id(v);
    for (Index j = 0; j < forecasts[static_cast<std::size_t>(v)].size(); ++j)
      text += "," + detail::format_double(forecasts[static_cast<std::size_t>(v)][j]);
    text += '\n';
  }
  atomic_write_text(out_path, text);
  std::cout << "forecast for index " << (at + 1) << " at " << spec.node_count()
            << " nodes -> " << out_path << "\n";
  return 0;
}

int cmd_backtest(const std::string& config_path, const Overrides& over,
                 const std::string& out_path, const std::string& errors_dir) {
  const auto loaded = load_hierarchy<double>(config_path);
  const ForecastConfig cfg = over.apply(loaded.params);
  const auto occasions = rolling_backtest(loaded.data, cfg);
  const auto report = level_report(loaded.data.spec(), loaded.data.grid(), occasions);

  std::string text = "kind,name,level,mafe,mad\n";
  for (const auto& row : report.nodes)
    text += "node," + row.id + "," + std::to_string(row.depth) + "," +
            detail::format_double(row.mafe) + "," + detail::format_double(row.mad) + "\n";
  for (const auto& row : report.levels)
    text += "level," + row.label + "," + std::to_string(row.depth) + "," +
            detail::format_double(row.mafe) + ",\n";
  atomic_write_text(out_path, text);

  if (!errors_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(errors_dir, ec);
    for (int v = 0; v < loaded.data.spec().node_count(); ++v)
      write_csv_matrix(std::filesystem::path(errors_dir) /
                           (loaded.data.spec().id(v) + "_errors.csv"),
                       report.errors[static_cast<std::size_t>(v)]);
  }
  std::cout << occasions.size() << " forecast occasions (window " << cfg.window << ", "
            << to_string(cfg.depth) << ", " << to_string(cfg.method) << ")\n";
  for (const auto& row : report.levels)
    std::cout << "  " << row.label << ": mafe " << row.mafe << "\n";
  std::cout << "report -> " << out_path << "\n";
  return 0;
}

int cmd_diagnose(const std::string& config_path, const std::string& node, const std::string& what,
                 const Overrides& over, double fence, std::vector<double> alphas,
                 const std::string& out_path) {
  const auto loaded = load_hierarchy<double>(config_path);
  const DepthKind kind = over.depth ? depth_kind_from_string(*over.depth) : loaded.params.depth;
  const auto& series = loaded.data.series(node);
  std::string text;

  if (what == "boxplot") {
    const auto box = functional_boxplot(series, kind, fence);
    text = "t,lower,median,upper,fence_lo,fence_hi\n";
    for (Index j = 0; j < series.grid_size(); ++j)
      text += detail::format_double(series.grid()[j]) + "," +
              detail::format_double(box.lower[j]) + "," + detail::format_double(box.median[j]) +
              "," + detail::format_double(box.upper[j]) + "," +
              detail::format_double(box.fence_lower[j]) + "," +
              detail::format_double(box.fence_upper[j]) + "\n";
    std::cout << "magnitude outliers (" << box.outliers.size() << "):";
    for (const Index i : box.outliers) std::cout << " " << i;
    std::cout << "\n";
  } else if (what == "outliergram") {
    const auto gram = outliergram(series);
    text = "index,MEI,MBD,d,flagged\n";
    std::vector<bool> flagged(static_cast<std::size_t>(series.size()), false);
    for (const Index i : gram.flagged) flagged[static_cast<std::size_t>(i)] = true;
    for (Index i = 0; i < series.size(); ++i)
      text += std::to_string(i) + "," + detail::format_double(gram.mei[i]) + "," +
              detail::format_double(gram.mbd[i]) + "," + detail::format_double(gram.excess[i]) +
              "," + (flagged[static_cast<std::size_t>(i)] ? "1" : "0") + "\n";
    std::cout << "shape outliers (" << gram.flagged.size() << "):";
    for (const Index i : gram.flagged) std::cout << " " << i;
    std::cout << "\n";
  } else if (what == "scale") {
    if (alphas.empty())
      for (int i = 1; i <= 20; ++i) alphas.push_back(0.05 * i);
    const auto curve = scale_curve(series, kind, alphas);
    text = "alpha,volume\n";
    for (const auto& [alpha, volume] : curve.points)
      text += detail::format_double(alpha) + "," + detail::format_double(volume) + "\n";
  } else {
    throw ConfigError("unknown diagnostic '" + what +
                      "' (expected boxplot, outliergram, or scale)");
  }
  atomic_write_text(out_path, text);
  std::cout << what << " for node '" << node << "' -> " << out_path << "\n";
  return 0;
}

int cmd_bench(Index n, Index m, std::uint64_t seed) {
  if (n < 2 || m < 2) throw ConfigError("bench: need n >= 2 and m >= 2");
  Rng rng(substream(seed, "bench"));
  Matrix<double> values(n, m);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j) values(i, j) = rng.normal();
  const FunctionalSample<double> sample(Grid<double>::uniform(m), values);

  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto fast = depths(sample, DepthKind::MBD);
  const auto t1 = clock::now();
  const auto slow = depths_oracle(sample, DepthKind::MBD);
  const auto t2 = clock::now();

  const double fast_s = std::chrono::duration<double>(t1 - t0).count();
  const double slow_s = std::chrono::duration<double>(t2 - t1).count();
  const double max_diff = (fast - slow).cwiseAbs().maxCoeff();
  std::printf("mbd optimized: %.6f s\n", fast_s);
  std::printf("mbd oracle:    %.6f s\n", slow_s);
  std::printf("speedup:       %.2fx\n", fast_s > 0 ? slow_s / fast_s : 0.0);
  std::printf("max |optimized - oracle| = %.3e\n", max_diff);
  if (max_diff > 1e-12) throw NumericError("bench: optimized and oracle depths disagree");
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Robust forecasting and diagnostics for hierarchical functional time series"};
  app.require_subcommand(1);

  std::string spec_path, config_path, out_path, errors_dir, node, what = "boxplot";
  std::uint64_t seed = 0;
  bool seed_given = false;
  Overrides over;
  Index window = 0, n_index = 0, bench_n = 100, bench_m = 100;
  std::string depth_str, method_str;
  double fence = 1.5;
  std::vector<double> alphas;

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic hierarchy dataset");
  simulate->add_option("--spec", spec_path, "Simulation spec JSON (defaults to the built-in spec)");
  simulate->add_option("--seed", seed, "RNG seed (default: HFTS_SEED or 42)")
      ->each([&](const std::string&) { seed_given = true; });
  simulate->add_option("--out", out_path, "Output directory")->required();

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--k", window, "Moving-window length");
    cmd->add_option("--depth", depth_str, "Depth kind: mbd or gbd");
    cmd->add_option("--method", method_str, "aggregated-median or moving-mean");
  };

  auto* forecast = app.add_subcommand("forecast", "One-step forecast at every node");
  forecast->add_option("--config", config_path, "Hierarchy config JSON")->required();
  forecast->add_option("--n", n_index, "Last observation index used (default: series end)");
  add_overrides(forecast);
  forecast->add_option("--out", out_path, "Output CSV")->required();

  auto* backtest = app.add_subcommand("backtest", "Rolling one-step evaluation with a report");
  backtest->add_option("--config", config_path, "Hierarchy config JSON")->required();
  add_overrides(backtest);
  backtest->add_option("--out", out_path, "Report CSV")->required();
  backtest->add_option("--errors-out", errors_dir, "Directory for per-node error-curve CSVs");

  auto* diagnose = app.add_subcommand("diagnose", "Boxplot, outliergram, or scale-curve export");
  diagnose->add_option("--config", config_path, "Hierarchy config JSON")->required();
  diagnose->add_option("--node", node, "Node id")->required();
  diagnose->add_option("--what", what, "boxplot, outliergram, or scale");
  diagnose->add_option("--depth", depth_str, "Depth kind: mbd or gbd");
  diagnose->add_option("--fence", fence, "Boxplot fence factor (default 1.5)");
  diagnose->add_option("--alphas", alphas, "Scale-curve alpha values")->delimiter(',');
  diagnose->add_option("--out", out_path, "Output CSV")->required();

  auto* bench = app.add_subcommand("bench", "Time the optimized depth against the oracle");
  bench->add_option("--n", bench_n, "Sample size");
  bench->add_option("--m", bench_m, "Grid points");
  bench->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_given = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (window > 0) over.window = window;
    if (!depth_str.empty()) over.depth = depth_str;
    if (!method_str.empty()) over.method = method_str;
    if (!seed_given) seed = env_seed();

    if (simulate->parsed()) return cmd_simulate(spec_path, seed, out_path);
    if (forecast->parsed()) return cmd_forecast(config_path, over, n_index, out_path);
    if (backtest->parsed()) return cmd_backtest(config_path, over, out_path, errors_dir);
    if (diagnose->parsed())
      return cmd_diagnose(config_path, node, what, over, fence, alphas, out_path);
    if (bench->parsed()) return cmd_bench(bench_n, bench_m, seed);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "hfts: config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "hfts: data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "hfts: numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "hfts: error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"hfts"};
  for (const auto& arg : args) argv.push_back(arg.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace hfts::cli

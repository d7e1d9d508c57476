#include "radloc/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radloc/bench.hpp"
#include "radloc/config.hpp"
#include "radloc/errors.hpp"
#include "radloc/random.hpp"

namespace radloc {

namespace {

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string config;
  std::string out;
  std::string dataset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::size_t pair = 0;
  std::string method = "dcloc";
  bool no_compensation = false;
  bool no_uncertainty = false;
};

RunConfig resolve_config(const Options& opt, bool required) {
  RunConfig config;
  if (!opt.config.empty()) {
    config = load_run_config(opt.config);
  } else if (required) {
    throw ConfigError("--config is required");
  }
  if (opt.seed) override_seed(config, *opt.seed);
  if (opt.jobs) config.bench.jobs = *opt.jobs;
  return config;
}

void write_report(const std::filesystem::path& dir, const std::string& name,
                  const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / name, text);
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt, true);
  config.dataset.validate();
  const DatasetManifest manifest = generate_dataset(config.dataset, opt.out);
  out << json{{"dataset", opt.out}, {"pairs", manifest.pairs.size()}}.dump() << "\n";
  return 0;
}

Method localize_method(const Options& opt) {
  Method method = parse_method(opt.method);
  if (!opt.no_compensation && !opt.no_uncertainty) return method;
  if (method == Method::icp || method == Method::ndt || method == Method::egomotion) {
    throw ConfigError("--no-compensation/--no-uncertainty apply to dcloc methods only");
  }
  const MethodFlags flags = method_flags(method);
  return pipeline_arm(flags.uncertainty && !opt.no_uncertainty,
                      flags.compensation && !opt.no_compensation);
}

int cmd_localize(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt, false);
  const Method method = localize_method(opt);
  const Dataset dataset = load_dataset(opt.dataset);
  const LoopPair* pair = nullptr;
  for (const LoopPair& p : dataset.manifest.pairs) {
    if (p.id == opt.pair) pair = &p;
  }
  if (pair == nullptr) throw ConfigError("dataset has no pair " + std::to_string(opt.pair));

  PipelineConfig pipeline = config.bench.pipeline;
  pipeline.ransac.seed = derive_seed(config.bench.seed, {pair->id});
  const RegistrationResult result = localize(dataset.posed_scans(pair->current),
                                             dataset.posed_scans(pair->previous), method, pipeline);
  json j = registration_to_json(result);
  j["method"] = method_name(method);
  j["pair"] = pair->id;
  out << j.dump() << "\n";
  return 0;
}

int cmd_bench(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt, false);
  const Dataset dataset = load_dataset(opt.dataset);
  const BenchReport report = run_benchmark(dataset, config.bench.methods, config.bench);
  const std::filesystem::path dir(opt.out);
  write_report(dir, "pairs.csv", pairs_csv(report.results));
  if (!report.summary) throw AllOutliers("no pair is an inlier for every method");
  write_report(dir, "summary.csv", summary_csv(*report.summary));
  write_report(dir, "bins.csv", bins_csv(report.bins));
  out << summary_csv(*report.summary);
  return 0;
}

int cmd_ablate(const Options& opt, std::ostream& out) {
  const RunConfig config = resolve_config(opt, false);
  const Dataset dataset = load_dataset(opt.dataset);
  const AblationReport report = run_ablation(dataset, config.bench);
  const std::filesystem::path dir(opt.out);
  write_report(dir, "pairs.csv", pairs_csv(report.bench.results));
  write_report(dir, "ablation.csv", ablation_csv(report));
  out << ablation_csv(report);
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radar metric localization with Doppler compensation", "radloc"};
  app.require_subcommand(1);
  Options opt;

  auto add_seed_jobs = [&](CLI::App* cmd) {
    cmd->add_option("--seed", opt.seed, "Overrides every seed in the config");
    cmd->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset");
  simulate->add_option("--config", opt.config, "Run config JSON")->required();
  simulate->add_option("--out", opt.out, "Dataset directory")->required();
  simulate->add_option("--seed", opt.seed, "Overrides every seed in the config");

  CLI::App* loc = app.add_subcommand("localize", "Localize one loop pair");
  loc->add_option("--dataset", opt.dataset, "Dataset directory")->required();
  loc->add_option("--pair", opt.pair, "Pair id from the manifest")->required();
  loc->add_option("--method", opt.method, "dcloc, dcloc_no_dc, dcloc_no_ue, dcloc_neither, icp, "
                                          "ndt or egomotion");
  loc->add_flag("--no-compensation", opt.no_compensation, "Disable Doppler compensation");
  loc->add_flag("--no-uncertainty", opt.no_uncertainty, "Disable uncertainty weighting");
  loc->add_option("--config", opt.config, "Run config JSON");
  loc->add_option("--seed", opt.seed, "Overrides every seed in the config");

  CLI::App* bench = app.add_subcommand("bench", "Benchmark methods over a dataset");
  CLI::App* ablate = app.add_subcommand("ablate", "Run the four compensation/uncertainty arms");
  for (CLI::App* cmd : {bench, ablate}) {
    cmd->add_option("--dataset", opt.dataset, "Dataset directory")->required();
    cmd->add_option("--config", opt.config, "Run config JSON");
    cmd->add_option("--out", opt.out, "Report directory")->required();
    add_seed_jobs(cmd);
  }

  CLI::App* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt, out);
    if (loc->parsed()) return cmd_localize(opt, out);
    if (bench->parsed()) return cmd_bench(opt, out);
    if (ablate->parsed()) return cmd_ablate(opt, out);
    if (version->parsed()) {
      out << "radloc " << kVersion << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    if (loc->parsed()) err << loc->help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace radloc

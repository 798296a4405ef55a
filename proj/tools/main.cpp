#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ampkit/experiment.hpp"
#include "bundled_configs.hpp"

namespace {

struct ResolvedConfig {
  std::string label;
  std::string text;
};

std::optional<ResolvedConfig> resolve_config(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg) && fs::is_regular_file(arg)) {
    std::ifstream in(arg, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return ResolvedConfig{arg, buf.str()};
  }
  std::string name = arg;
  if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
    name = name.substr(0, name.size() - 5);
  }
  for (const auto& [bundled_name, text] : bundled_configs()) {
    if (bundled_name == name) {
      return ResolvedConfig{std::string(bundled_name) + " (bundled)", std::string(text)};
    }
  }
  return std::nullopt;
}

std::string default_out_dir() {
  if (const char* env = std::getenv("AMPKIT_OUT_DIR")) return env;
  return ".";
}

std::string summarize(const ampkit::ExperimentConfig& cfg) {
  std::ostringstream out;
  out << cfg.name << ": ";
  const auto& m0 = cfg.matrices.front();
  out << (m0.kind == ampkit::MatrixKind::Conditioned ? "conditioned" : "iid") << " "
      << m0.m << "x" << m0.n;
  if (cfg.matrices.size() > 1) out << " (+" << cfg.matrices.size() - 1 << " sweeps)";
  out << ", snr";
  for (double s : cfg.snr_db) out << " " << s;
  out << " dB, solvers";
  for (const auto& s : cfg.solvers) out << " " << ampkit::algorithm_name(s.cfg.algorithm);
  out << ", " << cfg.trials << " trials";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMP-family signal recovery experiment harness"};
  app.require_subcommand(1);

  std::string config_arg;
  std::string out_dir = default_out_dir();
  int trials_override = -1;
  std::int64_t seed_override = -1;
  bool linear_average = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("config", config_arg, "config path or bundled name")->required();
  run->add_option("--out-dir", out_dir, "output directory (default $AMPKIT_OUT_DIR or .)");
  run->add_option("--trials-override", trials_override, "override trial count");
  run->add_option("--seed-override", seed_override, "override master seed");
  run->add_flag("--linear-average", linear_average,
                "average per-trial NMSE in linear units instead of dB");

  CLI::App* validate = app.add_subcommand("validate", "check a config without running");
  validate->add_option("config", config_arg, "config path or bundled name")->required();

  app.add_subcommand("list", "list bundled experiment configs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("list")) {
      for (const auto& [name, text] : bundled_configs()) {
        std::cout << summarize(ampkit::parse_config(std::string(text))) << "\n";
      }
      return 0;
    }

    const auto resolved = resolve_config(config_arg);
    if (!resolved) {
      std::cerr << "error: config '" << config_arg
                << "' is neither a file nor a bundled name (see 'list')\n";
      return 1;
    }
    const ampkit::ExperimentConfig cfg = ampkit::parse_config(resolved->text);

    if (app.got_subcommand("validate")) {
      const auto issues = ampkit::validate_config(cfg);
      if (issues.empty()) {
        std::cout << resolved->label << ": OK\n";
        return 0;
      }
      std::cerr << resolved->label << ": " << issues.size() << " violation(s)\n";
      for (const auto& s : issues) std::cerr << "  - " << s << "\n";
      return 1;
    }

    ampkit::RunOptions opts;
    opts.out_dir = out_dir;
    if (trials_override >= 0) opts.trials_override = trials_override;
    if (seed_override >= 0) opts.seed_override = static_cast<std::uint64_t>(seed_override);
    opts.linear_average = linear_average;
    const ampkit::RunResult result = ampkit::run_experiment(cfg, opts);
    for (const auto& f : result.files_written) std::cout << "wrote " << f << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

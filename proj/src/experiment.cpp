#include "ampkit/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "ampkit/diag.hpp"
#include "ampkit/rng.hpp"
#include "ampkit/se.hpp"

namespace ampkit {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double get_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail(where + "." + it.key(), "unknown field");
  }
}

MatrixSpec parse_matrix(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  check_keys(j, where, {"kind", "m", "n", "kappa", "seed"});
  MatrixSpec spec;
  if (!j.contains("kind")) fail(where + ".kind", "missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "iid_gaussian") {
    spec.kind = MatrixKind::IidGaussian;
  } else if (kind == "conditioned") {
    spec.kind = MatrixKind::Conditioned;
  } else {
    fail(where + ".kind", "must be 'iid_gaussian' or 'conditioned'");
  }
  spec.m = get_int(j.at("m"), where + ".m");
  spec.n = get_int(j.at("n"), where + ".n");
  if (j.contains("kappa")) spec.kappa = get_number(j.at("kappa"), where + ".kappa");
  if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
  return spec;
}

PriorSpec parse_prior(const json& j) {
  if (!j.is_object()) fail("prior", "expected an object");
  if (!j.contains("kind")) fail("prior.kind", "missing");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli_gaussian") {
    check_keys(j, "prior", {"kind", "mu", "rho"});
    return PriorSpec::bernoulli_gaussian(get_number(j.value("mu", json(0.0)), "prior.mu"),
                                         get_number(j.at("rho"), "prior.rho"));
  }
  if (kind == "discrete") {
    check_keys(j, "prior", {"kind", "levels", "probs"});
    return PriorSpec::discrete(j.at("levels").get<std::vector<double>>(),
                               j.at("probs").get<std::vector<double>>());
  }
  if (kind == "qpsk") {
    check_keys(j, "prior", {"kind"});
    return PriorSpec::qpsk();
  }
  if (kind == "laplace_lasso") {
    check_keys(j, "prior", {"kind", "lambda"});
    return PriorSpec::laplace_lasso(get_number(j.at("lambda"), "prior.lambda"));
  }
  fail("prior.kind", "unknown prior kind '" + kind + "'");
}

SolverEntry parse_solver(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  check_keys(j, where,
             {"algorithm", "max_iters", "step_size", "lambda", "damping", "stop_tol",
              "w_choice"});
  SolverEntry entry;
  if (!j.contains("algorithm")) fail(where + ".algorithm", "missing");
  const std::string a = j.at("algorithm").get<std::string>();
  if (a == "ista") entry.cfg.algorithm = Algorithm::Ista;
  else if (a == "fista") entry.cfg.algorithm = Algorithm::Fista;
  else if (a == "amp" || a == "amp_lasso") entry.cfg.algorithm = Algorithm::AmpLasso;
  else if (a == "bayes_amp") entry.cfg.algorithm = Algorithm::BayesAmp;
  else if (a == "oamp") entry.cfg.algorithm = Algorithm::Oamp;
  else if (a == "vamp") entry.cfg.algorithm = Algorithm::Vamp;
  else if (a == "mamp") entry.cfg.algorithm = Algorithm::Mamp;
  else fail(where + ".algorithm", "unknown algorithm '" + a + "'");

  if (j.contains("max_iters")) entry.cfg.max_iters = get_int(j.at("max_iters"), where + ".max_iters");
  if (j.contains("step_size")) entry.cfg.step_size = get_number(j.at("step_size"), where + ".step_size");
  if (j.contains("lambda")) entry.cfg.lambda = get_number(j.at("lambda"), where + ".lambda");
  if (j.contains("stop_tol")) entry.cfg.stop_tol = get_number(j.at("stop_tol"), where + ".stop_tol");
  if (j.contains("w_choice")) {
    const std::string w = j.at("w_choice").get<std::string>();
    if (w == "mf") entry.cfg.w_choice = WChoice::MF;
    else if (w == "pinv") entry.cfg.w_choice = WChoice::PseudoInverse;
    else if (w == "lmmse") entry.cfg.w_choice = WChoice::Lmmse;
    else fail(where + ".w_choice", "must be 'mf', 'pinv' or 'lmmse'");
  }
  if (j.contains("damping")) {
    const json& d = j.at("damping");
    if (d.is_array()) {
      if (d.size() != 2) fail(where + ".damping", "expected [beta1, beta2]");
      entry.cfg.damping1 = get_number(d[0], where + ".damping[0]");
      entry.cfg.damping2 = get_number(d[1], where + ".damping[1]");
    } else if (d.is_object()) {
      for (auto it = d.begin(); it != d.end(); ++it) {
        const double kappa = std::stod(it.key());
        if (!it.value().is_array() || it.value().size() != 2) {
          fail(where + ".damping." + it.key(), "expected [beta1, beta2]");
        }
        entry.damping_by_kappa[kappa] = {it.value()[0].get<double>(),
                                         it.value()[1].get<double>()};
      }
    } else {
      fail(where + ".damping", "expected an array or per-kappa object");
    }
  }
  return entry;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");
  check_keys(j, "config",
             {"name", "matrix", "prior", "snr_db", "solvers", "trials", "master_seed",
              "emit", "gaussianity_iteration", "se_mc_samples", "linear_average",
              "snr_convention"});

  ExperimentConfig cfg;
  if (!j.contains("name")) fail("name", "missing");
  cfg.name = j.at("name").get<std::string>();

  if (!j.contains("matrix")) fail("matrix", "missing");
  if (j.at("matrix").is_array()) {
    int k = 0;
    for (const auto& mj : j.at("matrix")) {
      cfg.matrices.push_back(parse_matrix(mj, "matrix[" + std::to_string(k++) + "]"));
    }
  } else {
    cfg.matrices.push_back(parse_matrix(j.at("matrix"), "matrix"));
  }

  if (!j.contains("prior")) fail("prior", "missing");
  cfg.prior = parse_prior(j.at("prior"));

  if (!j.contains("snr_db")) fail("snr_db", "missing");
  if (j.at("snr_db").is_array()) {
    cfg.snr_db = j.at("snr_db").get<std::vector<double>>();
  } else {
    cfg.snr_db.push_back(get_number(j.at("snr_db"), "snr_db"));
  }

  if (!j.contains("solvers") || !j.at("solvers").is_array()) fail("solvers", "missing list");
  int k = 0;
  for (const auto& sj : j.at("solvers")) {
    cfg.solvers.push_back(parse_solver(sj, "solvers[" + std::to_string(k++) + "]"));
  }

  if (j.contains("trials")) cfg.trials = get_int(j.at("trials"), "trials");
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("emit")) {
    for (const auto& e : j.at("emit")) {
      const std::string s = e.get<std::string>();
      if (s == "trace_csv") cfg.emit_trace = true;
      else if (s == "se_csv") cfg.emit_se = true;
      else if (s == "diag_json") cfg.emit_diag = true;
      else fail("emit", "unknown target '" + s + "'");
    }
  }
  if (j.contains("gaussianity_iteration")) {
    cfg.gaussianity_iteration = get_int(j.at("gaussianity_iteration"), "gaussianity_iteration");
  }
  if (j.contains("se_mc_samples")) cfg.se_mc_samples = get_int(j.at("se_mc_samples"), "se_mc_samples");
  if (j.contains("linear_average")) cfg.linear_average = j.at("linear_average").get<bool>();
  if (j.contains("snr_convention")) {
    const std::string c = j.at("snr_convention").get<std::string>();
    if (c == "per_complex_symbol") cfg.complex_symbol_snr = true;
    else if (c != "per_real_dim") fail("snr_convention", "unknown convention '" + c + "'");
  }
  return cfg;
}

std::vector<std::string> validate_config(const ExperimentConfig& cfg) {
  std::vector<std::string> issues;
  auto add = [&](const std::string& s) { issues.push_back(s); };

  if (cfg.name.empty()) add("name must be non-empty");
  if (cfg.trials < 1) add("trials must be >= 1 (trials >= 1)");
  if (!cfg.emit_trace && !cfg.emit_se && !cfg.emit_diag) add("at least one emit target required");
  if (cfg.snr_db.empty()) add("snr_db must list at least one value");
  if (cfg.matrices.empty()) add("matrix list must be non-empty");
  if (cfg.solvers.empty()) add("solvers list must be non-empty");
  if (cfg.se_mc_samples < 2) add("se_mc_samples must be >= 2");
  if (cfg.gaussianity_iteration < 0) add("gaussianity_iteration must be >= 0");

  for (std::size_t i = 0; i < cfg.matrices.size(); ++i) {
    const MatrixSpec& m = cfg.matrices[i];
    const std::string where = "matrix[" + std::to_string(i) + "]";
    if (m.m < 1 || m.n < 1) add(where + ": dimensions must be >= 1");
    if (m.kind == MatrixKind::Conditioned) {
      if (m.kappa < 1.0) add(where + ": kappa must be >= 1");
      if (m.m > m.n) add(where + ": conditioned matrices require m <= n");
    }
  }

  if (!cfg.prior.samplable()) {
    add("prior is not samplable; instances cannot be synthesized");
  }
  for (std::size_t i = 0; i < cfg.solvers.size(); ++i) {
    const SolverEntry& s = cfg.solvers[i];
    const std::string where = "solvers[" + std::to_string(i) + "]";
    if (s.cfg.max_iters < 1) add(where + ": max_iters must be >= 1");
    if (s.cfg.stop_tol < 0.0) add(where + ": stop_tol must be >= 0");
    const Algorithm a = s.cfg.algorithm;
    if (a == Algorithm::Ista || a == Algorithm::Fista) {
      if (!(s.cfg.step_size > 0.0 && s.cfg.step_size <= 1.0)) {
        add(where + ": step_size must be in (0, 1]");
      }
    }
    if (a == Algorithm::Ista || a == Algorithm::Fista || a == Algorithm::AmpLasso) {
      if (s.cfg.lambda < 0.0) add(where + ": lambda must be >= 0");
    }
    if (a == Algorithm::BayesAmp || a == Algorithm::Oamp || a == Algorithm::Vamp ||
        a == Algorithm::Mamp) {
      if (!cfg.prior.samplable()) {
        add(where + ": " + algorithm_name(a) + " is incompatible with a LaplaceLasso prior");
      }
    }
    if (a == Algorithm::Mamp) {
      auto check_beta = [&](double b, const char* tag) {
        if (!(b > 0.0 && b <= 1.0)) add(where + ": " + std::string(tag) + " must be in (0, 1]");
      };
      check_beta(s.cfg.damping1, "damping beta1");
      check_beta(s.cfg.damping2, "damping beta2");
      for (const auto& [kappa, betas] : s.damping_by_kappa) {
        check_beta(betas.first, "damping beta1");
        check_beta(betas.second, "damping beta2");
        bool found = false;
        for (const auto& m : cfg.matrices) {
          if (m.kind == MatrixKind::Conditioned && m.kappa == kappa) found = true;
        }
        if (!found) {
          add(where + ": damping key kappa=" + std::to_string(kappa) +
              " matches no conditioned matrix");
        }
      }
    }
  }
  return issues;
}

namespace {

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Per-trial, per-solver extraction kept after the trace is dropped.
struct SolverOutcome {
  std::vector<double> nmse_db;
  SolverStatus status = SolverStatus::Running;
  double ks_statistic = -1.0;  // <0 when not computed
  double ks_critical = 0.0;
  bool ks_pass = false;
  std::vector<std::pair<double, double>> qq;  // kept for trial 0 only
};

struct GroupKey {
  std::size_t matrix_idx;
  std::size_t snr_idx;
};

SolverConfig resolve_solver_cfg(const SolverEntry& entry, const MatrixSpec& mspec) {
  SolverConfig cfg = entry.cfg;
  if (!entry.damping_by_kappa.empty() && mspec.kind == MatrixKind::Conditioned) {
    const auto it = entry.damping_by_kappa.find(mspec.kappa);
    if (it != entry.damping_by_kappa.end()) {
      cfg.damping1 = it->second.first;
      cfg.damping2 = it->second.second;
    }
  }
  return cfg;
}

SolverTrace dispatch_solver(const SolverConfig& cfg, const ProblemInstance& inst,
                            const PriorSpec& prior) {
  switch (cfg.algorithm) {
    case Algorithm::Ista: return run_ista(inst, cfg);
    case Algorithm::Fista: return run_fista(inst, cfg);
    case Algorithm::AmpLasso: return run_amp_lasso(inst, cfg);
    case Algorithm::BayesAmp: return run_bayes_amp(inst, cfg, prior);
    case Algorithm::Oamp: return run_oamp(inst, cfg, prior);
    case Algorithm::Vamp: return run_vamp(inst, cfg, prior);
    case Algorithm::Mamp: {
      const SpectralModel spectral = build_spectral_model(inst.H, 2 * cfg.max_iters);
      return run_mamp(inst, cfg, prior, spectral);
    }
  }
  throw std::invalid_argument("dispatch_solver: unknown algorithm");
}

// Averages per-trial dB curves. Converged/budget-exhausted trials hold their
// last value (the fixed point); a Diverged trial truncates the column at its
// last finite row, and the column ends at the earliest such truncation.
std::vector<double> average_curves(const std::vector<SolverOutcome>& outcomes,
                                   int target_len, bool linear) {
  int len = target_len;
  for (const auto& o : outcomes) {
    if (o.status == SolverStatus::Diverged) {
      len = std::min(len, static_cast<int>(o.nmse_db.size()) - 1);
    }
  }
  len = std::max(len, 0);
  std::vector<double> avg(len, 0.0);
  for (int i = 0; i < len; ++i) {
    double acc = 0.0;
    for (const auto& o : outcomes) {
      const double v =
          (i < static_cast<int>(o.nmse_db.size())) ? o.nmse_db[i] : o.nmse_db.back();
      acc += linear ? std::pow(10.0, v / 10.0) : v;
    }
    acc /= static_cast<double>(outcomes.size());
    avg[i] = linear ? to_db(acc) : acc;
  }
  return avg;
}

void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

std::string render_csv(const std::vector<std::string>& names,
                       const std::vector<std::vector<double>>& columns) {
  std::size_t rows = 0;
  for (const auto& c : columns) rows = std::max(rows, c.size());
  std::ostringstream out;
  out << "iter";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  char buf[40];
  for (std::size_t i = 0; i < rows; ++i) {
    out << (i + 1);
    for (const auto& c : columns) {
      out << ',';
      if (i < c.size()) {
        std::snprintf(buf, sizeof(buf), "%.6f", c[i]);
        out << buf;
      }
    }
    out << '\n';
  }
  return out.str();
}

const char* status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Running: return "running";
    case SolverStatus::Converged: return "converged";
    case SolverStatus::Diverged: return "diverged";
  }
  return "?";
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg_in, const RunOptions& opts) {
  ExperimentConfig cfg = cfg_in;
  if (opts.trials_override) cfg.trials = *opts.trials_override;
  if (opts.seed_override) cfg.master_seed = *opts.seed_override;
  const bool linear = cfg.linear_average || opts.linear_average;

  {
    const auto issues = validate_config(cfg);
    if (!issues.empty()) {
      std::string msg = "invalid config:";
      for (const auto& s : issues) msg += "\n  - " + s;
      throw ConfigError(msg);
    }
  }

  const double snr_offset = cfg.complex_symbol_snr ? 10.0 * std::log10(2.0) : 0.0;

  std::vector<GroupKey> groups;
  for (std::size_t mi = 0; mi < cfg.matrices.size(); ++mi) {
    for (std::size_t si = 0; si < cfg.snr_db.size(); ++si) groups.push_back({mi, si});
  }

  // Column label: solver name, plus kappa/alpha and SNR suffixes when swept.
  std::vector<std::string> bases(cfg.solvers.size());
  for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
    std::string base = algorithm_name(cfg.solvers[s].cfg.algorithm);
    int dup = 0;
    for (std::size_t p = 0; p < s; ++p) {
      if (bases[p].rfind(base, 0) == 0) ++dup;
    }
    bases[s] = dup ? base + "_" + std::to_string(dup + 1) : base;
  }
  auto column_name = [&](const GroupKey& g, std::size_t solver_idx) {
    std::string name = bases[solver_idx];
    if (cfg.matrices.size() > 1) {
      const MatrixSpec& m = cfg.matrices[g.matrix_idx];
      if (m.kind == MatrixKind::Conditioned) {
        name += "_k" + fmt_g(m.kappa);
      } else {
        name += "_a" + fmt_g(static_cast<double>(m.m) / static_cast<double>(m.n));
      }
    }
    if (cfg.snr_db.size() > 1) name += "_snr" + fmt_g(cfg.snr_db[g.snr_idx]);
    return name;
  };

  // outcomes[group][solver][trial]
  std::vector<std::vector<std::vector<SolverOutcome>>> outcomes(
      groups.size(), std::vector<std::vector<SolverOutcome>>(
                         cfg.solvers.size(), std::vector<SolverOutcome>(cfg.trials)));

  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const GroupKey& g = groups[gi];
    const MatrixSpec& mspec = cfg.matrices[g.matrix_idx];
    const double snr = cfg.snr_db[g.snr_idx];

    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int trial = next.fetch_add(1);
        if (trial >= cfg.trials) return;
        const ProblemInstance inst = synthesize(
            mspec, cfg.prior, snr + snr_offset,
            cfg.master_seed + static_cast<std::uint64_t>(trial));
        for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
          const SolverConfig scfg = resolve_solver_cfg(cfg.solvers[s], mspec);
          const SolverTrace trace = dispatch_solver(scfg, inst, cfg.prior);
          SolverOutcome& out = outcomes[gi][s][trial];
          out.nmse_db = trace.nmse_db;
          out.status = trace.status;
          const int git = cfg.gaussianity_iteration;
          if (git > 0 && git <= static_cast<int>(trace.inputs.size())) {
            const GaussianityReport rep = gaussianity(trace.inputs[git - 1] - inst.x);
            out.ks_statistic = rep.ks_statistic;
            out.ks_critical = rep.ks_critical_1pct;
            out.ks_pass = rep.passes_1pct();
            if (trial == 0) out.qq = rep.qq_points;
          }
        }
      }
    };
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>({hw, 8u, static_cast<unsigned>(cfg.trials)});
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::filesystem::create_directories(opts.out_dir);
  RunResult result;

  if (cfg.emit_trace) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
        names.push_back(column_name(groups[gi], s));
        columns.push_back(
            average_curves(outcomes[gi][s], cfg.solvers[s].cfg.max_iters, linear));
      }
    }
    const std::string path =
        (std::filesystem::path(opts.out_dir) / (cfg.name + "_trace.csv")).string();
    write_atomic(path, render_csv(names, columns));
    result.files_written.push_back(path);
  }

  if (cfg.emit_se) {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns;
    RandomStream se_rng = RandomStream(cfg.master_seed).substream("se");
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      const GroupKey& g = groups[gi];
      const MatrixSpec& mspec = cfg.matrices[g.matrix_idx];
      const double sigma_w2 = std::pow(10.0, -(cfg.snr_db[g.snr_idx] + snr_offset) / 10.0);
      const double alpha = static_cast<double>(mspec.m) / static_cast<double>(mspec.n);
      // SE uses the realized eigenvalues of the trial-0 matrix.
      std::optional<Eigen::MatrixXd> h0;
      auto matrix0 = [&]() -> const Eigen::MatrixXd& {
        if (!h0) {
          h0 = gen_matrix(mspec,
                          RandomStream(cfg.master_seed).substream("matrix").seed());
        }
        return *h0;
      };
      for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
        const SolverConfig scfg = resolve_solver_cfg(cfg.solvers[s], mspec);
        const int iters = scfg.max_iters;
        SeTrace se;
        switch (scfg.algorithm) {
          case Algorithm::BayesAmp:
            se = amp_se(cfg.prior, sigma_w2, alpha, iters);
            break;
          case Algorithm::Oamp:
          case Algorithm::Vamp:
            se = oamp_se(cfg.prior, sigma_w2, build_spectral_model(matrix0(), 0), iters);
            break;
          case Algorithm::Mamp:
            se = mamp_se(cfg.prior, sigma_w2, build_spectral_model(matrix0(), 2 * iters),
                         iters, cfg.se_mc_samples, se_rng.substream(column_name(g, s)).seed(),
                         scfg.damping1, scfg.damping2);
            break;
          default:
            continue;  // no state evolution for the LASSO solvers
        }
        names.push_back("se_" + column_name(g, s));
        columns.push_back(se.nmse_pred_db());
      }
    }
    const std::string path =
        (std::filesystem::path(opts.out_dir) / (cfg.name + "_se.csv")).string();
    write_atomic(path, render_csv(names, columns));
    result.files_written.push_back(path);
  }

  if (cfg.emit_diag) {
    json root;
    root["name"] = cfg.name;
    root["trials"] = cfg.trials;
    root["master_seed"] = cfg.master_seed;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      for (std::size_t s = 0; s < cfg.solvers.size(); ++s) {
        const std::string col = column_name(groups[gi], s);
        json entry;
        json statuses = json::array();
        json finals = json::array();
        for (const auto& o : outcomes[gi][s]) {
          statuses.push_back(status_name(o.status));
          finals.push_back(o.nmse_db.empty() ? json() : json(o.nmse_db.back()));
        }
        entry["status"] = statuses;
        entry["final_nmse_db"] = finals;
        if (cfg.gaussianity_iteration > 0) {
          json ks;
          ks["iteration"] = cfg.gaussianity_iteration;
          json stats = json::array();
          json passes = json::array();
          int pass_count = 0;
          double critical = 0.0;
          for (const auto& o : outcomes[gi][s]) {
            if (o.ks_statistic < 0.0) continue;
            stats.push_back(o.ks_statistic);
            passes.push_back(o.ks_pass);
            pass_count += o.ks_pass ? 1 : 0;
            critical = o.ks_critical;
          }
          ks["statistic"] = stats;
          ks["critical_1pct"] = critical;
          ks["pass"] = passes;
          ks["pass_count"] = pass_count;
          if (!outcomes[gi][s].empty() && !outcomes[gi][s][0].qq.empty()) {
            json qq = json::array();
            for (const auto& [t, e] : outcomes[gi][s][0].qq) qq.push_back({t, e});
            ks["qq_trial0"] = qq;
          }
          entry["gaussianity"] = ks;
        }
        root["columns"][col] = entry;
      }
    }
    const std::string path =
        (std::filesystem::path(opts.out_dir) / (cfg.name + "_diag.json")).string();
    write_atomic(path, root.dump(2) + "\n");
    result.files_written.push_back(path);
  }
  return result;
}

}  // namespace ampkit

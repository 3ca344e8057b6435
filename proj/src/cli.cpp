#include "sykq/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sykq/config_io.hpp"
#include "sykq/ensemble.hpp"
#include "sykq/observables.hpp"
#include "sykq/oracle.hpp"

namespace sykq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Options shared by every subcommand.  Semantics: simulate uses all three;
/// analysis commands use --out-dir as the destination for emitted files
/// (default: the run directory) and --threads/--seed where sampling or
/// parallel work occurs.
struct CommonOpts {
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::string out_dir;
  int threads = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "sampling seed override")
        ->each([this](const std::string&) { has_seed = true; });
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker count (0 = auto)");
  }
};

/// Load the run directory written by `simulate`: config from the manifest,
/// aggregate rebuilt from the records.
EnsembleData load_run(const std::string& run_dir) {
  fs::path manifest = fs::path(run_dir) / "manifest.json";
  std::ifstream is(manifest);
  if (!is) {
    throw ConfigError("no manifest.json under " + run_dir +
                      " (run `sykq simulate` first)");
  }
  json m;
  is >> m;
  RunConfig cfg = config_from_json(m.at("config"));
  cfg.out_dir = run_dir;
  EnsembleData data = aggregate_records(cfg);
  if (data.n() == 0) {
    throw std::runtime_error("run at " + run_dir + " has no usable records");
  }
  return data;
}

std::string series_file(const std::string& label) {
  std::string name = label;
  for (char& c : name) {
    if (c == ':') c = '_';
  }
  return name + ".csv";
}

/// Destination directory for analysis outputs and the path recorded in the
/// run manifest.
struct OutputSink {
  fs::path dir;
  fs::path run;
  std::vector<std::string> written;

  OutputSink(const std::string& run_dir, const std::string& out_dir)
      : dir(out_dir.empty() ? run_dir : out_dir), run(run_dir) {}

  fs::path path_for(const std::string& name) {
    fs::create_directories(dir);
    fs::path p = dir / name;
    written.push_back(dir == run ? name : p.string());
    return p;
  }
  void finish() { append_manifest_outputs(run, written); }
};

int cmd_simulate(const std::string& config_path, const CommonOpts& common,
                 std::ostream& out) {
  RunConfig cfg = parse_config(config_path);
  if (common.has_seed) cfg.base_seed = common.seed;
  if (!common.out_dir.empty()) cfg.out_dir = common.out_dir;
  if (common.threads > 0) cfg.threads = common.threads;
  if (cfg.out_dir.empty()) {
    throw ConfigError("an output directory is required (out_dir or --out-dir)");
  }
  EnsembleData data = run_ensemble(cfg);
  write_manifest(data, {});
  long failed = static_cast<long>(data.status.size()) - data.n();
  out << "simulate: " << data.n() << " realizations aggregated";
  if (failed > 0) out << " (" << failed << " failed, excluded)";
  out << "; mean bandwidth " << data.mean_bandwidth << "\n";
  out << "run directory: " << cfg.out_dir << "\n";
  return failed == 0 ? 0 : 1;
}

int cmd_susceptibility(const std::string& run_dir, const CommonOpts& common,
                       bool per_pair, std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  OutputSink sink(run_dir, common.out_dir);
  EnsembleSeries total = chi_total(data);
  write_series_csv(sink.path_for(series_file(total.label)), total);
  if (per_pair) {
    for (const auto& [i, j] : data.layout.pair_list) {
      EnsembleSeries s = chi_pair(data, i, j);
      write_series_csv(sink.path_for(series_file(s.label)), s);
    }
  }
  sink.finish();
  auto peak = refined_peak(total.times, total.mean);
  out << "chi_total(" << to_string(data.cfg.axis) << "): peak " << peak.value
      << " at t = " << peak.time << "; wrote " << sink.written.size()
      << " file(s)\n";
  return 0;
}

int cmd_peaks(const std::string& run_dir, const CommonOpts& common,
              std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  PeakMatrix pm = peak_matrix(data);
  OutputSink sink(run_dir, common.out_dir);
  std::string name = "peaks_" + to_string(pm.axis) + ".csv";
  write_peaks_csv(sink.path_for(name), pm);
  sink.finish();
  auto [bi, bj] = pm.argmax();
  out << "peak matrix (" << to_string(pm.axis) << "): CV "
      << pm.coefficient_of_variation() << ", argmax P(" << bi << "," << bj
      << ") = " << pm.at(bi, bj) << "; wrote " << name << "\n";
  return 0;
}

int cmd_return_amplitude(const std::string& run_dir, const CommonOpts& common,
                         std::vector<int> ks, std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  if (ks.empty()) ks = data.layout.sizes;
  if (ks.empty()) {
    throw ConfigError("this run measured no return-amplitude sizes");
  }
  OutputSink sink(run_dir, common.out_dir);
  for (int k : ks) {
    EnsembleSeries s = return_amplitude(data, k);
    write_series_csv(sink.path_for("ret_k" + std::to_string(k) + ".csv"), s);
  }
  sink.finish();
  out << "wrote " << sink.written.size() << " return-amplitude series\n";
  return 0;
}

int cmd_decay_rate(const std::string& run_dir, const CommonOpts& common,
                   std::vector<int> ks, std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  if (ks.empty()) ks = data.layout.sizes;
  if (ks.empty()) {
    throw ConfigError("this run measured no return-amplitude sizes");
  }
  OutputSink sink(run_dir, common.out_dir);
  for (int k : ks) {
    EnsembleSeries d = decay_rate(return_amplitude(data, k));
    write_series_csv(sink.path_for("decay_k" + std::to_string(k) + ".csv"), d);
  }
  sink.finish();
  out << "wrote " << sink.written.size() << " decay-rate series\n";
  return 0;
}

int cmd_saturation(const std::string& run_dir, const CommonOpts& common,
                   double threshold, std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  auto curve = saturation_curve(data);
  OutputSink sink(run_dir, common.out_dir);
  {
    std::ofstream os(sink.path_for("saturation.csv"), std::ios::trunc);
    os << "k_rel,R\n" << std::setprecision(17);
    for (const auto& [k_rel, r] : curve) os << k_rel << "," << r << "\n";
  }
  sink.finish();
  out << "saturating k_rel (R >= " << threshold
      << "): " << saturating_k_rel(curve, threshold) << "\n";
  return 0;
}

int cmd_chi1l(const std::string& run_dir, const CommonOpts& common,
              std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  Chi1LDiagnostic diag = chi_1L_diagnostic(data);
  OutputSink sink(run_dir, common.out_dir);
  write_series_csv(sink.path_for(series_file(diag.series.label)), diag.series);
  json summary{{"peak_height", diag.peak_height},
               {"late_noise_amplitude", diag.late_noise_amplitude},
               {"ratio", diag.ratio}};
  {
    std::ofstream os(sink.path_for("chi1L_summary.json"), std::ios::trunc);
    os << summary.dump(2) << "\n";
  }
  sink.finish();
  out << "chi_1L: peak " << diag.peak_height << ", late noise "
      << diag.late_noise_amplitude << ", ratio " << diag.ratio << "\n";
  return 0;
}

int cmd_oracle(const std::string& run_dir, int k, double window_drop,
               double tol, std::ostream& out) {
  EnsembleData data = load_run(run_dir);
  const RunConfig& cfg = data.cfg;
  if (tol <= 0.0) tol = cfg.q == 2 ? 0.01 : 0.02;
  ShortTimeCoefficients coeffs =
      short_time_coefficients(cfg.q, k, cfg.L, cfg.J);
  EnsembleSeries num = return_amplitude(data, k);
  double worst = 0.0;
  double worst_t = 0.0;
  long points = 0;
  for (std::size_t i = 0; i < num.size(); ++i) {
    auto pred =
        predict_return_amplitude(coeffs, data.mean_bandwidth, num.times[i]);
    if (1.0 - pred.value > window_drop || !pred.valid) continue;
    double dev = std::abs(num.mean[i] - pred.value) / std::abs(pred.value);
    ++points;
    if (dev > worst) {
      worst = dev;
      worst_t = num.times[i];
    }
  }
  out << "oracle: q=" << cfg.q << " k=" << k << " L=" << cfg.L
      << " c2=" << coeffs.c2 << " c4=" << coeffs.c4 << "\n";
  out << "validity window: predicted drop <= " << window_drop << " (" << points
      << " grid points)\n";
  out << "max relative deviation: " << worst << " at t = " << worst_t
      << " (tolerance " << tol << ")\n";
  return worst <= tol ? 0 : 1;
}

int cmd_count_terms(int L, int q, int k, int n, bool table,
                    std::size_t max_terms, std::ostream& out) {
  if (!table) {
    out << count_commutator_terms(q, k, n, L, max_terms) << "\n";
    return 0;
  }
  out << "q,k,n,count\n";
  for (int kk = 1; kk <= 3; ++kk) {
    for (int nn = 2; nn <= 4; ++nn) {
      out << q << "," << kk << "," << nn << ",";
      try {
        out << count_commutator_terms(q, kk, nn, L, max_terms);
      } catch (const BudgetError&) {
        out << "?";
      }
      out << "\n";
    }
  }
  return 0;
}

int cmd_fit_scaling(const std::string& input, const std::string& axis_name,
                    bool probe_quadratic, std::ostream& out) {
  Axis axis = axis_from_string(axis_name);
  if (axis == Axis::Y) axis = Axis::X;
  std::ifstream is(input);
  if (!is) throw ConfigError("cannot read " + input);
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty input " + input);
  bool has_sigma = line == "L,peak,stderr";
  if (!has_sigma && line != "L,peak") {
    throw ConfigError("fit input header must be 'L,peak' or 'L,peak,stderr'");
  }
  std::vector<double> ls, peaks, sigmas;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    double lv, pv, sv = 0.0;
    char c;
    if (!(row >> lv >> c >> pv)) throw ConfigError("bad fit input row: " + line);
    if (has_sigma && !(row >> c >> sv)) {
      throw ConfigError("bad fit input row: " + line);
    }
    ls.push_back(lv);
    peaks.push_back(pv);
    if (has_sigma) sigmas.push_back(sv);
  }
  FitResult fit = fit_peak_scaling(axis, ls, peaks, sigmas);
  json result;
  result["model"] = axis == Axis::X ? "peak = a*L^2 + b" : "peak = c*L + d";
  result["coefficients"] = fit.coefficients;
  result["stderrs"] = fit.stderrs;
  result["residual_norm"] = fit.residual_norm;
  if (probe_quadratic) {
    FitResult probe = fit_powers(ls, peaks, {2, 1, 0}, sigmas);
    result["quadratic_probe"] = {{"coefficient", probe.coefficients[0]},
                                 {"stderr", probe.stderrs[0]}};
  }
  out << result.dump(2) << "\n";
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"SYK quench simulator: disorder-averaged spin correlators "
               "under random all-to-all quench Hamiltonians"};
  app.require_subcommand(1);
  std::string config_path, run_dir;
  CommonOpts common;

  auto* sim = app.add_subcommand("simulate", "run a disorder ensemble");
  sim->add_option("--config", config_path, "JSON run configuration")
      ->required();
  common.attach(sim);

  auto add_run_opt = [&](CLI::App* cmd) {
    cmd->add_option("--run", run_dir, "run directory written by simulate")
        ->required();
    common.attach(cmd);
  };

  auto* sus = app.add_subcommand("susceptibility",
                                 "emit chi(t) series for a completed run");
  bool per_pair = false;
  add_run_opt(sus);
  sus->add_flag("--per-pair", per_pair, "also emit every chi_ij series");

  auto* pk = app.add_subcommand("peaks", "emit the peak-height matrix P_ij");
  add_run_opt(pk);

  auto* ret = app.add_subcommand("return-amplitude",
                                 "emit normalized size-k return amplitudes");
  std::vector<int> ks;
  add_run_opt(ret);
  ret->add_option("--k", ks, "operator sizes (default: all measured)");

  auto* dec =
      app.add_subcommand("decay-rate", "emit |d/dt| of the return amplitudes");
  add_run_opt(dec);
  dec->add_option("--k", ks, "operator sizes (default: all measured)");

  auto* sat = app.add_subcommand(
      "saturation", "emit the normalized maximum decay rate R(k_rel)");
  double threshold = 0.95;
  add_run_opt(sat);
  sat->add_option("--threshold", threshold, "saturation threshold (0.95)");

  auto* c1l =
      app.add_subcommand("chi1L", "peak vs late-noise diagnostic for chi_1L");
  add_run_opt(c1l);

  auto* ora = app.add_subcommand(
      "oracle",
      "compare measured return amplitudes with the short-time closed forms");
  int oracle_k = 1;
  double window_drop = 0.05, oracle_tol = 0.0;
  add_run_opt(ora);
  ora->add_option("--k", oracle_k, "operator size")->required();
  ora->add_option("--window-drop", window_drop,
                  "validity window: predicted drop <= this (0.05)");
  ora->add_option("--tol", oracle_tol,
                  "max relative deviation (default 1% for q=2, 2% for q=4)");

  auto* cnt = app.add_subcommand(
      "count-terms", "count distinct symbolic terms in nested commutators");
  int cL = 5, cq = 2, ck = 1, cn = 2;
  bool full_table = false;
  std::size_t max_terms = 3000000;
  cnt->add_option("--L", cL, "lattice length")->required();
  cnt->add_option("--q", cq, "SYK order")->required();
  cnt->add_option("--k", ck, "initial monomial size");
  cnt->add_option("--n", cn, "nesting depth");
  cnt->add_flag("--table", full_table, "emit the k=1..3, n=2..4 table as CSV");
  cnt->add_option("--max-terms", max_terms, "enumeration budget");
  common.attach(cnt);

  auto* fit = app.add_subcommand("fit-scaling",
                                 "fit peak heights against lattice length");
  std::string fit_input, fit_axis = "x";
  bool probe_quadratic = false;
  fit->add_option("--input", fit_input, "CSV with header L,peak[,stderr]")
      ->required();
  fit->add_option("--axis", fit_axis, "x (quadratic) or z (linear)");
  fit->add_flag("--probe-quadratic", probe_quadratic,
                "also fit a quadratic term and report its significance");
  common.attach(fit);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, common, out);
    if (sus->parsed()) return cmd_susceptibility(run_dir, common, per_pair, out);
    if (pk->parsed()) return cmd_peaks(run_dir, common, out);
    if (ret->parsed()) return cmd_return_amplitude(run_dir, common, ks, out);
    if (dec->parsed()) return cmd_decay_rate(run_dir, common, ks, out);
    if (sat->parsed()) return cmd_saturation(run_dir, common, threshold, out);
    if (c1l->parsed()) return cmd_chi1l(run_dir, common, out);
    if (ora->parsed()) {
      return cmd_oracle(run_dir, oracle_k, window_drop, oracle_tol, out);
    }
    if (cnt->parsed()) {
      return cmd_count_terms(cL, cq, ck, cn, full_table, max_terms, out);
    }
    if (fit->parsed()) {
      return cmd_fit_scaling(fit_input, fit_axis, probe_quadratic, out);
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << app.help();
  return 2;
}

}  // namespace sykq

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "odo/errors.hpp"
#include "odo/selfcheck.hpp"
#include "odo/session.hpp"
#include "odo/simulator.hpp"

namespace fs = std::filesystem;
using namespace odo;

namespace {

// Exit codes: 0 ok, 2 input parse error, 3 filter divergence / degenerate
// data, 4 configuration error, 1 anything else.
int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 4;
  if (dynamic_cast<const ParseError*>(&e) ||
      dynamic_cast<const NonMonotoneTime*>(&e) ||
      dynamic_cast<const InvalidScenario*>(&e) ||
      dynamic_cast<const TimeRangeMismatch*>(&e)) {
    return 2;
  }
  if (dynamic_cast<const GapTooLarge*>(&e) ||
      dynamic_cast<const NonPositiveDt*>(&e) ||
      dynamic_cast<const CovarianceNotPSD*>(&e) ||
      dynamic_cast<const SingularInnovation*>(&e) ||
      dynamic_cast<const SingularPredictedCovariance*>(&e) ||
      dynamic_cast<const DegenerateGravity*>(&e) ||
      dynamic_cast<const DegenerateNormal*>(&e) ||
      dynamic_cast<const DegenerateQuaternion*>(&e)) {
    return 3;
  }
  return 1;
}

std::ifstream open_input(const std::string& path, int missing_code) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(missing_code);
  }
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

int cmd_run(const std::string& log_path, const std::string& config_path,
            const std::string& out_dir, bool smooth, const std::string& baro_mode) {
  Configs cfg;
  if (!config_path.empty()) {
    auto in = open_input(config_path, 4);
    cfg = parse_config(in);
  }
  if (baro_mode == "absolute") {
    cfg.filter.baro_mode = BaroMode::kAbsolute;
  } else if (baro_mode == "relative") {
    cfg.filter.baro_mode = BaroMode::kRelative;
  } else if (!baro_mode.empty()) {
    throw ConfigError("baro mode must be absolute or relative");
  }

  auto in = open_input(log_path, 2);
  const auto log = parse_log(in);

  SessionOptions opt;
  opt.smooth = smooth;
  const auto res = run_session(log, cfg, opt);

  for (const auto& w : res.diagnostics.warnings) std::cerr << "warning: " << w << "\n";

  fs::create_directories(out_dir);
  {
    auto out = open_output(fs::path(out_dir) / "filtered.csv");
    write_trajectory(out, res.filtered);
  }
  if (smooth) {
    auto out = open_output(fs::path(out_dir) / "smoothed.csv");
    write_trajectory(out, res.smoothed);
  }
  {
    auto out = open_output(fs::path(out_dir) / "diagnostics.csv");
    write_diagnostics(out, res.diagnostics);
  }
  {
    auto out = open_output(fs::path(out_dir) / "summary.txt");
    write_summary(out, res);
  }
  write_summary(std::cout, res);
  return 0;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 uint64_t seed) {
  auto in = open_input(scenario_path, 2);
  const auto sc = parse_scenario(in);
  const auto sim = simulate(sc, seed);

  fs::create_directories(out_dir);
  {
    auto out = open_output(fs::path(out_dir) / "log.csv");
    write_log(out, sim.log);
  }
  {
    auto out = open_output(fs::path(out_dir) / "truth.csv");
    write_truth(out, sim.truth);
  }
  {
    auto out = open_output(fs::path(out_dir) / "truth_params.txt");
    write_truth_params(out, sim.truth);
  }
  std::cout << "samples = " << sim.truth.t.size() << "\n"
            << "duration_s = " << sim.truth.t.back() << "\n"
            << "path_length_m = " << sim.truth.path_length << "\n";
  return 0;
}

double kv_lookup(const std::string& path, const std::string& key) {
  auto in = open_input(path, 2);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string k = line.substr(0, eq);
    k.erase(k.find_last_not_of(" \t") + 1);
    k.erase(0, k.find_first_not_of(" \t"));
    if (k == key) return std::stod(line.substr(eq + 1));
  }
  throw ParseError(0, "missing key " + key + " in " + path);
}

int cmd_score(const std::string& est_path, const std::string& truth_path,
              const std::string& diagnostics_path, const std::string& params_path) {
  auto est_in = open_input(est_path, 2);
  const auto est = parse_trajectory(est_in);
  auto truth_in = open_input(truth_path, 2);
  auto truth = truth_from_rows(parse_trajectory(truth_in));

  const auto m = score(est, truth);
  std::printf("duration_s = %.9g\n", m.duration);
  std::printf("truth_path_length_m = %.9g\n", m.truth_path_length);
  std::printf("endpoint_error_m = %.9g\n", m.endpoint_error);
  std::printf("endpoint_error_pct = %.9g\n", m.endpoint_pct);
  std::printf("rmse_pos_m = %.9g\n", m.rmse_pos);
  std::printf("rmse_alt_m = %.9g\n", m.rmse_alt);
  std::printf("max_pos_error_m = %.9g\n", m.max_pos_error);

  // Bias estimation errors need the run's bias trajectory and the injected
  // truth; report them only when both files are supplied.
  if (!diagnostics_path.empty() && !params_path.empty()) {
    auto din = open_input(diagnostics_path, 2);
    std::string line;
    Vec3 ba = Vec3::Zero(), bw = Vec3::Zero(), ta = Vec3::Ones();
    bool seen = false;
    while (std::getline(din, line)) {
      if (line.rfind("bias,", 0) != 0) continue;
      std::istringstream iss(line.substr(5));
      std::string tok;
      std::vector<double> vals;
      while (std::getline(iss, tok, ',')) vals.push_back(std::stod(tok));
      if (vals.size() != 10) throw ParseError(0, "bad bias diagnostics row");
      for (int i = 0; i < 3; ++i) ba[i] = vals[1 + i];
      for (int i = 0; i < 3; ++i) bw[i] = vals[4 + i];
      for (int i = 0; i < 3; ++i) ta[i] = vals[7 + i];
      seen = true;
    }
    if (!seen) throw ParseError(0, "no bias rows in " + diagnostics_path);
    const Vec3 ba_t(kv_lookup(params_path, "bias_acc_x"),
                    kv_lookup(params_path, "bias_acc_y"),
                    kv_lookup(params_path, "bias_acc_z"));
    const Vec3 bw_t(kv_lookup(params_path, "bias_gyro_x"),
                    kv_lookup(params_path, "bias_gyro_y"),
                    kv_lookup(params_path, "bias_gyro_z"));
    const Vec3 ta_t(kv_lookup(params_path, "scale_acc_x"),
                    kv_lookup(params_path, "scale_acc_y"),
                    kv_lookup(params_path, "scale_acc_z"));
    std::printf("bias_acc_error_m_s2 = %.9g\n", (ba - ba_t).norm());
    std::printf("bias_gyro_error_rad_s = %.9g\n", (bw - bw_t).norm());
    std::printf("scale_error = %.9g\n", (ta - ta_t).norm());
  }
  return 0;
}

int cmd_selftest() {
  const auto checks = selfcheck::run_all();
  bool all = true;
  for (const auto& c : checks) {
    std::printf("[%s] %s (worst %.3g)\n", c.pass ? "ok" : "FAIL", c.name.c_str(),
                c.worst);
    all = all && c.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pedestrian inertial odometry engine"};
  app.require_subcommand(1);

  std::string log_path, config_path, out_dir = ".", baro_mode;
  bool smooth = false;
  auto* run = app.add_subcommand("run", "filter a sensor log");
  run->add_option("log", log_path, "input log CSV")->required();
  run->add_option("-c,--config", config_path, "key = value config file");
  run->add_option("-o,--out", out_dir, "output directory");
  run->add_option("--baro-mode", baro_mode, "absolute | relative");
  run->add_flag("--smooth", smooth, "also run the RTS smoother");

  std::string scenario_path, sim_out = ".";
  uint64_t seed = 1;
  auto* sim = app.add_subcommand("simulate", "generate a synthetic log");
  sim->add_option("scenario", scenario_path, "scenario description file")->required();
  sim->add_option("-o,--out", sim_out, "output directory");
  sim->add_option("--seed", seed, "random seed");

  std::string est_path, truth_path, diag_path, params_path;
  auto* sc = app.add_subcommand("score", "compare an estimate against truth");
  sc->add_option("estimate", est_path, "estimated trajectory CSV")->required();
  sc->add_option("truth", truth_path, "truth trajectory CSV")->required();
  sc->add_option("--diagnostics", diag_path, "diagnostics.csv from the same run");
  sc->add_option("--truth-params", params_path, "truth_params.txt from simulate");

  auto* st = app.add_subcommand("selftest", "run internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 4;
  }

  try {
    if (run->parsed()) {
      return cmd_run(log_path, config_path, out_dir, smooth, baro_mode);
    }
    if (sim->parsed()) return cmd_simulate(scenario_path, sim_out, seed);
    if (sc->parsed()) return cmd_score(est_path, truth_path, diag_path, params_path);
    if (st->parsed()) return cmd_selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify(e);
  }
  return 0;
}

// Command-line front end for the delay contraction toolkit. Talks to the
// shared library exclusively through the C interface.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ddecert.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNegative = 2;  // analysis ran, answer is "no"

struct SystemHandle {
  ddec_system* sys = nullptr;
  ~SystemHandle() { ddec_system_free(sys); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { ddec_string_free(s); }
};

int fail_with(int code, const std::string& context) {
  std::cerr << "error: " << context << ": " << ddec_last_error() << "\n";
  return code == DDEC_ERR_NO_CERTIFICATE ? kExitNegative : kExitError;
}

bool write_file(const std::string& dir, const std::string& name,
                const char* content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return false;
  }
  out << content;
  std::cout << "wrote " << path << "\n";
  return true;
}

int load_system(const std::string& path, SystemHandle& handle) {
  return ddec_system_load(path.c_str(), &handle.sys);
}

std::vector<double> parse_vector_arg(const std::string& text, int dim,
                                     const char* what) {
  std::vector<double> values;
  std::string token;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!token.empty()) values.push_back(std::stod(token));
      token.clear();
    } else {
      token += ch;
    }
  }
  if (static_cast<int>(values.size()) != dim)
    throw CLI::ValidationError(std::string(what) + " needs " +
                               std::to_string(dim) + " comma-separated values");
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Contraction certificates, spectra and simulations for "
               "linear delay systems on the unit delay interval"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ddecert ") + ddec_version());

  std::string output_dir = "./out";
  app.add_option("--output", output_dir, "Directory for report files")
      ->capture_default_str();
  int threads = 0;
  app.add_option("--threads", threads,
                 "Worker thread cap for ensembles (0 = auto)");

  std::string system_path;
  double mu = 0.0;
  double tol = 1e-9;
  int grid_points = 0;
  int nodes = 0;

  auto add_system_option = [&](CLI::App* cmd) {
    cmd->add_option("--system", system_path, "System description (JSON file)")
        ->required();
  };

  // certify
  auto* certify = app.add_subcommand(
      "certify", "Build a contraction certificate at a given rate");
  add_system_option(certify);
  certify->add_option("--mu", mu, "Decay rate to certify")->required();
  certify->add_option("--grid-points", grid_points,
                      "Weight samples per smooth panel (default 64)");

  // min-mu
  double min_mu_tol = 1e-9;
  auto* minmu = app.add_subcommand(
      "min-mu", "Locate the smallest certifiable decay rate");
  add_system_option(minmu);
  minmu->add_option("--tol", min_mu_tol, "Bisection tolerance")
      ->capture_default_str();

  // bounds
  auto* bounds = app.add_subcommand(
      "bounds", "Closed-form sufficient rates and comparisons");
  add_system_option(bounds);

  // spectrum
  auto* spectrum = app.add_subcommand(
      "spectrum", "Collocation eigenvalues with residual filtering");
  add_system_option(spectrum);
  spectrum->add_option("--nodes", nodes,
                       "Collocation nodes per panel (default 32)");

  // check
  auto* check = app.add_subcommand(
      "check", "Finite-section dissipativity check of a certificate");
  add_system_option(check);
  check->add_option("--mu", mu, "Certificate rate")->required();
  check->add_option("--nodes", nodes,
                    "Collocation nodes per panel (default 32)");

  // simulate
  double t_final = 10.0, step = 1e-3, checkpoint_every = 0.5;
  std::uint64_t history_seed = 0;
  std::string x0_text;
  auto* simulate = app.add_subcommand(
      "simulate", "Integrate the system and test the certified decay");
  add_system_option(simulate);
  simulate->add_option("--mu", mu, "Certificate rate")->required();
  simulate->add_option("--t-final", t_final, "Integration horizon")
      ->capture_default_str();
  simulate->add_option("--step", step, "Step size (must divide 1)")
      ->capture_default_str();
  simulate->add_option("--x0", x0_text, "Initial state, comma separated");
  simulate->add_option("--history-seed", history_seed,
                       "Random smooth history seed (0 = constant history)");
  simulate->add_option("--checkpoint-every", checkpoint_every,
                       "Norm checkpoint spacing")
      ->capture_default_str();

  // sdde-pair
  double dt = 1e-3, omega = 0.0, drift_amp = 0.0, noise_amp = 0.0;
  double pair_t_final = 20.0;
  int paths = 200;
  std::uint64_t seed = 1;
  std::string drift_kind = "zero", noise_kind = "zero";
  std::string x0a_text = "1", x0b_text = "0";
  auto* pair = app.add_subcommand(
      "sdde-pair", "Coupled stochastic pair and mean-square contraction fit");
  add_system_option(pair);
  pair->add_option("--drift-kind", drift_kind, "zero | tanh")
      ->capture_default_str();
  pair->add_option("--drift-amplitude", drift_amp, "Drift perturbation size")
      ->capture_default_str();
  pair->add_option("--noise-kind", noise_kind, "zero | additive | linear")
      ->capture_default_str();
  pair->add_option("--noise-amplitude", noise_amp, "Noise size")
      ->capture_default_str();
  pair->add_option("--x0-a", x0a_text, "First initial state")
      ->capture_default_str();
  pair->add_option("--x0-b", x0b_text, "Second initial state")
      ->capture_default_str();
  pair->add_option("--dt", dt, "Euler step (must divide 1)")
      ->capture_default_str();
  pair->add_option("--t-final", pair_t_final, "Horizon")->capture_default_str();
  pair->add_option("--paths", paths, "Sample paths")->capture_default_str();
  pair->add_option("--seed", seed, "Base seed")->capture_default_str();
  pair->add_option("--omega", omega, "Required contraction rate")
      ->capture_default_str();

  // sdde-lyapunov
  double lyap_b = 0.0, lyap_c = 0.0, lyap_sigma = 1.0;
  double lyap_dt = 1e-3, lyap_t_final = 50.0;
  int lyap_paths = 64;
  std::uint64_t lyap_seed = 1;
  auto* lyap = app.add_subcommand(
      "sdde-lyapunov",
      "Almost-sure exponent of the scalar noisy delay equation");
  lyap->add_option("--b", lyap_b, "Instantaneous coefficient")->required();
  lyap->add_option("--c", lyap_c, "Delayed coefficient")->required();
  lyap->add_option("--sigma", lyap_sigma, "Multiplicative noise level")
      ->required();
  lyap->add_option("--dt", lyap_dt, "Euler step")->capture_default_str();
  lyap->add_option("--t-final", lyap_t_final, "Horizon")->capture_default_str();
  lyap->add_option("--paths", lyap_paths, "Sample paths")->capture_default_str();
  lyap->add_option("--seed", lyap_seed, "Base seed")->capture_default_str();

  // lyapunov-renorm
  std::string renorm_path;
  auto* renorm = app.add_subcommand(
      "lyapunov-renorm",
      "Quadratic-form rescaling from an observability Gramian");
  renorm->add_option("--input", renorm_path,
                     "JSON file with matrices A and C")
      ->required();

  CLI11_PARSE(app, argc, argv);
  ddec_set_thread_cap(threads);

  if (certify->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    ddec_certificate* cert = nullptr;
    if (int rc = ddec_certify(sys.sys, mu, grid_points, &cert))
      return fail_with(rc, "certify");
    std::unique_ptr<ddec_certificate, decltype(&ddec_certificate_free)> owner(
        cert, &ddec_certificate_free);
    OwnedString json;
    if (int rc = ddec_certificate_report(cert, &json.s))
      return fail_with(rc, "report");
    double gap = 0, c1 = 0, c2 = 0;
    ddec_certificate_info(cert, nullptr, nullptr, nullptr, &gap, &c1, &c2);
    if (!write_file(output_dir, "certificate.json", json.s)) return kExitError;
    std::printf("certified mu=%g gap=%.6g c1=%.6g c2=%.6g\n", mu, gap, c1, c2);
    return kExitOk;
  }

  if (minmu->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    OwnedString json;
    if (int rc = ddec_min_mu_report(sys.sys, min_mu_tol, &json.s))
      return fail_with(rc, "min-mu");
    double value = 0;
    ddec_min_mu(sys.sys, min_mu_tol, &value);
    if (!write_file(output_dir, "min_mu.json", json.s)) return kExitError;
    std::printf("min certifiable rate: %.12g\n", value);
    return kExitOk;
  }

  if (bounds->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    OwnedString json;
    if (int rc = ddec_bounds_report(sys.sys, &json.s))
      return fail_with(rc, "bounds");
    if (!write_file(output_dir, "bounds.json", json.s)) return kExitError;
    std::cout << json.s;
    return kExitOk;
  }

  if (spectrum->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    OwnedString json, csv;
    if (int rc = ddec_spectrum_report(sys.sys, nodes, &json.s, &csv.s))
      return fail_with(rc, "spectrum");
    if (!write_file(output_dir, "spectrum.json", json.s)) return kExitError;
    if (!write_file(output_dir, "spectrum.csv", csv.s)) return kExitError;
    return kExitOk;
  }

  if (check->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    OwnedString json;
    if (int rc = ddec_check_report(sys.sys, mu, nodes > 0 ? nodes : 32, &json.s))
      return fail_with(rc, "check");
    if (!write_file(output_dir, "check.json", json.s)) return kExitError;
    double theta = 0, margin = 0;
    if (int rc =
            ddec_check_margin(sys.sys, mu, nodes > 0 ? nodes : 32, &theta, &margin))
      return fail_with(rc, "check");
    std::printf("theta_max=%.12g margin=%.3e\n", theta, margin);
    const std::string text(json.s);
    const bool pass = text.find("\"pass\": true") != std::string::npos;
    return pass ? kExitOk : kExitNegative;
  }

  if (simulate->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    std::vector<double> x0;
    const double* x0_ptr = nullptr;
    if (!x0_text.empty()) {
      x0 = parse_vector_arg(x0_text, ddec_system_dim(sys.sys), "--x0");
      x0_ptr = x0.data();
    }
    OwnedString csv, json;
    if (int rc = ddec_simulate(sys.sys, mu, x0_ptr, t_final, step, history_seed,
                               checkpoint_every, &csv.s, &json.s))
      return fail_with(rc, "simulate");
    if (!write_file(output_dir, "trajectory.csv", csv.s)) return kExitError;
    if (!write_file(output_dir, "contraction.json", json.s)) return kExitError;
    const std::string text(json.s);
    const bool pass = text.find("\"pass\": true") != std::string::npos;
    std::printf("contraction bound %s\n", pass ? "holds" : "violated");
    return pass ? kExitOk : kExitNegative;
  }

  if (pair->parsed()) {
    SystemHandle sys;
    if (int rc = load_system(system_path, sys)) return fail_with(rc, "load");
    const int dim = ddec_system_dim(sys.sys);
    std::vector<double> x0a = parse_vector_arg(x0a_text, dim, "--x0-a");
    std::vector<double> x0b = parse_vector_arg(x0b_text, dim, "--x0-b");
    OwnedString json;
    if (int rc = ddec_sdde_pair_report(
            sys.sys, drift_kind.c_str(), drift_amp, noise_kind.c_str(),
            noise_amp, x0a.data(), x0b.data(), dt, pair_t_final, paths, seed,
            omega, &json.s))
      return fail_with(rc, "sdde-pair");
    if (!write_file(output_dir, "sdde_pair.json", json.s)) return kExitError;
    const std::string text(json.s);
    const bool ok = text.find("\"condition_holds\": true") != std::string::npos;
    std::printf("mean-square condition %s\n", ok ? "holds" : "does not hold");
    return kExitOk;
  }

  if (lyap->parsed()) {
    OwnedString json;
    if (int rc = ddec_sdde_lyapunov_report(lyap_b, lyap_c, lyap_sigma, lyap_dt,
                                           lyap_t_final, lyap_paths, lyap_seed,
                                           &json.s))
      return fail_with(rc, "sdde-lyapunov");
    if (!write_file(output_dir, "sdde_lyapunov.json", json.s))
      return kExitError;
    std::cout << json.s;
    return kExitOk;
  }

  if (renorm->parsed()) {
    std::ifstream in(renorm_path, std::ios::binary);
    if (!in) {
      std::cerr << "error: cannot open " << renorm_path << "\n";
      return kExitError;
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    OwnedString json;
    if (int rc = ddec_lyapunov_renorm_report(text.c_str(), &json.s))
      return fail_with(rc, "lyapunov-renorm");
    if (!write_file(output_dir, "renorm.json", json.s)) return kExitError;
    std::cout << json.s;
    return kExitOk;
  }

  return kExitError;
}

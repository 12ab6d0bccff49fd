#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "ddecert.h"

using nlohmann::json;

namespace {

constexpr const char* kPointDelay = R"({
  "B": [[-2.0]],
  "kernel": {"atoms": [{"delay": -1.0, "matrix": [[1.0]]}]}
})";

struct SystemGuard {
  ddec_system* sys = nullptr;
  ~SystemGuard() { ddec_system_free(sys); }
};

struct StringGuard {
  char* s = nullptr;
  ~StringGuard() { ddec_string_free(s); }
};

json parse_owned(char* s) {
  StringGuard g{s};
  REQUIRE(s != nullptr);
  return json::parse(s);
}

}  // namespace

TEST_CASE("version and error plumbing") {
  CHECK(std::string(ddec_version()) == "0.1.0");
  ddec_system* sys = nullptr;
  CHECK(ddec_system_parse(nullptr, &sys) == DDEC_ERR_INVALID);
  CHECK(ddec_system_parse("{", &sys) == DDEC_ERR_PARSE);
  CHECK(std::string(ddec_last_error()).size() > 0);
  CHECK(ddec_system_parse("{\"kernel\": {}}", &sys) == DDEC_ERR_PARSE);
  CHECK(std::string(ddec_last_error()).find("drift") != std::string::npos);
}

TEST_CASE("system parsing and scalar queries") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  CHECK(ddec_system_dim(g.sys) == 1);

  double v = 0.0;
  CHECK(ddec_dissipativity_lambda(g.sys, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(-2.0));
  CHECK(ddec_total_variation(g.sys, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(ddec_exp_moment(g.sys, 0.0, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(ddec_exp_moment(g.sys, 1.0, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(ddec_dissipativity_gap(g.sys, 0.0, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(3.0));
  CHECK(ddec_min_mu(g.sys, 1e-10, &v) == DDEC_OK);
  CHECK(v == doctest::Approx(-0.44285440100238858).epsilon(1e-8));
  CHECK(ddec_dissipativity_gap(g.sys, -3.0, &v) == DDEC_ERR_INVALID);
}

TEST_CASE("system loading from disk") {
  const char* path = "capi_system.json";
  {
    std::ofstream f(path);
    f << kPointDelay;
  }
  SystemGuard g;
  CHECK(ddec_system_load(path, &g.sys) == DDEC_OK);
  CHECK(ddec_system_dim(g.sys) == 1);
  std::remove(path);
  ddec_system* missing = nullptr;
  CHECK(ddec_system_load("no_such_file.json", &missing) != DDEC_OK);
  CHECK(std::string(ddec_last_error()).find("no_such_file") !=
        std::string::npos);
}

TEST_CASE("certificate lifecycle and info") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  ddec_certificate* cert = nullptr;
  REQUIRE(ddec_certify(g.sys, 0.0, 0, &cert) == DDEC_OK);
  double lambda, mu, gamma, gap, c1, c2;
  CHECK(ddec_certificate_info(cert, &lambda, &mu, &gamma, &gap, &c1, &c2) ==
        DDEC_OK);
  CHECK(lambda == doctest::Approx(-2.0));
  CHECK(mu == doctest::Approx(0.0));
  CHECK(gamma == doctest::Approx(2.0));
  CHECK(gap == doctest::Approx(3.0));
  CHECK(c1 == doctest::Approx(1.5));
  CHECK(c2 == doctest::Approx(2.0));
  // Outputs are individually optional.
  CHECK(ddec_certificate_info(cert, nullptr, nullptr, nullptr, nullptr,
                              nullptr, &c2) == DDEC_OK);
  char* report = nullptr;
  REQUIRE(ddec_certificate_report(cert, &report) == DDEC_OK);
  const json j = parse_owned(report);
  CHECK(j["version"] == "0.1.0");
  CHECK(j["gap"] == doctest::Approx(3.0));
  CHECK(j["c1"] == doctest::Approx(1.5));
  CHECK(j["tau"].is_array());
  CHECK(j["tau"].size() > 10);
  CHECK(j["tau"][0].contains("s"));
  CHECK(j["tau"][0].contains("side"));
  CHECK(j["tau"][0].contains("value"));
  CHECK(j["bounds"].contains("mu_sufficient"));
  CHECK(j["config"].contains("grid_points"));
  ddec_certificate_free(cert);

  ddec_certificate* none = nullptr;
  CHECK(ddec_certify(g.sys, -3.0, 0, &none) == DDEC_ERR_INVALID);
  SystemGuard heavy;
  REQUIRE(ddec_system_parse(R"({
    "B": [[-1.0]],
    "kernel": {"atoms": [{"delay": -1.0, "matrix": [[2.0]]}]}
  })", &heavy.sys) == DDEC_OK);
  CHECK(ddec_certify(heavy.sys, 0.0, 0, &none) == DDEC_ERR_NO_CERTIFICATE);
}

TEST_CASE("reports carry version, config, and bounds") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  char* out = nullptr;
  REQUIRE(ddec_min_mu_report(g.sys, 1e-9, &out) == DDEC_OK);
  json j = parse_owned(out);
  CHECK(j["min_mu"] == doctest::Approx(-0.44285440100238858).epsilon(1e-7));
  CHECK(j["version"] == "0.1.0");
  CHECK(j["config"]["tol"] == doctest::Approx(1e-9));

  out = nullptr;
  REQUIRE(ddec_bounds_report(g.sys, &out) == DDEC_OK);
  j = parse_owned(out);
  CHECK(j["mu_sufficient"] ==
        doctest::Approx(-2.0 + std::exp(2.0)).epsilon(1e-12));
  CHECK(j["zero_dissipative"] == true);
  CHECK(j["webb_mu"] == 0.0);
  CHECK(j["lambda"] == doctest::Approx(-2.0));
  CHECK(j["total_variation"] == doctest::Approx(1.0));

  out = nullptr;
  REQUIRE(ddec_contraction_shift_report(g.sys, &out) == DDEC_OK);
  j = parse_owned(out);
  // lambda + V = -1 < 0, so the shift is the unit margin alone.
  CHECK(j["nu"] == doctest::Approx(1.0));
  CHECK(j["gap"].get<double>() > 0.0);
}

TEST_CASE("quadratic renorm through the flat interface") {
  const double a[4] = {0.0, 1.0, -2.0, -3.0};
  const double c[4] = {1.0, 0.0, 0.0, 1.0};
  double q[4] = {0, 0, 0, 0};
  double gamma = 0.0;
  REQUIRE(ddec_lyapunov_renorm(a, c, 2, q, &gamma) == DDEC_OK);
  CHECK(q[0] == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(q[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(q[3] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(gamma ==
        doctest::Approx((3.0 - std::sqrt(5.0)) / 4.0).epsilon(1e-12));

  const double unstable[1] = {1.0};
  const double cid[1] = {1.0};
  CHECK(ddec_lyapunov_renorm(unstable, cid, 1, nullptr, &gamma) ==
        DDEC_ERR_UNSTABLE);
  const double diag[4] = {-1.0, 0.0, 0.0, -2.0};
  const double cbad[4] = {1.0, 0.0, 0.0, 0.0};
  CHECK(ddec_lyapunov_renorm(diag, cbad, 2, nullptr, &gamma) ==
        DDEC_ERR_UNOBSERVABLE);

  char* out = nullptr;
  REQUIRE(ddec_lyapunov_renorm_report(R"({
    "A": [[0.0, 1.0], [-2.0, -3.0]],
    "C": [[1.0, 0.0], [0.0, 1.0]]
  })", &out) == DDEC_OK);
  const json j = parse_owned(out);
  CHECK(j["gamma_lower"] ==
        doctest::Approx((3.0 - std::sqrt(5.0)) / 4.0).epsilon(1e-12));
  CHECK(j["Q"].size() == 2);
  CHECK(j["Q"][0][0] == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("spectrum through the flat interface") {
  double root = 0.0;
  REQUIRE(ddec_dominant_real_root(-2.0, 1.0, 1e-12, &root) == DDEC_OK);
  CHECK(root == doctest::Approx(-0.44285440100238858).epsilon(1e-12));
  CHECK(ddec_dominant_real_root(-2.0, -1.0, 1e-12, &root) ==
        DDEC_ERR_INVALID);

  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  char* jout = nullptr;
  char* cout_ = nullptr;
  REQUIRE(ddec_spectrum_report(g.sys, 24, &jout, &cout_) == DDEC_OK);
  StringGuard cg{cout_};
  const json j = parse_owned(jout);
  CHECK(j["abscissa"] ==
        doctest::Approx(-0.44285440100238858).epsilon(1e-8));
  CHECK(j["eigenvalues"].is_array());
  CHECK(j["eigenvalues"][0].contains("re"));
  CHECK(j["eigenvalues"][0].contains("residual"));
  CHECK(j["config"]["nodes_per_panel"] == 24);
  REQUIRE(cout_ != nullptr);
  CHECK(std::string(cout_).rfind("re,im,residual,spurious", 0) == 0);

  double sv = 1.0;
  REQUIRE(ddec_verify_characteristic(g.sys, root, 0.0, &sv) == DDEC_OK);
  CHECK(sv < 1e-10);
  CHECK(ddec_spectrum_report(g.sys, 24, nullptr, nullptr) ==
        DDEC_ERR_INVALID);
}

TEST_CASE("operator check through the flat interface") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  double theta = 1.0, margin = -1.0;
  REQUIRE(ddec_check_margin(g.sys, 0.0, 16, &theta, &margin) == DDEC_OK);
  CHECK(margin >= -1e-10);
  CHECK(theta <= 1e-10);

  char* out = nullptr;
  REQUIRE(ddec_check_report(g.sys, 0.0, 16, &out) == DDEC_OK);
  json j = parse_owned(out);
  CHECK(j["pass"] == true);
  CHECK(j["theta_max"].get<double>() <= 1e-10);
  CHECK(j["margin"].get<double>() >= -1e-10);
  CHECK(j["tolerance"] == doctest::Approx(1e-3));
  CHECK(j["nodes"].is_array());
  CHECK(j["quad_weights"].is_array());

  const int counts[3] = {8, 16, 32};
  out = nullptr;
  REQUIRE(ddec_refinement_report(g.sys, 0.0, counts, 3, &out) == DDEC_OK);
  j = parse_owned(out);
  REQUIRE(j["runs"].size() == 3);
  for (const auto& run : j["runs"]) {
    CHECK(run["margin"].get<double>() >= -1e-10);
    CHECK(run["pass"] == true);
  }
  CHECK(ddec_check_margin(g.sys, -5.0, 16, &theta, &margin) ==
        DDEC_ERR_INVALID);
}

TEST_CASE("simulation through the flat interface") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(kPointDelay, &g.sys) == DDEC_OK);
  char* csv = nullptr;
  char* jout = nullptr;
  REQUIRE(ddec_simulate(g.sys, 0.0, nullptr, 4.0, 1e-2, 0, 0.5, &csv, &jout) ==
          DDEC_OK);
  StringGuard cg{csv};
  REQUIRE(csv != nullptr);
  CHECK(std::string(csv).rfind("t,u0,weighted_norm", 0) == 0);
  const json j = parse_owned(jout);
  CHECK(j["pass"] == true);
  CHECK(j["max_ratio"].get<double>() <= 1.0 + 1e-6);
  CHECK(j["mu"] == 0.0);
  CHECK(j["config"]["history_seed"] == 0);
  CHECK(j["times"].size() == j["norms"].size());

  // Random histories are reproducible through the seed.
  char* j1 = nullptr;
  char* j2 = nullptr;
  REQUIRE(ddec_simulate(g.sys, 0.0, nullptr, 2.0, 1e-2, 42, 0.5, nullptr,
                        &j1) == DDEC_OK);
  REQUIRE(ddec_simulate(g.sys, 0.0, nullptr, 2.0, 1e-2, 42, 0.5, nullptr,
                        &j2) == DDEC_OK);
  StringGuard g1{j1}, g2{j2};
  CHECK(std::string(j1) == std::string(j2));

  CHECK(ddec_simulate(g.sys, 0.0, nullptr, 4.0, 0.3, 0, 0.5, &csv, nullptr) ==
        DDEC_ERR_INVALID);
}

TEST_CASE("stochastic reports through the flat interface") {
  SystemGuard g;
  REQUIRE(ddec_system_parse(R"({
    "B": [[-2.0]],
    "kernel": {"atoms": [{"delay": -1.0, "matrix": [[0.25]]}]}
  })", &g.sys) == DDEC_OK);
  const double xa[1] = {1.0};
  const double xb[1] = {-1.0};
  char* out = nullptr;
  ddec_set_thread_cap(2);
  REQUIRE(ddec_sdde_pair_report(g.sys, "tanh", 0.05, "linear", 0.1, xa, xb,
                                1e-2, 4.0, 12, 7, 0.0, &out) == DDEC_OK);
  ddec_set_thread_cap(0);
  const json j = parse_owned(out);
  CHECK(j["rate"].get<double>() < 0.0);
  CHECK(j["ci_low"].get<double>() <= j["rate"].get<double>());
  CHECK(j["ci_high"].get<double>() >= j["rate"].get<double>());
  CHECK(j["paths"] == 12);
  CHECK(j["blowup"] == false);
  CHECK(j["condition_lhs"].is_number());
  CHECK(j["config"]["noise"]["kind"] == "linear");
  CHECK(j["config"]["drift_perturbation"]["kind"] == "tanh");
  CHECK(j["mean_sq_distance"].size() == j["checkpoint_times"].size());

  CHECK(ddec_sdde_pair_report(g.sys, "bogus", 0.0, "zero", 0.0, xa, xb, 1e-2,
                              2.0, 4, 1, 0.0, &out) == DDEC_ERR_INVALID);

  out = nullptr;
  REQUIRE(ddec_sdde_lyapunov_report(-1.0, 0.1, 1.0, 1e-2, 10.0, 8, 3, &out) ==
          DDEC_OK);
  const json jl = parse_owned(out);
  CHECK(jl["region_ok"] == true);
  CHECK(jl["exponent"].is_number());
  CHECK(jl["config"]["sigma"] == 1.0);
}

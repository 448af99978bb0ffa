#include "doctest.h"
#include "mcot/cli.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "mcot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mcot::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scratch(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::path(MCOT_TEST_TMP) / "cli_files";
  fs::create_directories(dir);
  const fs::path file = dir / name;
  std::ofstream(file) << contents;
  return file.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

const std::string kBiased = R"({"kernel": [[0.9, 0.1], [0.2, 0.8]], "labels": ["x", "y"]})";
const std::string kThree = R"({"kernel": [[0.5, 0.3, 0.2], [0.3, 0.4, 0.3], [0.2, 0.3, 0.5]]})";

}  // namespace

TEST_CASE("validate") {
  const auto ok = cli({"validate", "--chain", scratch("biased.json", kBiased)});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("reversibility_defect") != std::string::npos);
  const auto report = nlohmann::json::parse(ok.out);
  CHECK(report["stationary"][0].get<double>() == doctest::Approx(2.0 / 3.0));

  const auto short_rows = cli({"validate", "--chain", scratch("short.json", R"({"kernel": [[0.49, 0.5], [0.5, 0.5]]})")});
  CHECK(short_rows.code == 1);
  CHECK(short_rows.err.find("RowSumError") != std::string::npos);

  CHECK(cli({"validate", "--chain", "/nonexistent/chain.json"}).code == 2);
  CHECK(cli({"validate", "--chain", scratch("broken.json", "{\"kernel\": [[0.5,")}).code == 2);
  CHECK(cli({"validate"}).code == 2);

  const auto bad_params =
      cli({"validate", "--chain", scratch("biased2.json", kBiased), "--params", scratch("p.json", R"({"p": [2, 2]})")});
  CHECK(bad_params.code == 1);
  CHECK(bad_params.err.find("NotInRange") != std::string::npos);
}

TEST_CASE("spectrum") {
  const auto run = cli({"spectrum", "--chain", scratch("flip.json", R"({"kernel": [[0, 1], [1, 0]]})")});
  REQUIRE(run.code == 0);
  const auto report = nlohmann::json::parse(run.out);
  CHECK(report["spectral_gap"].get<double>() == doctest::Approx(2.0));
}

TEST_CASE("distance") {
  const std::string chain = scratch("three.json", kThree);
  const std::string params = scratch("params.json", R"({"a": 1, "b": 1, "p": [1, 1, 1]})");
  const std::string mu0 = scratch("mu0.json", R"({"values": [1.0, 0.7, 1.3]})");
  const std::string mu1 = scratch("mu1.json", R"({"values": [1.2, 0.9, 1.5]})");
  const auto run = cli({"distance", "--chain", chain, "--params", params, "--mu0", mu0, "--mu1", mu1, "--steps", "16"});
  REQUIRE(run.code == 0);
  const auto report = nlohmann::json::parse(run.out);
  CHECK(report["lower_bound"].get<double>() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report["upper_bound"].get<double>() == doctest::Approx(0.2).epsilon(1e-3));
  CHECK(report["path"]["times"].size() == 17);
  CHECK(report["l1_check"]["lower_holds"].get<bool>());

  const auto same = cli({"distance", "--chain", chain, "--params", params, "--mu0", mu0, "--mu1", mu0, "--steps", "8"});
  CHECK(nlohmann::json::parse(same.out)["upper_bound"].get<double>() <= 1e-6);

  const std::string mu2 = scratch("mu2.json", R"([0.5, 1.5, 1.0])");
  const std::vector<std::string> args = {"distance", "--chain", chain, "--mu0", mu0, "--mu1", mu2,
                                         "--steps", "8", "--seed", "3"};
  CHECK(cli(args).out == cli(args).out);

  const std::string csv = (fs::path(MCOT_TEST_TMP) / "cli_files" / "path.csv").string();
  auto with_out = args;
  with_out.insert(with_out.end(), {"--out", csv, "--format", "csv"});
  REQUIRE(cli(with_out).code == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("t,mu_1,mu_2,mu_3,h\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);

  auto bad_steps = args;
  bad_steps[8] = "1";
  CHECK(cli(bad_steps).code == 2);
  auto bad_eps = args;
  bad_eps.insert(bad_eps.end(), {"--eps", "1.5"});
  CHECK(cli(bad_eps).code == 2);

  const std::string negative = scratch("neg.json", R"([1.0, -0.5, 1.0])");
  const auto neg = cli({"distance", "--chain", chain, "--mu0", negative, "--mu1", mu0});
  CHECK(neg.code == 1);
  CHECK(neg.err.find("NegativeInput") != std::string::npos);
}

TEST_CASE("flow") {
  const std::string chain = scratch("three_flow.json", kThree);
  const auto eq = cli({"flow", "--chain", chain, "--rho0", scratch("ones.json", "[1, 1, 1]")});
  REQUIRE(eq.code == 0);
  CHECK(eq.err.find("equilibrium") != std::string::npos);
  CHECK(nlohmann::json::parse(eq.out)["equilibrium"].get<bool>());

  const std::string csv = (fs::path(MCOT_TEST_TMP) / "cli_files" / "traj.csv").string();
  const auto run = cli({"flow", "--chain", chain, "--rho0", scratch("rho.json", "[2.5, 0.3, 1.1]"), "--out", csv});
  REQUIRE(run.code == 0);
  const auto report = nlohmann::json::parse(run.out);
  CHECK(report["converged"].get<bool>());
  CHECK(report["r_squared"].get<double>() >= 0.99);
  CHECK(report.contains("spectral_gap"));
  CHECK(run.err.find("fitted_rate") != std::string::npos);
  CHECK(slurp(csv).rfind("t,rho_1,rho_2,rho_3,entropy,grad_norm_sq,min_state,mass\n", 0) == 0);

  const auto neg = cli({"flow", "--chain", chain, "--rho0", scratch("rho_neg.json", "[2.5, -0.3, 1.1]")});
  CHECK(neg.code == 1);
  CHECK(neg.err.find("NotStrictlyPositive") != std::string::npos);
  CHECK(cli({"flow", "--chain", chain, "--rho0", scratch("rho2.json", "[1, 2, 3]"), "--dt", "0"}).code == 2);
}

TEST_CASE("loja and bounds") {
  const std::string chain = scratch("three_loja.json", kThree);
  const std::string rho = scratch("rho_loja.json", "[2.5, 0.3, 1.1]");
  const auto loja = cli({"loja", "--chain", chain, "--rho0", rho});
  REQUIRE(loja.code == 0);
  const auto report = nlohmann::json::parse(loja.out);
  CHECK(report["sampled_constant"].get<double>() > 0.0);
  CHECK(report["local_constant"].get<double>() > 0.0);

  const auto bounds = cli({"bounds", "--chain", chain, "--mu0", rho, "--mu1", scratch("ones_b.json", "[1, 1, 1]"),
                           "--steps", "8", "--restarts", "2"});
  REQUIRE(bounds.code == 0);
  CHECK(nlohmann::json::parse(bounds.out)["lower_holds"].get<bool>());
}

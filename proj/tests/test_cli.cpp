#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cli_runner.hpp"
#include "macroq/cli.hpp"
#include "macroq/errors.hpp"
#include "macroq/io.hpp"

using namespace macroq;
using cli_runner::run;

namespace {

const std::filesystem::path kDir = cli_runner::fresh_dir("macroq_test_cli");

Json measure_json(const std::string& args) {
  const auto r = run(kDir, "measure " + args);
  REQUIRE_MESSAGE(r.exit_code == 0, r.err);
  return Json::parse(r.out);
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(cli_runner::slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream fields(line);
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("state command") {
  auto r = run(kDir, "state thermal a=2 -o th2.json");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("N=") != std::string::npos);
  CHECK(std::abs(measure_json("th2.json")["P"].get<double>() - 0.25) < 1e-9);

  r = run(kDir, "state fock n=0 -o vac.json");
  REQUIRE(r.exit_code == 0);
  const StateFile vac = read_state(kDir / "vac.json");
  CHECK(vac.is_pure());
  CHECK(vac.density().matrix()(0, 0) == Complex(1.0));

  r = run(kDir, "state cat-mixture alpha=1 -o cm.json");
  REQUIRE(r.exit_code == 0);
  CHECK(std::abs(measure_json("cm.json")["I"].get<double>() + std::exp(-4.0)) < 1e-10);

  r = run(kDir, "state product left=vac.json right=vac.json -o vv.json");
  REQUIRE(r.exit_code == 0);
  CHECK(read_state(kDir / "vv.json").spec() == ModeSpec{2, 10});
  CHECK(read_state(kDir / "vv.json").metadata["left"]["family"] == "fock");
}

TEST_CASE("state command errors") {
  CHECK(run(kDir, "state unicorn -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "state thermal b=2 -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "state thermal a=two -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "state thermal a=0.5 -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "state thermal -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "state cat alpha=0 phase=3.141592653589793 -o x.json").exit_code == kExitUsage);
  CHECK(run(kDir, "").exit_code == kExitUsage);
  CHECK(run(kDir, "frobnicate").exit_code == kExitUsage);

  const auto r = run(kDir, "state coherent alpha=3 --truncation 10 -o x.json");
  CHECK(r.exit_code == kExitTruncation);
  CHECK(r.err.find("N >= 39") != std::string::npos);
  CHECK(run(kDir, "state fock n=5 truncation=6 -o x.json").exit_code == kExitTruncation);

  ::setenv("MACROQ_MAX_DIM", "64", 1);
  CHECK(run(kDir, "state thermal a=3 -o x.json").exit_code == kExitTruncation);
  ::unsetenv("MACROQ_MAX_DIM");
}

TEST_CASE("build_state") {
  const StateFile th = build_state("thermal", {{"a", "1.5"}});
  CHECK(th.spec().truncation == default_truncation_thermal({1.5}));
  CHECK(th.metadata["family"] == "thermal");
  CHECK(build_state("coherent", {{"alpha_im", "1"}}, 30).spec().truncation == 30);
  CHECK(build_state("fock-mixture", {{"d", "3"}, {"include_vacuum", "false"}}).density().matrix()(0, 0) == Complex(0.0));
  CHECK_THROWS_AS(build_state("fock", {{"n", "1.5"}}), InvalidArgument);
}

TEST_CASE("measure command") {
  REQUIRE(run(kDir, "state thermal a=1.4142135623730951 -o ths.json").exit_code == 0);
  const Json both = measure_json("ths.json --method both");
  CHECK(std::abs(both["operator"]["I"].get<double>() + 0.125) < 1e-9);
  CHECK(std::abs(both["operator"]["chi2"].get<double>() - 1) < 1e-8);
  CHECK(std::abs(both["wigner"]["I"].get<double>() + 0.125) < 1e-3);
  CHECK(both["deltas"]["max_relative_delta"].get<double>() < 1e-3);
  CHECK(both["wigner"]["path"] == "wigner");

  REQUIRE(run(kDir, "state fock-mixture d=3 include_vacuum=true -o fm3.json").exit_code == 0);
  CHECK(std::abs(measure_json("fm3.json")["I"].get<double>()) < 1e-9);

  REQUIRE(run(kDir, "state coherent alpha=2 -o coh2.json").exit_code == 0);
  const Json coh = measure_json("coh2.json");
  CHECK(std::abs(coh["chi2"].get<double>() - 2) < 1e-8);
  CHECK(coh["convention_note"].get<std::string>().find("2^M") != std::string::npos);
  CHECK(coh["provenance"]["state_metadata"]["family"] == "coherent");

  const Json w = measure_json("coh2.json --method wigner --grid 128");
  CHECK(w["path"] == "wigner");
  CHECK(std::abs(w["chi2"].get<double>() - 2) < 5e-3);
}

TEST_CASE("measure round-trips the in-process values exactly") {
  REQUIRE(run(kDir, "state cat alpha=1.2 alpha_im=0.3 phase=0.4 -o cat.json").exit_code == 0);
  const Json j = measure_json("cat.json");
  const StateFile file = build_state("cat", {{"alpha", "1.2"}, {"alpha_im", "0.3"}, {"phase", "0.4"}});
  const MeasureReport r = pure_state_measures(std::get<PureState>(file.state));
  CHECK(j["I"].get<double>() == r.I);
  CHECK(j["C"].get<double>() == r.C);
  CHECK(j["P"].get<double>() == r.P);
  CHECK(j["chi2"].get<double>() == r.chi2);
}

TEST_CASE("measure command errors") {
  REQUIRE(run(kDir, "state fock n=1 -o f1.json").exit_code == 0);
  auto r = run(kDir, "measure f1.json --method both --tol 1e-9");
  CHECK(r.exit_code == kExitConsistency);
  CHECK(r.out.find("\"operator\"") != std::string::npos);
  CHECK(r.out.find("\"wigner\"") != std::string::npos);

  CHECK(run(kDir, "measure f1.json --method sideways").exit_code == kExitUsage);
  CHECK(run(kDir, "measure missing.json").exit_code == kExitUsage);
  REQUIRE(run(kDir, "state product left=f1.json right=f1.json -o ff.json").exit_code == 0);
  CHECK(run(kDir, "measure ff.json --method wigner").exit_code == kExitUsage);
  CHECK(run(kDir, "measure ff.json").exit_code == 0);
  REQUIRE(run(kDir, "state cat alpha=3 -o cat3.json").exit_code == 0);
  CHECK(run(kDir, "measure cat3.json --method wigner --grid 40").exit_code == kExitTruncation);

  // Trace 0.9.
  Json doc = state_to_json(StateFile{fock_mixture({1, 4}, 2, true), {}});
  doc["data"][0][0] = Json::array({0.4, 0.0});
  write_text_file(kDir / "bad.json", doc.dump());
  r = run(kDir, "measure bad.json");
  CHECK(r.exit_code == kExitVerificationFailed);
  CHECK(r.err.find("trace") != std::string::npos);
}

TEST_CASE("sweep command") {
  SUBCASE("thermal chi2 column") {
    REQUIRE(run(kDir, "sweep --family thermal --param a --start 1 --stop 5 --steps 9 -o thermal.csv").exit_code == 0);
    const auto rows = read_csv(kDir / "thermal.csv");
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"parameter", "I", "C", "P", "chi2", "error"});
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double a = std::stod(rows[k][0]);
      const double chi2 = std::stod(rows[k][4]);
      CHECK(a == doctest::Approx(1 + 0.5 * (k - 1)));
      CHECK(std::abs(chi2 - 2 / (a * a)) < 1e-6);
      CHECK(chi2 > 0);
      CHECK(chi2 <= 2);
      if (a > 1) CHECK(chi2 < 2);
    }
    const Json sidecar = read_json_file(kDir / "thermal.csv.json");
    CHECK(sidecar.contains("generated_at"));
    CHECK(sidecar["points"].size() == 9);
    CHECK(sidecar["points"][4]["report"]["convention_note"].is_string());
  }
  SUBCASE("fock I column") {
    REQUIRE(run(kDir, "sweep --family fock --param n --values 3,0,2,1 -o fock.csv").exit_code == 0);
    const auto rows = read_csv(kDir / "fock.csv");
    REQUIRE(rows.size() == 5);
    for (int n = 0; n < 4; ++n) {
      CHECK(rows[n + 1][0] == std::to_string(n));
      CHECK(std::abs(std::stod(rows[n + 1][1]) - n) < 1e-10);
    }
  }
  SUBCASE("cat-mixture I column follows -alpha^2 e^{-4 alpha^2}") {
    REQUIRE(run(kDir, "sweep --family cat-mixture --param alpha --values 0.5,1,2,3 -o cm.csv").exit_code == 0);
    const auto rows = read_csv(kDir / "cm.csv");
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const double alpha = std::stod(rows[k][0]);
      CHECK(std::abs(std::stod(rows[k][1]) + alpha * alpha * std::exp(-4 * alpha * alpha)) < 1e-10);
    }
  }
  SUBCASE("fock-mixture with the vacuum has constant I and chi2") {
    REQUIRE(run(kDir, "sweep --family fock-mixture --param d --values 1,2,3,5,8 --set include_vacuum=true -o fm.csv")
                .exit_code == 0);
    const auto rows = read_csv(kDir / "fm.csv");
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(std::abs(std::stod(rows[k][1])) < 1e-12);
      CHECK(std::abs(std::stod(rows[k][4]) - 2) < 1e-10);
    }
  }
  SUBCASE("failing points are recorded") {
    REQUIRE(run(kDir, "sweep --family fock --param n --values 1,20 --truncation 10 -o partial.csv").exit_code == 0);
    const auto rows = read_csv(kDir / "partial.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][5].empty());
    CHECK(rows[2][1].empty());
    CHECK(rows[2][5].find("truncation") != std::string::npos);
    CHECK(run(kDir, "sweep --family fock --param n --values 20 --truncation 10 -o none.csv").exit_code != 0);
  }
  SUBCASE("invalid sweeps") {
    CHECK(run(kDir, "sweep --family thermal --param d --values 1 -o x.csv").exit_code == kExitUsage);
    CHECK(run(kDir, "sweep --family thermal --param beta --values 1 -o x.csv").exit_code == kExitUsage);
    CHECK(run(kDir, "sweep --family thermal --param a --start 1 --stop 2 --steps 0 -o x.csv").exit_code == kExitUsage);
    CHECK(run(kDir, "sweep --family fock --param n --values 1.5 -o x.csv").exit_code == kExitUsage);
    CHECK(run(kDir, "sweep --family thermal --param a -o x.csv").exit_code == kExitUsage);
  }
}

TEST_CASE("sweep output is deterministic") {
  const std::string args = "sweep --family cat --param alpha --start 0.5 --stop 2.5 --steps 7 --set phase=1 -o ";
  REQUIRE(run(kDir, args + "d1.csv").exit_code == 0);
  REQUIRE(run(kDir, args + "d2.csv").exit_code == 0);
  CHECK(cli_runner::slurp(kDir / "d1.csv") == cli_runner::slurp(kDir / "d2.csv"));
  Json s1 = read_json_file(kDir / "d1.csv.json"), s2 = read_json_file(kDir / "d2.csv.json");
  s1.erase("generated_at");
  s2.erase("generated_at");
  CHECK(s1 == s2);
}

TEST_CASE("wigner command") {
  REQUIRE(run(kDir, "state fock n=0 -o w_vac.json").exit_code == 0);
  REQUIRE(run(kDir, "wigner w_vac.json --grid 257 -o vac.json").exit_code == 0);
  const PhaseSpaceGrid vac = grid_from_json(read_json_file(kDir / "vac.json"));
  CHECK(std::abs(vac.at(128, 128) - 1 / std::numbers::pi) < 1e-6);
  CHECK(*std::max_element(vac.values.begin(), vac.values.end()) == vac.at(128, 128));

  REQUIRE(run(kDir, "state thermal a=2 -o w_th.json").exit_code == 0);
  REQUIRE(run(kDir, "wigner w_th.json --grid 257 -o th.json").exit_code == 0);
  const PhaseSpaceGrid th = grid_from_json(read_json_file(kDir / "th.json"));
  CHECK(std::abs(*std::max_element(th.values.begin(), th.values.end()) - 1 / (4 * std::numbers::pi)) < 1e-9);

  REQUIRE(run(kDir, "state fock n=1 -o w_f1.json").exit_code == 0);
  REQUIRE(run(kDir, "wigner w_f1.json --grid 129 --half-width 6 -o f1.csv").exit_code == 0);
  const auto rows = read_csv(kDir / "f1.csv");
  REQUIRE(rows.size() == 129 * 129 + 1);
  CHECK(rows[0] == std::vector<std::string>{"q", "p", "w"});
  const auto& centre = rows[1 + 64 * 129 + 64];
  CHECK(std::stod(centre[0]) == 0.0);
  CHECK(std::stod(centre[1]) == 0.0);
  CHECK(std::abs(std::stod(centre[2]) + 1 / std::numbers::pi) < 1e-6);

  REQUIRE(run(kDir, "state product left=w_vac.json right=w_vac.json -o w_vv.json").exit_code == 0);
  CHECK(run(kDir, "wigner w_vv.json -o vv.csv").exit_code == kExitUsage);
  CHECK(run(kDir, "wigner w_vac.json --grid 8 -o small.csv").exit_code == kExitUsage);
}

TEST_CASE("verify command") {
  auto r = run(kDir, "verify --grid 128 --json summary.json");
  CHECK_MESSAGE(r.exit_code == 0, r.out);
  CHECK(r.out.find("[INFO]") != std::string::npos);
  CHECK(r.out.find("[FAIL]") == std::string::npos);
  const Json summary = read_json_file(kDir / "summary.json");
  CHECK(summary.contains("generated_at"));

  Json doc = state_to_json(StateFile{fock_mixture({1, 4}, 2, true), {}});
  doc["data"][0][0] = Json::array({0.4, 0.0});
  write_text_file(kDir / "corrupt.json", doc.dump());
  REQUIRE(run(kDir, "state thermal a=1.3 -o good.json").exit_code == 0);
  r = run(kDir, "verify --grid 128 --corpus good.json corrupt.json");
  CHECK(r.exit_code == kExitVerificationFailed);
  CHECK(r.out.find("[FAIL]") != std::string::npos);
  CHECK(r.out.find("trace") != std::string::npos);
}

#include "macroq/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <functional>
#include <numbers>
#include <random>

#include "macroq/errors.hpp"
#include "macroq/measures.hpp"
#include "macroq/random_states.hpp"
#include "macroq/wigner.hpp"

namespace macroq {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// |value - expected| measured relative to max(1, |expected|).
double scaled_error(double value, double expected) {
  return std::abs(value - expected) / std::max(1.0, std::abs(expected));
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

CheckResult run_check(const std::string& name, const std::function<Outcome()>& body) {
  CheckResult result{name, CheckStatus::Pass, ""};
  try {
    Outcome outcome = body();
    result.status = outcome.passed ? CheckStatus::Pass : CheckStatus::Fail;
    result.detail = outcome.detail;
  } catch (const std::exception& e) {
    result.status = CheckStatus::Fail;
    result.detail = e.what();
  }
  return result;
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

DensityMatrix thermal(double a) {
  const GaussianSpec g{a};
  return thermal_state({1, default_truncation_thermal(g)}, g);
}

}  // namespace

std::vector<NamedState> reference_corpus() {
  const ModeSpec small{1, 10};
  const auto coherent_spec = [](Complex alpha) { return ModeSpec{1, default_truncation_coherent(alpha)}; };
  const ModeSpec pair_spec{1, 20};
  std::vector<NamedState> out;
  out.push_back({"vacuum", fock_state(small, 0).projector()});
  out.push_back({"fock n=1", fock_state(small, 1).projector()});
  out.push_back({"fock n=3", fock_state(small, 3).projector()});
  out.push_back({"coherent alpha=1", coherent_state(coherent_spec(1.0), 1.0).projector()});
  out.push_back({"coherent alpha=1+0.5i", coherent_state(coherent_spec({1.0, 0.5}), {1.0, 0.5}).projector()});
  out.push_back({"even cat alpha=1.5", cat_state(coherent_spec(1.5), 1.5, 0.0).projector()});
  out.push_back({"odd cat alpha=1", cat_state(coherent_spec(1.0), 1.0, std::numbers::pi).projector()});
  out.push_back({"cat mixture alpha=1", cat_mixture(coherent_spec(1.0), 1.0)});
  out.push_back({"fock mixture d=3 with vacuum", fock_mixture(small, 3, true)});
  out.push_back({"thermal a=sqrt2", thermal(std::sqrt(2.0))});
  out.push_back({"thermal a=1.2 x cat mixture alpha=1",
                 product_state(thermal_state(pair_spec, {1.2}), cat_mixture(pair_spec, 1.0))});
  out.push_back({"vacuum x fock n=1", product_state(fock_state(small, 0).projector(), fock_state(small, 1).projector())});
  return out;
}

double cross_pipeline_tolerance(int grid_points) { return grid_points >= 256 ? 1e-3 : 5e-3; }
double resolution_tolerance(int grid_points) { return grid_points >= 256 ? 1e-4 : 5e-3; }

bool VerifySummary::passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

std::string to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Info: return "INFO";
  }
  return "?";
}

Json summary_to_json(const VerifySummary& summary) {
  Json checks = Json::array();
  for (const auto& c : summary.checks) checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"detail", c.detail}});
  return {{"passed", summary.passed()}, {"generated_at", iso_timestamp()}, {"checks", std::move(checks)}};
}

VerifySummary run_verification(const VerifyOptions& options) {
  const double s = options.tol_scale;
  Tolerances tol = kTolerances;
  tol.identity_residual *= s;
  tol.pure_relation *= s;
  tol.three_vs_two_term *= s;
  tol.cross_pipeline = cross_pipeline_tolerance(options.grid_points) * s;
  tol.resolution = resolution_tolerance(options.grid_points) * s;

  VerifySummary summary;
  auto& checks = summary.checks;

  checks.push_back(run_check("gaussian family, operator path", [&] {
    Outcome o;
    for (const double a : {1.0, std::sqrt(2.0), 2.0, 5.0}) {
      const MeasureReport r = measure_report(thermal(a), tol);
      const double a2 = a * a;
      const double expected_I = (1.0 - a2) / (2.0 * a2 * a2);
      const double expected_chi2 = 2.0 / a2;
      o.require(scaled_error(r.I, expected_I) < 1e-9 * s, "a=" + num(a) + ": I=" + num(r.I) + " vs " + num(expected_I));
      o.require(scaled_error(r.chi2, expected_chi2) < 1e-9 * s,
                "a=" + num(a) + ": chi2=" + num(r.chi2) + " vs " + num(expected_chi2));
      o.require(scaled_error(r.C, 1.0 / (a2 * a2)) < 1e-9 * s, "a=" + num(a) + ": C=" + num(r.C));
      o.require(scaled_error(r.P, 1.0 / a2) < 1e-9 * s, "a=" + num(a) + ": P=" + num(r.P));
      if (a > 1.0) {
        o.require(r.I < 0.0, "a=" + num(a) + ": I is not negative");
        o.require(r.chi2 > 0.0 && r.chi2 < 2.0, "a=" + num(a) + ": chi2 outside (0, 2)");
      }
    }
    o.detail = o.passed ? "I=(1-a^2)/(2a^4), chi2=2/a^2, C=1/a^4, P=1/a^2 for a in {1, sqrt2, 2, 5}" : o.detail;
    return o;
  }));

  checks.push_back(run_check("gaussian family, wigner path", [&] {
    Outcome o;
    double worst = 0.0;
    for (const double a : {1.0, std::sqrt(2.0), 2.0, 5.0}) {
      const DensityMatrix rho = thermal(a);
      const auto cmp = compare_pipelines(rho, GridSpec::for_truncation(rho.spec().truncation, options.grid_points), tol);
      const double a2 = a * a;
      const double err = std::max({std::abs(cmp.wigner_path.C * a2 * a2 - 1.0), std::abs(cmp.wigner_path.P * a2 - 1.0),
                                   std::abs(cmp.wigner_path.chi2 * a2 / 2.0 - 1.0)});
      worst = std::max(worst, err);
      o.require(err < tol.cross_pipeline, "a=" + num(a) + ": relative error " + sci(err));
    }
    if (o.passed) o.detail = "max relative error " + sci(worst) + " (tolerance " + sci(tol.cross_pipeline) + ")";
    return o;
  }));

  checks.push_back(run_check("fock mixture with vacuum: I=0, chi2=2", [&] {
    Outcome o;
    for (const int d : {1, 2, 3, 5, 8}) {
      const MeasureReport r = measure_report(fock_mixture({1, d + 10}, d, true), tol);
      o.require(std::abs(r.I) < 1e-12 * s, "d=" + std::to_string(d) + ": I=" + num(r.I));
      o.require(std::abs(r.chi2 - 2.0) < 1e-10 * s, "d=" + std::to_string(d) + ": chi2=" + num(r.chi2));
    }
    if (o.passed) o.detail = "d in {1,2,3,5,8}";
    return o;
  }));

  {
    // Levels 1..d versus 0..d-1: only the vacuum-inclusive range has I = 0;
    // levels 1..d give exactly 1/d^2.
    std::string detail;
    bool agrees = true;
    try {
      for (const int d : {1, 2, 3, 5, 8}) {
        const double with_vacuum = measure_I(fock_mixture({1, d + 10}, d, true), tol);
        const double without = measure_I(fock_mixture({1, d + 11}, d, false), tol);
        agrees = agrees && std::abs(without - 1.0 / (d * d)) < 1e-12 * s;
        detail += "d=" + std::to_string(d) + ": I(0..d-1)=" + num(with_vacuum) + ", I(1..d)=" + num(without) + "; ";
      }
      detail += agrees ? "levels 1..d give 1/d^2; the I=0 statement holds for the vacuum-inclusive range"
                       : "levels 1..d deviate from 1/d^2";
    } catch (const std::exception& e) {
      agrees = false;
      detail = e.what();
    }
    checks.push_back({"fock mixture index convention", agrees ? CheckStatus::Info : CheckStatus::Fail, detail});
  }

  checks.push_back(run_check("cat mixture closed form", [&] {
    Outcome o;
    std::string info;
    for (const double alpha : {0.5, 1.0, 2.0, 3.0}) {
      const MeasureReport r = measure_report(cat_mixture({1, default_truncation_coherent(alpha)}, alpha), tol);
      // Exact for the untruncated mixture: I = -|alpha|^2 s^2,
      // P = (1 + s^2)/2, s = exp(-2|alpha|^2).
      const double s2 = std::exp(-4.0 * alpha * alpha);
      const double expected_I = -alpha * alpha * s2;
      const double expected_P = 0.5 * (1.0 + s2);
      const double expected_chi2 = 2.0 + 4.0 * expected_I / expected_P;
      o.require(std::abs(r.I - expected_I) < 1e-9 * s, "alpha=" + num(alpha) + ": I=" + num(r.I) + " vs " + num(expected_I));
      o.require(std::abs(r.P - expected_P) < 1e-9 * s, "alpha=" + num(alpha) + ": P=" + num(r.P));
      o.require(std::abs(r.chi2 - expected_chi2) < 1e-8 * s, "alpha=" + num(alpha) + ": chi2=" + num(r.chi2));
      info += "alpha=" + num(alpha) + ": I=" + sci(r.I) + ", chi2-2=" + sci(r.chi2 - 2.0) + "; ";
    }
    if (o.passed) o.detail = info + "I -> 0 and chi2 -> 2 only once the two coherent states are well separated";
    return o;
  }));

  const std::vector<NamedState> corpus = reference_corpus();
  std::vector<MeasureReport> corpus_reports;

  checks.push_back(run_check("identity I = (C - M P)/2 on reference corpus", [&] {
    Outcome o;
    double worst = 0.0, worst_two_term = 0.0;
    for (const auto& [name, rho] : corpus) {
      const MeasureReport r = measure_report(rho, tol);
      corpus_reports.push_back(r);
      worst = std::max(worst, r.identity_residual);
      worst_two_term = std::max(worst_two_term, r.two_term_delta);
    }
    o.require(worst < tol.identity_residual, "identity residual " + sci(worst));
    o.require(worst_two_term < tol.three_vs_two_term, "three-term vs two-term " + sci(worst_two_term));
    if (o.passed) {
      o.detail = std::to_string(corpus.size()) + " states, max residual " + sci(worst) + ", three-vs-two-term " +
                 sci(worst_two_term);
    }
    return o;
  }));

  checks.push_back(run_check("chi2 positive, I takes both signs", [&] {
    Outcome o;
    bool negative_seen = false;
    for (std::size_t i = 0; i < corpus_reports.size(); ++i) {
      o.require(corpus_reports[i].chi2 > 0.0, corpus[i].name + ": chi2=" + num(corpus_reports[i].chi2));
      negative_seen = negative_seen || corpus_reports[i].I < 0.0;
    }
    o.require(!corpus_reports.empty(), "corpus reports missing");
    o.require(negative_seen, "no state with I < 0 in the corpus");
    return o;
  }));

  checks.push_back(run_check("pure-state relation I = chi2/4 - M/2", [&] {
    Outcome o;
    std::mt19937_64 rng(20240601);
    double worst = 0.0;
    for (int k = 0; k < options.random_single_mode; ++k)
      worst = std::max(worst, *pure_state_measures(random_pure_state({1, 12}, rng), tol).pure_relation_residual);
    for (int k = 0; k < options.random_two_mode; ++k)
      worst = std::max(worst, *pure_state_measures(random_pure_state({2, 8}, rng), tol).pure_relation_residual);
    o.require(worst < tol.pure_relation, "residual " + sci(worst));
    if (o.passed) {
      o.detail = std::to_string(options.random_single_mode) + " one-mode + " + std::to_string(options.random_two_mode) +
                 " two-mode random states, max residual " + sci(worst);
    }
    return o;
  }));

  checks.push_back(run_check("dual pipeline (operator vs wigner)", [&] {
    Outcome o;
    const std::vector<std::pair<std::string, DensityMatrix>> states = {
        {"vacuum", fock_state({1, 10}, 0).projector()},
        {"fock n=1", fock_state({1, 10}, 1).projector()},
        {"coherent alpha=1", coherent_state({1, default_truncation_coherent(1.0)}, 1.0).projector()},
        {"cat alpha=1.5", cat_state({1, default_truncation_coherent(1.5)}, 1.5, 0.0).projector()},
        {"cat mixture alpha=1", cat_mixture({1, default_truncation_coherent(1.0)}, 1.0)},
        {"thermal a=sqrt2", thermal(std::sqrt(2.0))},
    };
    double worst = 0.0;
    for (const auto& [name, rho] : states) {
      const int n = rho.spec().truncation;
      const auto coarse = compare_pipelines(rho, GridSpec::for_truncation(n, options.grid_points), tol);
      worst = std::max(worst, coarse.max_relative_delta());
      o.require(coarse.max_relative_delta() < tol.cross_pipeline,
                name + ": relative delta " + sci(coarse.max_relative_delta()));
      o.require(std::abs(coarse.delta_I) < tol.cross_pipeline * std::max(1.0, std::abs(coarse.operator_path.I)),
                name + ": I delta " + sci(coarse.delta_I));
      if (options.check_refinement) {
        const auto fine = compare_pipelines(rho, GridSpec::for_truncation(n, 2 * options.grid_points), tol);
        const auto reduced = [](double before, double after) {
          return after < before || (before <= 1e-12 && after <= 1e-12);
        };
        o.require(reduced(coarse.delta_C, fine.delta_C) && reduced(coarse.delta_P, fine.delta_P),
                  name + ": refinement did not reduce the discrepancy");
      }
    }
    if (o.passed) o.detail = "max relative delta " + sci(worst) + " at " + std::to_string(options.grid_points) + "^2";
    return o;
  }));

  checks.push_back(run_check("tensor composition", [&] {
    Outcome o;
    const ModeSpec spec{1, 20};
    const DensityMatrix r1 = thermal_state(spec, {1.2});
    const DensityMatrix r2 = cat_mixture(spec, 1.0);
    const DensityMatrix joint = product_state(r1, r2);
    const double p1 = purity(r1), p2 = purity(r2);
    const double expected = p2 * measure_I(r1, tol) + p1 * measure_I(r2, tol);
    const double got = measure_I(joint, tol);
    o.require(std::abs(got - expected) < 1e-9 * s, "I=" + num(got) + " vs " + num(expected));
    o.require(std::abs(purity(joint) - p1 * p2) < 1e-9 * s, "purity does not factorize");
    return o;
  }));

  checks.push_back(run_check("displacement invariance", [&] {
    Outcome o;
    const ModeSpec spec{1, 40};
    const std::vector<DensityMatrix> states = {fock_state(spec, 2).projector(), coherent_state(spec, 0.5).projector(),
                                               thermal_state(spec, {1.2}), cat_mixture(spec, 0.5)};
    for (const auto& rho : states) {
      const MeasureReport before = measure_report(rho, tol);
      for (const Complex beta : {Complex(1.0, 0.0), Complex(0.3, -0.6)}) {
        const MeasureReport after = measure_report(displace(rho, beta), tol);
        o.require(std::abs(after.I - before.I) < 1e-7 * s, "I changed by " + sci(after.I - before.I));
        o.require(std::abs(after.chi2 - before.chi2) < 1e-6 * s, "chi2 changed by " + sci(after.chi2 - before.chi2));
      }
    }
    return o;
  }));

  for (const auto& path : options.corpus_files) {
    checks.push_back(run_check("corpus file " + path.string(), [&] {
      Outcome o;
      const StateFile file = read_state(path);
      const MeasureReport r = file.is_pure() ? pure_state_measures(std::get<PureState>(file.state), tol)
                                             : measure_report(file.density(), tol);
      o.detail = "I=" + num(r.I) + ", chi2=" + num(r.chi2) + ", identity residual " + sci(r.identity_residual);
      return o;
    }));
  }
  return summary;
}

}  // namespace macroq

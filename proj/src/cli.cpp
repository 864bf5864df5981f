#include "macroq/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "macroq/errors.hpp"
#include "macroq/measures.hpp"
#include "macroq/parallel.hpp"
#include "macroq/verify.hpp"
#include "macroq/wigner.hpp"

namespace macroq {

namespace {

const std::map<std::string, std::set<std::string>>& family_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"fock", {"n", "truncation"}},
      {"coherent", {"alpha", "alpha_im", "truncation"}},
      {"cat", {"alpha", "alpha_im", "phase", "truncation"}},
      {"cat-mixture", {"alpha", "alpha_im", "truncation"}},
      {"fock-mixture", {"d", "include_vacuum", "truncation"}},
      {"thermal", {"a", "truncation"}},
      {"product", {"left", "right"}},
  };
  return keys;
}

// Sweepable parameter -> families accepting it.
const std::map<std::string, std::set<std::string>>& sweep_families() {
  static const std::map<std::string, std::set<std::string>> families = {
      {"alpha", {"coherent", "cat", "cat-mixture"}},
      {"a", {"thermal"}},
      {"d", {"fock-mixture"}},
      {"n", {"fock"}},
  };
  return families;
}

bool is_integer_param(const std::string& name) { return name == "d" || name == "n"; }

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw InvalidArgument("parameter " + key + "=" + text + " is not a number");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("parameter " + key + "=" + text + " is not an integer");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InvalidArgument("parameter " + key + "=" + text + " is not a boolean");
}

ParamMap parse_params(const std::vector<std::string>& items) {
  ParamMap params;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("expected key=value, got '" + item + "'");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

std::string format_param(const std::string& name, double value) {
  if (is_integer_param(name)) return std::to_string(static_cast<long long>(std::llround(value)));
  return format_double(value);
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return kExitUsage;
  if (dynamic_cast<const TruncationError*>(&e) || dynamic_cast<const ResolutionError*>(&e)) return kExitTruncation;
  if (dynamic_cast<const ConsistencyError*>(&e)) return kExitConsistency;
  return kExitVerificationFailed;
}

Json provenance_for(const std::string& source, const StateFile& file) {
  return {{"source", source}, {"state_metadata", file.metadata}};
}

// ---------------------------------------------------------------------------

struct StateOptions {
  std::string family;
  std::vector<std::string> params;
  std::string out;
  std::optional<int> truncation;
};

struct MeasureOptions {
  std::string state;
  std::string method = "operator";
  int grid = 256;
  std::optional<double> half_width;
  double tol = 1.0;
};

struct SweepOptions {
  std::string family;
  std::string param;
  std::optional<double> start, stop;
  int steps = 1;
  std::vector<double> values;
  std::vector<std::string> fixed;
  std::string out;
  std::optional<int> truncation;
};

struct WignerOptions {
  std::string state;
  std::string out;
  int grid = 256;
  std::optional<double> half_width;
};

struct VerifyCliOptions {
  std::vector<std::string> corpus;
  int grid = 256;
  double tol = 1.0;
  std::string json;
};

int cmd_state(const StateOptions& opt) {
  const StateFile file = build_state(opt.family, parse_params(opt.params), opt.truncation);
  write_state(opt.out, file);
  std::cout << "wrote " << opt.family << " state (" << (file.is_pure() ? "pure" : "mixed")
            << ", M=" << file.spec().num_modes << ", N=" << file.spec().truncation << ", dim=" << file.spec().dimension()
            << ") to " << opt.out << "\n";
  return kExitOk;
}

int cmd_measure(const MeasureOptions& opt) {
  if (opt.method != "operator" && opt.method != "wigner" && opt.method != "both") {
    throw InvalidArgument("--method must be operator, wigner or both");
  }
  const StateFile file = read_state(opt.state);
  const Json provenance = provenance_for(opt.state, file);
  Tolerances tol = kTolerances;
  tol.cross_pipeline = cross_pipeline_tolerance(opt.grid) * opt.tol;
  tol.resolution = resolution_tolerance(opt.grid);

  if (opt.method == "operator") {
    const MeasureReport report = file.is_pure() ? pure_state_measures(std::get<PureState>(file.state), tol)
                                                : measure_report(file.density(), tol);
    std::cout << report_to_json(report, provenance).dump(2) << "\n";
    return kExitOk;
  }

  const DensityMatrix rho = file.density();
  if (rho.spec().num_modes != 1) throw InvalidArgument("the wigner method needs a single-mode state");
  GridSpec gs = GridSpec::for_truncation(rho.spec().truncation, opt.grid);
  if (opt.half_width) gs.half_width = *opt.half_width;
  const PipelineComparison cmp = compare_pipelines(rho, gs, tol);
  const bool agree = cmp.max_relative_delta() <= tol.cross_pipeline;

  Json out;
  if (opt.method == "wigner") {
    out = report_to_json(cmp.wigner_path, provenance);
  } else {
    out["operator"] = report_to_json(cmp.operator_path, provenance);
    out["wigner"] = report_to_json(cmp.wigner_path, provenance);
    out["deltas"] = comparison_to_json(cmp);
    out["tolerance"] = tol.cross_pipeline;
  }
  if (!agree) {
    std::cerr << "error: Wigner path disagrees with operator path beyond " << tol.cross_pipeline
              << " (relative)\n";
    if (opt.method == "wigner") {
      out = {{"operator", report_to_json(cmp.operator_path, provenance)},
             {"wigner", report_to_json(cmp.wigner_path, provenance)},
             {"deltas", comparison_to_json(cmp)}};
    }
    std::cout << out.dump(2) << "\n";
    return kExitConsistency;
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

std::vector<double> sweep_points(const SweepOptions& opt) {
  if (!opt.values.empty()) {
    if (opt.start || opt.stop) throw InvalidArgument("use either --values or --start/--stop/--steps, not both");
    return opt.values;
  }
  if (is_integer_param(opt.param)) throw InvalidArgument("integer parameter " + opt.param + " needs --values");
  if (!opt.start || !opt.stop) throw InvalidArgument("sweep needs --values or --start and --stop");
  if (opt.steps < 1) throw InvalidArgument("--steps must be >= 1");
  std::vector<double> points;
  for (int k = 0; k < opt.steps; ++k) {
    points.push_back(opt.steps == 1 ? *opt.start : *opt.start + (*opt.stop - *opt.start) * k / (opt.steps - 1));
  }
  return points;
}

int cmd_sweep(const SweepOptions& opt) {
  const auto compatible = sweep_families().find(opt.param);
  if (compatible == sweep_families().end()) throw InvalidArgument("sweep parameter must be one of alpha, a, d, n");
  if (!compatible->second.count(opt.family)) {
    throw InvalidArgument("parameter " + opt.param + " cannot be swept for family " + opt.family);
  }
  const ParamMap fixed = parse_params(opt.fixed);
  if (fixed.count(opt.param)) throw InvalidArgument("--set may not fix the swept parameter " + opt.param);
  std::vector<double> points = sweep_points(opt);
  std::sort(points.begin(), points.end());
  if (is_integer_param(opt.param)) {
    for (const double v : points)
      if (v != std::floor(v)) throw InvalidArgument("parameter " + opt.param + " takes integer values");
  }

  struct Row {
    std::optional<MeasureReport> report;
    std::string error;
  };
  std::vector<Row> rows(points.size());
  parallel_for(static_cast<int>(points.size()), [&](int k) {
    try {
      ParamMap params = fixed;
      params[opt.param] = format_param(opt.param, points[k]);
      const StateFile file = build_state(opt.family, params, opt.truncation);
      rows[k].report = file.is_pure() ? pure_state_measures(std::get<PureState>(file.state))
                                      : measure_report(file.density());
    } catch (const std::exception& e) {
      rows[k].error = e.what();
    }
  });

  std::ostringstream csv;
  csv << "parameter,I,C,P,chi2,error\n";
  Json sidecar_points = Json::array();
  int succeeded = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const std::string param = format_param(opt.param, points[k]);
    csv << param << ',';
    Json point = {{"parameter", points[k]}};
    if (rows[k].report) {
      const auto& r = *rows[k].report;
      csv << format_double(r.I) << ',' << format_double(r.C) << ',' << format_double(r.P) << ','
          << format_double(r.chi2) << ",\n";
      point["report"] = report_to_json(r);
      ++succeeded;
    } else {
      std::string message = rows[k].error;
      std::replace(message.begin(), message.end(), ',', ';');
      std::replace(message.begin(), message.end(), '\n', ' ');
      csv << ",,,," << '"' << message << '"' << "\n";
      point["error"] = rows[k].error;
    }
    sidecar_points.push_back(std::move(point));
  }
  write_text_file(opt.out, csv.str());
  const Json sidecar = {{"family", opt.family},
                        {"parameter", opt.param},
                        {"fixed", fixed},
                        {"generated_at", iso_timestamp()},
                        {"points", std::move(sidecar_points)}};
  write_text_file(opt.out + ".json", sidecar.dump(2) + "\n");
  std::cout << "swept " << opt.family << " over " << opt.param << ": " << succeeded << "/" << points.size()
            << " points succeeded, wrote " << opt.out << " and " << opt.out << ".json\n";
  return succeeded > 0 ? kExitOk : kExitVerificationFailed;
}

int cmd_wigner(const WignerOptions& opt) {
  const StateFile file = read_state(opt.state);
  if (file.spec().num_modes != 1) throw InvalidArgument("Wigner grids are single-mode only");
  const DensityMatrix rho = file.density();
  GridSpec gs = GridSpec::for_truncation(rho.spec().truncation, opt.grid);
  if (opt.half_width) gs.half_width = *opt.half_width;
  const PhaseSpaceGrid grid = wigner_from_density(rho, gs);

  const std::filesystem::path out(opt.out);
  if (out.extension() == ".json") {
    write_text_file(out, grid_to_json(grid).dump() + "\n");
  } else {
    std::ofstream stream(out, std::ios::binary);
    if (!stream) throw InvalidArgument("cannot write " + opt.out);
    write_grid_csv(stream, grid);
  }
  const auto peak = std::max_element(grid.values.begin(), grid.values.end());
  const auto low = std::min_element(grid.values.begin(), grid.values.end());
  std::cout << "wrote " << grid.nq << "x" << grid.np << " grid on [-" << gs.half_width << ", " << gs.half_width
            << "]^2 to " << opt.out << "; max W = " << format_double(*peak) << ", min W = " << format_double(*low)
            << ", integral = " << format_double(integrate(grid)) << "\n";
  return kExitOk;
}

int cmd_verify(const VerifyCliOptions& opt) {
  VerifyOptions options;
  options.grid_points = opt.grid;
  options.tol_scale = opt.tol;
  for (const auto& path : opt.corpus) options.corpus_files.emplace_back(path);
  const VerifySummary summary = run_verification(options);
  for (const auto& check : summary.checks) {
    std::cout << "[" << to_string(check.status) << "] " << check.name;
    if (!check.detail.empty()) std::cout << ": " << check.detail;
    std::cout << "\n";
  }
  std::cout << (summary.passed() ? "verification passed" : "verification FAILED") << "\n";
  if (!opt.json.empty()) write_text_file(opt.json, summary_to_json(summary).dump(2) + "\n");
  return summary.passed() ? kExitOk : kExitVerificationFailed;
}

Complex alpha_from(const ParamMap& params) {
  const double re = params.count("alpha") ? parse_double("alpha", params.at("alpha")) : 0.0;
  const double im = params.count("alpha_im") ? parse_double("alpha_im", params.at("alpha_im")) : 0.0;
  if (!params.count("alpha") && !params.count("alpha_im")) throw InvalidArgument("missing parameter alpha");
  return {re, im};
}

}  // namespace

StateFile build_state(const std::string& family, const ParamMap& params, std::optional<int> truncation) {
  const auto known = family_keys().find(family);
  if (known == family_keys().end()) {
    throw InvalidArgument("unknown state family '" + family +
                          "' (expected fock, coherent, cat, cat-mixture, fock-mixture, thermal, product)");
  }
  for (const auto& [key, value] : params) {
    if (!known->second.count(key)) throw InvalidArgument("family " + family + " does not take parameter '" + key + "'");
  }
  if (params.count("truncation")) truncation = parse_int("truncation", params.at("truncation"));
  const auto require = [&](const char* key) -> const std::string& {
    const auto it = params.find(key);
    if (it == params.end()) throw InvalidArgument("family " + family + " needs parameter '" + key + "'");
    return it->second;
  };

  Json metadata = {{"family", family}, {"params", params}, {"generator", "macroq"}};
  const auto finish = [&](auto state) {
    metadata["truncation"] = state.spec().truncation;
    return StateFile{std::move(state), metadata};
  };

  if (family == "fock") {
    const int n = parse_int("n", require("n"));
    return finish(fock_state({1, truncation.value_or(std::max(n, 0) + 10)}, n));
  }
  if (family == "coherent") {
    const Complex alpha = alpha_from(params);
    return finish(coherent_state({1, truncation.value_or(default_truncation_coherent(alpha))}, alpha));
  }
  if (family == "cat") {
    const Complex alpha = alpha_from(params);
    const double phase = params.count("phase") ? parse_double("phase", params.at("phase")) : 0.0;
    return finish(cat_state({1, truncation.value_or(default_truncation_coherent(alpha))}, alpha, phase));
  }
  if (family == "cat-mixture") {
    const Complex alpha = alpha_from(params);
    return finish(cat_mixture({1, truncation.value_or(default_truncation_coherent(alpha))}, alpha));
  }
  if (family == "fock-mixture") {
    const int d = parse_int("d", require("d"));
    const bool include_vacuum = params.count("include_vacuum") ? parse_bool("include_vacuum", params.at("include_vacuum"))
                                                               : true;
    return finish(fock_mixture({1, truncation.value_or(std::max(d, 1) + 10)}, d, include_vacuum));
  }
  if (family == "thermal") {
    const GaussianSpec g{parse_double("a", require("a"))};
    g.validate();
    return finish(thermal_state({1, truncation.value_or(default_truncation_thermal(g))}, g));
  }
  // product
  const StateFile left = read_state(require("left"));
  const StateFile right = read_state(require("right"));
  metadata["left"] = left.metadata;
  metadata["right"] = right.metadata;
  if (left.is_pure() && right.is_pure()) {
    return finish(product_state(std::get<PureState>(left.state), std::get<PureState>(right.state)));
  }
  return finish(product_state(left.density(), right.density()));
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Phase-space coherence measures I and chi2 for bosonic states"};
  app.require_subcommand(1);

  StateOptions state_opt;
  auto* state_cmd = app.add_subcommand("state", "Construct a state and write it as JSON");
  state_cmd->add_option("family", state_opt.family, "fock | coherent | cat | cat-mixture | fock-mixture | thermal | product")
      ->required();
  state_cmd->add_option("params", state_opt.params, "key=value parameters (n, alpha, alpha_im, phase, d, include_vacuum, a, left, right)");
  state_cmd->add_option("-o,--out", state_opt.out, "Output state file")->required();
  state_cmd->add_option("--truncation", state_opt.truncation, "Fock levels per mode (overrides the default)");

  MeasureOptions measure_opt;
  auto* measure_cmd = app.add_subcommand("measure", "Compute I, C, P and chi2 for a state file");
  measure_cmd->add_option("state", measure_opt.state, "State file")->required();
  measure_cmd->add_option("--method", measure_opt.method, "operator | wigner | both")->capture_default_str();
  measure_cmd->add_option("--grid", measure_opt.grid, "Grid points per axis")->capture_default_str();
  measure_cmd->add_option("--half-width", measure_opt.half_width, "Grid half-width (default sqrt(2N)+5)");
  measure_cmd->add_option("--tol", measure_opt.tol, "Scale factor for the cross-pipeline tolerance")->capture_default_str();

  SweepOptions sweep_opt;
  auto* sweep_cmd = app.add_subcommand("sweep", "Measure a state family over a parameter range");
  sweep_cmd->add_option("--family", sweep_opt.family, "State family")->required();
  sweep_cmd->add_option("--param", sweep_opt.param, "alpha | a | d | n")->required();
  sweep_cmd->add_option("--start", sweep_opt.start, "First value");
  sweep_cmd->add_option("--stop", sweep_opt.stop, "Last value");
  sweep_cmd->add_option("--steps", sweep_opt.steps, "Number of points, endpoints included")->capture_default_str();
  sweep_cmd->add_option("--values", sweep_opt.values, "Explicit values")->delimiter(',');
  sweep_cmd->add_option("--set", sweep_opt.fixed, "Fixed key=value parameters");
  sweep_cmd->add_option("-o,--out", sweep_opt.out, "Output CSV (a .json sidecar is written next to it)")->required();
  sweep_cmd->add_option("--truncation", sweep_opt.truncation, "Fock levels per mode");

  WignerOptions wigner_opt;
  auto* wigner_cmd = app.add_subcommand("wigner", "Sample the Wigner function of a single-mode state");
  wigner_cmd->add_option("state", wigner_opt.state, "State file")->required();
  wigner_cmd->add_option("-o,--out", wigner_opt.out, "Output grid (.csv or .json)")->required();
  wigner_cmd->add_option("--grid", wigner_opt.grid, "Grid points per axis")->capture_default_str();
  wigner_cmd->add_option("--half-width", wigner_opt.half_width, "Grid half-width (default sqrt(2N)+5)");

  VerifyCliOptions verify_opt;
  auto* verify_cmd = app.add_subcommand("verify", "Run the built-in invariant and reference-value checks");
  verify_cmd->add_option("--corpus", verify_opt.corpus, "Extra state files to validate and measure");
  verify_cmd->add_option("--grid", verify_opt.grid, "Grid points per axis for the Wigner checks")->capture_default_str();
  verify_cmd->add_option("--tol", verify_opt.tol, "Scale factor for every tolerance")->capture_default_str();
  verify_cmd->add_option("--json", verify_opt.json, "Write a JSON summary here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*state_cmd) return cmd_state(state_opt);
    if (*measure_cmd) return cmd_measure(measure_opt);
    if (*sweep_cmd) return cmd_sweep(sweep_opt);
    if (*wigner_cmd) return cmd_wigner(wigner_opt);
    if (*verify_cmd) return cmd_verify(verify_opt);
  } catch (const TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTruncation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return kExitUsage;
}

}  // namespace macroq

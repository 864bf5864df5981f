#include "macroq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "macroq/errors.hpp"

namespace macroq {

namespace {

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw InvalidArgument("expected a [re, im] pair, got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename T>
T field(const Json& doc, const char* key) {
  if (!doc.contains(key)) throw InvalidArgument(std::string("state file is missing '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("state file field '") + key + "' has the wrong type: " + e.what());
  }
}

}  // namespace

const ModeSpec& StateFile::spec() const {
  return std::visit([](const auto& s) -> const ModeSpec& { return s.spec(); }, state);
}

DensityMatrix StateFile::density() const {
  if (const auto* pure = std::get_if<PureState>(&state)) return pure->projector();
  return std::get<DensityMatrix>(state);
}

Json state_to_json(const StateFile& file) {
  Json doc;
  doc["format_version"] = kFormatVersion;
  doc["spec"] = {{"num_modes", file.spec().num_modes}, {"truncation", file.spec().truncation}};
  Json data = Json::array();
  if (const auto* pure = std::get_if<PureState>(&file.state)) {
    doc["kind"] = "pure";
    for (const auto& z : pure->amplitudes()) data.push_back(complex_json(z));
  } else {
    doc["kind"] = "mixed";
    const auto& m = std::get<DensityMatrix>(file.state).matrix();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
      data.push_back(std::move(row));
    }
  }
  doc["data"] = std::move(data);
  doc["metadata"] = file.metadata;
  return doc;
}

StateFile state_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidArgument("state file must be a JSON object");
  const int version = field<int>(doc, "format_version");
  if (version != kFormatVersion) {
    throw InvalidArgument("unsupported state format_version " + std::to_string(version));
  }
  const Json spec_doc = field<Json>(doc, "spec");
  const ModeSpec spec{field<int>(spec_doc, "num_modes"), field<int>(spec_doc, "truncation")};
  spec.validate();
  const auto kind = field<std::string>(doc, "kind");
  const Json data = field<Json>(doc, "data");
  if (!data.is_array()) throw InvalidArgument("state 'data' must be an array");
  const std::size_t dim = spec.dimension();
  Json metadata = doc.contains("metadata") ? doc["metadata"] : Json::object();

  if (kind == "pure") {
    if (data.size() != dim) {
      throw ValidationError("pure state has " + std::to_string(data.size()) + " amplitudes, expected " +
                            std::to_string(dim));
    }
    std::vector<Complex> amps;
    amps.reserve(dim);
    for (const auto& z : data) amps.push_back(complex_from(z));
    return {PureState(spec, std::move(amps)), std::move(metadata)};
  }
  if (kind == "mixed") {
    if (data.size() != dim) {
      throw ValidationError("density matrix has " + std::to_string(data.size()) + " rows, expected " +
                            std::to_string(dim));
    }
    ComplexMatrix m(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      if (!data[r].is_array() || data[r].size() != dim) {
        throw ValidationError("density matrix row " + std::to_string(r) + " does not have " + std::to_string(dim) +
                              " entries");
      }
      for (std::size_t c = 0; c < dim; ++c) m(r, c) = complex_from(data[r][c]);
    }
    return {DensityMatrix(spec, std::move(m)), std::move(metadata)};
  }
  throw InvalidArgument("state 'kind' must be \"pure\" or \"mixed\", got \"" + kind + "\"");
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidArgument(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed while writing " + path.string());
}

void write_state(const std::filesystem::path& path, const StateFile& file) {
  write_text_file(path, state_to_json(file).dump(1) + "\n");
}

StateFile read_state(const std::filesystem::path& path) { return state_from_json(read_json_file(path)); }

Json report_to_json(const MeasureReport& report, const Json& provenance) {
  Json doc;
  doc["path"] = to_string(report.path);
  doc["I"] = report.I;
  doc["C"] = report.C;
  doc["P"] = report.P;
  doc["chi2"] = report.chi2;
  doc["num_modes"] = report.num_modes;
  doc["truncation"] = report.truncation;
  doc["identity_residual"] = report.identity_residual;
  doc["convention_note"] = report.convention_note;
  Json diag;
  diag["top_level_population"] = report.top_level_population;
  if (report.path == MeasurePath::Operator) diag["two_term_delta"] = report.two_term_delta;
  if (report.pure_relation_residual) diag["pure_relation_residual"] = *report.pure_relation_residual;
  if (report.grid_half_width) diag["grid_half_width"] = *report.grid_half_width;
  if (report.grid_points) diag["grid_points"] = *report.grid_points;
  if (report.resolution_estimate) diag["resolution_estimate"] = *report.resolution_estimate;
  doc["diagnostics"] = std::move(diag);
  doc["provenance"] = provenance;
  return doc;
}

Json comparison_to_json(const PipelineComparison& cmp) {
  return {{"delta_C", cmp.delta_C},
          {"delta_P", cmp.delta_P},
          {"delta_chi2", cmp.delta_chi2},
          {"delta_I", cmp.delta_I},
          {"max_relative_delta", cmp.max_relative_delta()}};
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_grid_csv(std::ostream& out, const PhaseSpaceGrid& grid) {
  out << "q,p,w\n";
  for (int i = 0; i < grid.nq; ++i)
    for (int j = 0; j < grid.np; ++j)
      out << format_double(grid.q(i)) << ',' << format_double(grid.p(j)) << ',' << format_double(grid.at(i, j))
          << '\n';
}

Json grid_to_json(const PhaseSpaceGrid& grid) {
  Json values = Json::array();
  for (int i = 0; i < grid.nq; ++i) {
    Json row = Json::array();
    for (int j = 0; j < grid.np; ++j) row.push_back(grid.at(i, j));
    values.push_back(std::move(row));
  }
  return {{"format_version", kFormatVersion},
          {"grid_spec",
           {{"q_min", grid.q_min},
            {"q_max", grid.q_max},
            {"p_min", grid.p_min},
            {"p_max", grid.p_max},
            {"nq", grid.nq},
            {"np", grid.np}}},
          {"values", std::move(values)}};
}

PhaseSpaceGrid grid_from_json(const Json& doc) {
  try {
    const auto& gs = doc.at("grid_spec");
    PhaseSpaceGrid grid;
    grid.q_min = gs.at("q_min").get<double>();
    grid.q_max = gs.at("q_max").get<double>();
    grid.p_min = gs.at("p_min").get<double>();
    grid.p_max = gs.at("p_max").get<double>();
    grid.nq = gs.at("nq").get<int>();
    grid.np = gs.at("np").get<int>();
    const auto& values = doc.at("values");
    if (grid.nq < 2 || grid.np < 2 || !(grid.q_min < grid.q_max) || !(grid.p_min < grid.p_max) ||
        values.size() != static_cast<std::size_t>(grid.nq)) {
      throw InvalidArgument("grid document has inconsistent dimensions");
    }
    grid.values.reserve(static_cast<std::size_t>(grid.nq) * grid.np);
    for (const auto& row : values) {
      if (row.size() != static_cast<std::size_t>(grid.np)) throw InvalidArgument("grid row has the wrong length");
      for (const auto& v : row) grid.values.push_back(v.get<double>());
    }
    return grid;
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("malformed grid document: ") + e.what());
  }
}

}  // namespace macroq

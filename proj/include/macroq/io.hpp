#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include <json.hpp>

#include "macroq/measures.hpp"
#include "macroq/states.hpp"
#include "macroq/wigner.hpp"

namespace macroq {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// A state as stored on disk: pure amplitudes or a density matrix, plus
// free-form provenance.
struct StateFile {
  std::variant<PureState, DensityMatrix> state;
  Json metadata = Json::object();

  const ModeSpec& spec() const;
  bool is_pure() const { return std::holds_alternative<PureState>(state); }
  DensityMatrix density() const;
};

Json state_to_json(const StateFile& file);
// Throws InvalidArgument on malformed documents and ValidationError /
// TruncationError when the stored state breaks an invariant.
StateFile state_from_json(const Json& doc);

void write_state(const std::filesystem::path& path, const StateFile& file);
StateFile read_state(const std::filesystem::path& path);

Json report_to_json(const MeasureReport& report, const Json& provenance = Json::object());
Json comparison_to_json(const PipelineComparison& cmp);

// "q,p,w" header then one row per sample, q slow, 17 significant digits.
void write_grid_csv(std::ostream& out, const PhaseSpaceGrid& grid);
Json grid_to_json(const PhaseSpaceGrid& grid);
PhaseSpaceGrid grid_from_json(const Json& doc);

// %.17g
std::string format_double(double value);

Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace macroq

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "macroq/io.hpp"
#include "macroq/states.hpp"

namespace macroq {

struct NamedState {
  std::string name;
  DensityMatrix rho;
};

// Twelve reference states: Fock, coherent, even/odd cat, both mixtures, a
// thermal state and two-mode products.
std::vector<NamedState> reference_corpus();

struct VerifyOptions {
  int grid_points = 256;
  // Multiplies every tolerance below.
  double tol_scale = 1.0;
  std::vector<std::filesystem::path> corpus_files;
  // Random states for the pure-state relation.
  int random_single_mode = 50;
  int random_two_mode = 10;
  bool check_refinement = true;
};

// Phase-space tolerances depend on the grid: 1e-3 at 256 points per axis or
// more, 5e-3 below.
double cross_pipeline_tolerance(int grid_points);
double resolution_tolerance(int grid_points);

enum class CheckStatus { Pass, Fail, Info };

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct VerifySummary {
  std::vector<CheckResult> checks;
  bool passed() const;
};

VerifySummary run_verification(const VerifyOptions& options);

std::string to_string(CheckStatus status);
Json summary_to_json(const VerifySummary& summary);

}  // namespace macroq

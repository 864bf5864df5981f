#include "macroq/random_states.hpp"

#include <cmath>
#include <vector>

#include "macroq/errors.hpp"

namespace macroq {

PureState random_pure_state(const ModeSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  std::normal_distribution<double> gauss;
  const auto n = static_cast<std::size_t>(spec.truncation);
  std::vector<Complex> amps(spec.dimension());
  double norm2 = 0.0;
  for (std::size_t index = 0; index < amps.size(); ++index) {
    bool interior = true;
    std::size_t rest = index;
    for (int m = 0; m < spec.num_modes; ++m, rest /= n)
      if (rest % n == n - 1) interior = false;
    if (!interior) continue;
    amps[index] = Complex(gauss(rng), gauss(rng));
    norm2 += std::norm(amps[index]);
  }
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& z : amps) z *= scale;
  return PureState(spec, std::move(amps));
}

DensityMatrix random_mixed_state(const ModeSpec& spec, std::mt19937_64& rng, int components) {
  if (components < 1) throw InvalidArgument("random_mixed_state needs at least one component");
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> weights(static_cast<std::size_t>(components));
  double total = 0.0;
  for (auto& w : weights) total += (w = expo(rng));
  std::vector<std::pair<double, DensityMatrix>> parts;
  parts.reserve(weights.size());
  for (const double w : weights) parts.emplace_back(w / total, random_pure_state(spec, rng).projector());
  // Renormalizing the weights can leave a rounding error of a few ulp.
  const double drift = 1.0 - [&] {
    double s = 0.0;
    for (const auto& p : parts) s += p.first;
    return s;
  }();
  parts.front().first += drift;
  return mix(parts);
}

}  // namespace macroq

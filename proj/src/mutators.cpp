#include "biome/mutators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace biome {

std::string_view to_string(MutatorKind k) { return k == MutatorKind::Adaptive ? "adaptive" : "basic"; }

MutatorKind parse_mutator_kind(std::string_view name) {
  if (name == "basic") return MutatorKind::Basic;
  if (name == "adaptive") return MutatorKind::Adaptive;
  throw std::invalid_argument("unknown mutator '" + std::string(name) + "'");
}

void MutatorConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(update_prob) || !prob(meta_update_prob))
    throw std::invalid_argument("mutator probabilities must be in [0, 1]");
  if (!(base_sigma >= 0.0) || !(meta_sigma >= 0.0))
    throw std::invalid_argument("mutator sigmas must be non-negative");
}

std::vector<float> mutate_basic(std::vector<float> params, double sigma, Rng& rng,
                                double update_prob) {
  for (float& v : params) {
    // Both draws are always consumed so the stream layout does not depend on
    // the parameter values.
    const bool update = rng.bernoulli(update_prob);
    const double noise = rng.normal();
    if (update) v = static_cast<float>(v + sigma * noise);
  }
  return params;
}

std::vector<float> mutate_adaptive(std::vector<float> params_with_sigmas, Rng& rng,
                                   const MutatorConfig& config) {
  if (params_with_sigmas.size() % 2 != 0)
    throw std::invalid_argument("adaptive mutator expects [params || sigmas]");
  const std::size_t n = params_with_sigmas.size() / 2;
  for (std::size_t i = 0; i < n; ++i) {
    float& value = params_with_sigmas[i];
    float& sigma = params_with_sigmas[n + i];
    const bool update = rng.bernoulli(config.update_prob);
    const double noise = rng.normal();
    if (update) value = static_cast<float>(value + sigma * noise);
    const bool meta = rng.bernoulli(config.meta_update_prob);
    const double meta_noise = rng.normal();
    if (meta) {
      const double next = sigma * std::exp(config.meta_sigma * meta_noise);
      sigma = static_cast<float>(std::clamp(next, kMinAdaptiveSigma, kMaxAdaptiveSigma));
    }
  }
  return params_with_sigmas;
}

ProgramEntry make_root_entry(AgentParams logic, const MutatorConfig& config) {
  ProgramEntry entry{std::move(logic), {}};
  if (config.kind == MutatorKind::Adaptive)
    entry.mutator_state.assign(entry.logic.values.size(), static_cast<float>(config.base_sigma));
  return entry;
}

ProgramEntry spawn_child_params(const ProgramEntry& parent, const MutatorConfig& config, Rng& rng) {
  ProgramEntry child;
  child.logic.architecture = parent.logic.architecture;
  if (config.kind == MutatorKind::Basic) {
    child.logic.values = mutate_basic(parent.logic.values, config.base_sigma, rng, config.update_prob);
    return child;
  }
  const std::size_t n = parent.logic.values.size();
  if (parent.mutator_state.size() != n)
    throw std::invalid_argument("adaptive mutator state length does not match logic length");
  std::vector<float> augmented(parent.logic.values);
  augmented.insert(augmented.end(), parent.mutator_state.begin(), parent.mutator_state.end());
  augmented = mutate_adaptive(std::move(augmented), rng, config);
  child.logic.values.assign(augmented.begin(), augmented.begin() + static_cast<std::ptrdiff_t>(n));
  child.mutator_state.assign(augmented.begin() + static_cast<std::ptrdiff_t>(n), augmented.end());
  return child;
}

}  // namespace biome

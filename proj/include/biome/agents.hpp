#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "biome/cell_type.hpp"
#include "biome/config.hpp"
#include "biome/environment.hpp"

namespace biome {

// 3x3 view around a cell. Window index 4 is the cell itself; out-of-grid
// positions read OutOfBounds with a zero state.
struct Perception {
  int state_size = 0;
  std::array<CellType, 9> types{};
  std::array<bool, 9> same{};  // same organism as the centre cell
  std::vector<double> states;  // 9 * state_size, window-major

  std::span<const double> state(int window) const {
    return {states.data() + static_cast<std::size_t>(window) * state_size,
            static_cast<std::size_t>(state_size)};
  }
  double nutrient(int window, int channel) const { return states[window * state_size + channel]; }
  CellType self() const { return types[4]; }
};

// Window index of neighbour k (0..7).
constexpr int window_of_neighbor(int k) { return k < 4 ? k : k + 1; }

Perception perceive(const Environment& env, Pos pos, bool agent_ids = true);
void perceive_into(const Environment& env, Pos pos, bool agent_ids, Perception& out);

// Untrusted outputs of the agent logic; sanitizers in ops.hpp turn them into
// valid operations.
struct ParallelInterface {
  std::array<double, kNumSpecializations> specialize_logits{};
  // Requested gift per neighbour and channel, in nutrient units.
  std::array<std::array<double, 2>, 8> gifts{};
  // Replacement internal state; empty means unchanged.
  std::vector<double> internal;
};

struct ExclusiveInterface {
  double spawn_logit = -1.0;  // spawn probability = sigmoid(spawn_logit)
  std::array<double, 8> direction_logits{};
  double child_fraction = 0.5;  // share of post-cost nutrients given to the child
};

struct ReproduceInterface {
  bool trigger = false;
};

struct AgentOutputs {
  ParallelInterface parallel;
  ExclusiveInterface exclusive;
  ReproduceInterface reproduce;
};

enum class Architecture : std::uint32_t { Minimal = 1, Extended = 2 };

std::string_view to_string(Architecture a);
Architecture parse_architecture(std::string_view name);

struct AgentParams {
  Architecture architecture = Architecture::Minimal;
  std::vector<float> values;

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

// Layout constants of the minimal logic. Every head is affine in a small set
// of hand-picked features; per-neighbour heads share weights across the eight
// directions.
namespace minimal_layout {
inline constexpr int kGlobalFeatures = 12;
inline constexpr int kDirFeatures = 8;
inline constexpr int kGiftFeatures = 8;

inline constexpr int kSpecialize = 0;  // [own 4][target 4][G]
inline constexpr int kSpawn = kSpecialize + kNumSpecializations * kNumSpecializations * kGlobalFeatures;
inline constexpr int kReproduce = kSpawn + kNumSpecializations * kGlobalFeatures;  // [G]
inline constexpr int kDirection = kReproduce + kGlobalFeatures;  // [own 4][D]
inline constexpr int kGift = kDirection + kNumSpecializations * kDirFeatures;  // [channel 2][Dg]
inline constexpr int kSize = kGift + 2 * kGiftFeatures;
}  // namespace minimal_layout

namespace extended_layout {
inline constexpr int kInternal = 8;
inline constexpr int kHidden = 170;
inline constexpr int kInputs = minimal_layout::kGlobalFeatures + kInternal + 1;
// Output deltas: 4 specialization, 1 spawn, 1 reproduce, 8 direction, 16 gifts.
inline constexpr int kOutputs = 4 + 1 + 1 + 8 + 16;

inline constexpr int kHiddenWeights = minimal_layout::kSize;  // [H][inputs]
inline constexpr int kHiddenBias = kHiddenWeights + kHidden * kInputs;
inline constexpr int kOutputWeights = kHiddenBias + kHidden;  // [outputs][H]
inline constexpr int kInternalWeights = kOutputWeights + kOutputs * kHidden;  // [internal][H]
inline constexpr int kSize = kInternalWeights + kInternal * kHidden;
}  // namespace extended_layout

std::size_t parameter_count(Architecture a);

// Hand-designed fertile initialisations. The extended vector embeds the
// minimal one and its extra output weights are zero, so both behave the same.
AgentParams init_minimal();
AgentParams init_extended();

class InvalidParams : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws InvalidParams on length mismatch or non-finite values.
void check_params(const AgentParams& params);

// Evaluates all three policy functions for one cell. Caches whether the
// extended hidden layer can influence outputs, so reuse one instance per
// program when evaluating many cells.
class AgentLogic {
 public:
  explicit AgentLogic(const AgentParams& params);
  AgentOutputs evaluate(const Perception& perception, const EnvConfig& config, double noise) const;
  const AgentParams& params() const { return *params_; }

 private:
  const AgentParams* params_;
  bool hidden_active_ = false;
};

AgentOutputs evaluate_agent(const AgentParams& params, const Perception& perception,
                            const EnvConfig& config, double noise);

ParallelInterface run_parallel(const AgentParams& params, const Perception& perception,
                               const EnvConfig& config, double noise);
ExclusiveInterface run_exclusive(const AgentParams& params, const Perception& perception,
                                 const EnvConfig& config, double noise);
ReproduceInterface run_reproduce(const AgentParams& params, const Perception& perception,
                                 const EnvConfig& config, double noise);

}  // namespace biome

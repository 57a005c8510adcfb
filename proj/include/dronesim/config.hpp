#pragma once

#include <string>
#include <vector>

#include "dronesim/agent.hpp"
#include "dronesim/environment.hpp"

namespace dronesim {

// Scenario description: everything a run needs, loadable from a flat
// "key = value" file. Unknown keys are hard errors so typos cannot
// silently fall back to defaults.
struct ScenarioConfig {
    std::uint64_t seed = 1;

    NetworkTopology topology;
    DroneKinematics drone;
    QuantizerConfig quantizer;
    RewardWeights weights;
    TrafficConfig traffic;

    double fc_ghz = 2.0;
    int frame_ttis = 10;
    double thermal_noise_dbm_hz = -174.0;
    double noise_figure_db = 0.0;
    double noise_rise_db = 48.0;
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;

    double p_max_w = 0.2;
    int power_levels = 4;
    double subcarrier_hz = 15e3;
    int sc_per_rrb = 12;
    double circuit_power_w = 0.05; // bookkeeping only, not simulated

    double tti_s = 1e-3;
    int min_ho_interval_ttis = 10;
    std::int64_t q_norm_bits = 20000;

    int train_episodes = 5000;
    double beta = 0.8;
    double visit_scale = 5.0;
    double epsilon_start = 1.0;
    double epsilon_floor = 0.05;
    double epsilon_decay = 0.995;
    // Uniform-random behavior policy (pure off-policy learning). Immune to
    // the bootstrap-recency bias that plants spurious argmax entries in
    // rarely revisited states; epsilon-greedy (0) converges tighter on its
    // own trajectory and suits long runs.
    bool pure_random = true;
    long replay_capacity = 50000;
    int batch_size = 32;
    int target_refresh = 100;

    int eval_episodes = 850;
    double heatmap_cell_m = 50.0;
    double hysteresis_db = 7.0;

    EnvConfig to_env_config() const;
    TrainConfig to_train_config() const;
};

// Reads a scenario file on top of the defaults. Throws std::runtime_error
// with the offending line for syntax errors and unknown keys.
ScenarioConfig load_config(const std::string& path);

// Applies one "key=value" override (CLI --set / sweep points).
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// Range checks beyond what the environment enforces.
void validate_config(const ScenarioConfig& cfg);

// Canonical listing, one "key = value" per line, parse round-trippable.
std::vector<std::string> serialize_config(const ScenarioConfig& cfg);

} // namespace dronesim

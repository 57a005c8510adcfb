#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dronesim/a2g_channel.hpp"
#include "dronesim/geometry.hpp"
#include "dronesim/link_layer.hpp"
#include "dronesim/traffic.hpp"

namespace dronesim {

struct NetworkTopology {
    double area_width_m = 500.0;
    double area_height_m = 500.0;
    std::vector<Position3D> bs = {
        {50.0, 100.0, 25.0}, {200.0, 400.0, 25.0}, {450.0, 50.0, 25.0}};
    int rrbs_per_bs = 4;
};

struct DroneKinematics {
    double speed_mps = 15.0;
    double altitude_m = 50.0;
};

struct RewardWeights {
    double alpha_s = 0.01;
    double alpha_d = 0.5;
    double alpha_f = 0.5;
    double alpha_h = 0.5;
};

// Path-loss bins are 5 dB wide over [60, 130); altitude and speed are
// constant within a scenario and collapse to one bin each. Queue bins are
// in packets: {0}, (0,2], (2,10], (10, inf).
struct QuantizerConfig {
    double pl_min_db = 60.0;
    double pl_max_db = 130.0;
    double pl_bin_db = 5.0;
    std::int64_t packet_bits = 2000;

    int n_pl_bins() const;
    static constexpr int n_q_bins = 4;
};

// Quantized observable state.
struct EnvState {
    std::uint8_t h_bin = 0;
    std::uint8_t v_bin = 0;
    std::uint8_t serving_bs = 0;
    std::uint8_t q_bin = 0;
    std::vector<std::uint8_t> pl_bins;
};

// What the drone can observe before quantization.
struct RawObservation {
    double altitude_m = 0.0;
    double speed_mps = 0.0;
    int serving_bs = 0;
    std::int64_t q_bits = 0;
    std::vector<double> measured_pl_db; // large-scale loss per BS
};

// Joint handover / RRB / power action. rrb_count == 0 is the distinguished
// no-transmit action (always feasible, never a handover). power_level
// indexes the discrete set {P_max / 2^k}, 0 = P_max.
struct Action {
    int target_bs = 0;
    int rrb_count = 0;
    int power_level = 0;
};

struct RewardBreakdown {
    double resource_term = 0.0;     // 1 / (1 + rrbs_used / rrbs_per_bs)
    double delay_term = 0.0;        // 1 / (1 + q_next / q_norm)
    double interference_term = 0.0; // 1 / (1 + int_mw / int_norm)
    bool handover = false;
    double total = 0.0;
};

struct EnvConfig {
    NetworkTopology topology;
    DroneKinematics drone;
    QuantizerConfig quantizer;
    RewardWeights weights;
    TrafficConfig traffic;

    double fc_ghz = 2.0;
    double p_max_w = 0.2;
    int power_levels = 4;
    double subcarrier_hz = 15e3;
    int sc_per_rrb = 12;
    double noise_density_w_hz = 3.98107170553497e-21; // -174 dBm/Hz
    double noise_figure_db = 0.0;
    // Noise rise over thermal from co-channel uplink activity in the
    // neighboring cells. A single full-power LoS interferer a few hundred
    // meters out raises the floor by ~50 dB at this geometry; 48 dB models
    // a persistently loaded network and is what makes the rate budget
    // scarce enough for grant sizing and handover timing to matter.
    double noise_rise_db = 48.0;
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;
    int frame_ttis = 10;          // shadowing / LoS resample period
    int min_ho_interval_ttis = 10;
    double tti_s = 1e-3;
    std::int64_t q_norm_bits = 20000; // reward delay normalizer (ten packets)
};

// --- state / action indexing -------------------------------------------

struct StateDims {
    int n_h = 1, n_v = 1, n_bs = 3, n_q = 4, n_pl = 14;
    int n_states() const;
};

StateDims state_dims(const NetworkTopology& topo, const QuantizerConfig& q);
int state_key(const EnvState& s, const StateDims& d);

int action_count(const NetworkTopology& topo, int power_levels);
int action_key(const Action& a, const NetworkTopology& topo, int power_levels);
Action action_from_key(int key, const NetworkTopology& topo, int power_levels);

// --- pure helpers --------------------------------------------------------

// Quantizes a raw observation. Out-of-range path losses clamp to the edge
// bins; *clamp_events (if given) is incremented once per clamped entry.
EnvState quantize(const RawObservation& raw, const QuantizerConfig& cfg,
                  long* clamp_events = nullptr);

// Representative raw observation for a quantized state (bin centers).
// quantize(dequantize(quantize(x))) == quantize(x).
RawObservation dequantize(const EnvState& s, const QuantizerConfig& cfg,
                          const DroneKinematics& drone);

// Feasible joint actions: no-transmit always; transmit actions at the
// serving BS capped by its free RRBs; other BSs only when ho_allowed.
// Keys are returned sorted ascending.
std::vector<int> feasible_actions(int serving_bs, const std::vector<int>& free_rrbs,
                                  bool ho_allowed, const NetworkTopology& topo,
                                  int power_levels);

RewardBreakdown reward_breakdown(const RewardWeights& w, int rrbs_used,
                                 int rrbs_per_bs, std::int64_t q_next_bits,
                                 std::int64_t q_norm_bits, double int_mw,
                                 double int_norm_mw, bool handover);

// Received power at P_max through the smallest achievable path loss in the
// scenario (drone directly above a BS, LoS). Normalizes the interference
// reward term.
double interference_norm_mw(const EnvConfig& cfg);

// --- the environment -----------------------------------------------------

struct StepResult {
    EnvState state;
    RewardBreakdown reward;
    bool done = false;

    // per-TTI facts for KPI accounting
    bool handover = false;
    int rrbs_used = 0;
    double tx_power_w = 0.0;
    double rate_bps = 0.0;
    std::int64_t arrived_bits = 0;
    std::int64_t served_bits = 0;
    std::int64_t dropped_bits = 0;
    std::int64_t q_before_bits = 0;
    std::int64_t q_after_bits = 0;
    double interference_mw = 0.0;
    Position3D position; // where the decision was taken
};

class Environment {
public:
    explicit Environment(const EnvConfig& cfg);

    EnvState reset(std::uint64_t seed);
    StepResult step(int action_key);
    // Action form; unlike the keyed learner surface it can express a
    // connection-level handover without transmitting (rrb_count == 0 with
    // target_bs != serving), which the RSS baseline needs.
    StepResult step(const Action& a);

    const std::vector<int>& feasible() const;
    RawObservation observation() const;

    const EnvConfig& config() const { return cfg_; }
    const StateDims& dims() const { return dims_; }
    int n_actions() const { return n_actions_; }
    double interference_norm() const { return int_norm_mw_; }
    const std::vector<int>& free_rrbs() const { return free_rrbs_; }
    int serving_bs() const { return serving_bs_; }
    int ho_timer() const { return ho_timer_; }
    bool ho_allowed() const;
    long tti() const { return tti_; }
    Position3D position() const { return pos_; }
    const BufferState& buffer() const { return buffer_; }
    long clamp_events() const { return clamp_events_; }
    double power_w(int level) const;

private:
    void prepare_tti();
    EnvState observe_quantized();

    EnvConfig cfg_;
    StateDims dims_;
    int n_actions_ = 0;
    LinkBudget budget_;
    double int_norm_mw_ = 0.0;
    double p_max_dbm_ = 0.0;

    Rng rng_;
    Position3D pos_;
    int serving_bs_ = 0;
    int ho_timer_ = 0;
    long tti_ = 0;
    BufferState buffer_;

    std::vector<int> free_rrbs_;
    std::vector<bool> los_;
    std::vector<double> shadow_db_;
    std::vector<double> measured_pl_db_; // refreshed every TTI
    long clamp_events_ = 0;

    // feasible-set cache, indexed by (ho_allowed, serving, free vector)
    bool use_cache_ = false;
    std::vector<std::vector<int>> feasible_cache_;
    mutable std::vector<int> feasible_scratch_;

    ChannelRealization serving_chan_; // reused per-TTI buffer
};

} // namespace dronesim

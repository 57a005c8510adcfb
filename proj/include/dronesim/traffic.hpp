#pragma once

#include <cstdint>

#include "dronesim/rng.hpp"

namespace dronesim {

struct TrafficConfig {
    double lambda0_hz = 0.3;        // mean data packet arrival rate
    std::int64_t packet_bits = 2000;
    std::int64_t ho_packet_bits = 1000;
    int ho_packet_count = 4;        // control packets injected per handover
    int ho_window_ttis = 10;        // TTIs the control burst is spread over
    std::int64_t q_max_bits = 200000;
    double tti_s = 1e-3;
};

// Uplink buffer. Cumulative counters allow exact conservation checks:
// total_arrived == q_bits + total_served + total_dropped at all times.
struct BufferState {
    std::int64_t q_bits = 0;
    int burst_remaining = 0; // TTIs left in the current control burst window
    std::int64_t total_arrived = 0;
    std::int64_t total_served = 0;
    std::int64_t total_dropped = 0;
};

// Bits arriving during one TTI: Poisson data packets plus the control
// burst share. Advances the burst window; call exactly once per TTI.
// The burst delivers ho_packet_count packets spread evenly over the
// window (floor-difference schedule, so the total is exact).
std::int64_t arrivals(const TrafficConfig& cfg, BufferState& st, Rng& rng);

// Restarts the control burst window. Overlapping handovers restart the
// window rather than stacking bursts.
void on_handover(const TrafficConfig& cfg, BufferState& st);

// q(t+1) = q(t) + u(t) - s(t), clamped at q_max with the overflow counted
// as dropped. served_bits must not exceed q_bits + u_bits.
// Returns the bits dropped this TTI.
std::int64_t advance_queue(const TrafficConfig& cfg, BufferState& st,
                           std::int64_t u_bits, std::int64_t served_bits);

// Head-of-line delay estimate q/R in seconds. Zero queue gives 0; a
// starved queue (q > 0, R == 0) gives +infinity.
double expected_delay(std::int64_t q_bits, double rate_bps);

} // namespace dronesim

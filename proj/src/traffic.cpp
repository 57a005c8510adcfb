#include "dronesim/traffic.hpp"

#include <limits>
#include <stdexcept>

namespace dronesim {

std::int64_t arrivals(const TrafficConfig& cfg, BufferState& st, Rng& rng) {
    std::poisson_distribution<int> data(cfg.lambda0_hz * cfg.tti_s);
    std::int64_t u = static_cast<std::int64_t>(data(rng)) * cfg.packet_bits;
    if (st.burst_remaining > 0) {
        const int total = cfg.ho_window_ttis;
        const int elapsed = total - st.burst_remaining; // 0-based position
        const std::int64_t before =
            static_cast<std::int64_t>(elapsed) * cfg.ho_packet_count / total;
        const std::int64_t after =
            static_cast<std::int64_t>(elapsed + 1) * cfg.ho_packet_count / total;
        u += (after - before) * cfg.ho_packet_bits;
        --st.burst_remaining;
    }
    st.total_arrived += u;
    return u;
}

void on_handover(const TrafficConfig& cfg, BufferState& st) {
    st.burst_remaining = cfg.ho_window_ttis;
}

std::int64_t advance_queue(const TrafficConfig& cfg, BufferState& st,
                           std::int64_t u_bits, std::int64_t served_bits) {
    if (served_bits < 0 || u_bits < 0)
        throw std::invalid_argument("negative bits in advance_queue");
    if (served_bits > st.q_bits + u_bits)
        throw std::logic_error("served more than buffer content");
    std::int64_t q = st.q_bits + u_bits - served_bits;
    std::int64_t dropped = 0;
    if (q > cfg.q_max_bits) {
        dropped = q - cfg.q_max_bits;
        q = cfg.q_max_bits;
    }
    st.q_bits = q;
    st.total_served += served_bits;
    st.total_dropped += dropped;
    return dropped;
}

double expected_delay(std::int64_t q_bits, double rate_bps) {
    if (q_bits <= 0)
        return 0.0;
    if (rate_bps <= 0.0)
        return std::numeric_limits<double>::infinity();
    return static_cast<double>(q_bits) / rate_bps;
}

} // namespace dronesim

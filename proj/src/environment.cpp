#include "dronesim/environment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dronesim {

int QuantizerConfig::n_pl_bins() const {
    return static_cast<int>(std::ceil((pl_max_db - pl_min_db) / pl_bin_db - 1e-9));
}

int StateDims::n_states() const {
    int n = n_h * n_v * n_bs * n_q;
    for (int i = 0; i < n_bs; ++i)
        n *= n_pl;
    return n;
}

StateDims state_dims(const NetworkTopology& topo, const QuantizerConfig& q) {
    StateDims d;
    d.n_bs = static_cast<int>(topo.bs.size());
    d.n_q = QuantizerConfig::n_q_bins;
    d.n_pl = q.n_pl_bins();
    return d;
}

int state_key(const EnvState& s, const StateDims& d) {
    int key = (static_cast<int>(s.h_bin) * d.n_v + s.v_bin) * d.n_bs + s.serving_bs;
    key = key * d.n_q + s.q_bin;
    for (int i = 0; i < d.n_bs; ++i)
        key = key * d.n_pl + s.pl_bins[static_cast<std::size_t>(i)];
    return key;
}

int action_count(const NetworkTopology& topo, int power_levels) {
    return 1 + static_cast<int>(topo.bs.size()) * topo.rrbs_per_bs * power_levels;
}

// Key 0 is no-transmit. Transmit keys order RRBs descending and power
// descending within a BS, so Q-value ties resolve towards the fattest
// grant instead of a covert handover.
int action_key(const Action& a, const NetworkTopology& topo, int power_levels) {
    if (a.rrb_count == 0)
        return 0;
    const int n_rrb = topo.rrbs_per_bs;
    return 1 + (a.target_bs * n_rrb + (n_rrb - a.rrb_count)) * power_levels +
           a.power_level;
}

Action action_from_key(int key, const NetworkTopology& topo, int power_levels) {
    if (key < 0 || key >= action_count(topo, power_levels))
        throw std::out_of_range("action key out of range");
    Action a;
    if (key == 0)
        return a; // caller substitutes the serving BS as target
    const int n_rrb = topo.rrbs_per_bs;
    const int k = key - 1;
    a.power_level = k % power_levels;
    const int bs_rrb = k / power_levels;
    a.rrb_count = n_rrb - bs_rrb % n_rrb;
    a.target_bs = bs_rrb / n_rrb;
    return a;
}

EnvState quantize(const RawObservation& raw, const QuantizerConfig& cfg,
                  long* clamp_events) {
    EnvState s;
    s.h_bin = 0;
    s.v_bin = 0;
    s.serving_bs = static_cast<std::uint8_t>(raw.serving_bs);

    const std::int64_t pkt = cfg.packet_bits;
    if (raw.q_bits <= 0)
        s.q_bin = 0;
    else if (raw.q_bits <= 2 * pkt)
        s.q_bin = 1;
    else if (raw.q_bits <= 10 * pkt)
        s.q_bin = 2;
    else
        s.q_bin = 3;

    const int n_pl = cfg.n_pl_bins();
    s.pl_bins.reserve(raw.measured_pl_db.size());
    for (double pl : raw.measured_pl_db) {
        int bin = static_cast<int>(std::floor((pl - cfg.pl_min_db) / cfg.pl_bin_db));
        if (bin < 0 || bin >= n_pl) {
            if (clamp_events)
                ++*clamp_events;
            bin = std::clamp(bin, 0, n_pl - 1);
        }
        s.pl_bins.push_back(static_cast<std::uint8_t>(bin));
    }
    return s;
}

RawObservation dequantize(const EnvState& s, const QuantizerConfig& cfg,
                          const DroneKinematics& drone) {
    RawObservation raw;
    raw.altitude_m = drone.altitude_m;
    raw.speed_mps = drone.speed_mps;
    raw.serving_bs = s.serving_bs;
    switch (s.q_bin) {
    case 0: raw.q_bits = 0; break;
    case 1: raw.q_bits = cfg.packet_bits; break;
    case 2: raw.q_bits = 6 * cfg.packet_bits; break;
    default: raw.q_bits = 20 * cfg.packet_bits; break;
    }
    raw.measured_pl_db.reserve(s.pl_bins.size());
    for (std::uint8_t b : s.pl_bins)
        raw.measured_pl_db.push_back(cfg.pl_min_db + (b + 0.5) * cfg.pl_bin_db);
    return raw;
}

std::vector<int> feasible_actions(int serving_bs, const std::vector<int>& free_rrbs,
                                  bool ho_allowed, const NetworkTopology& topo,
                                  int power_levels) {
    const int n_bs = static_cast<int>(topo.bs.size());
    if (serving_bs < 0 || serving_bs >= n_bs)
        throw std::out_of_range("serving BS out of range");
    if (static_cast<int>(free_rrbs.size()) != n_bs)
        throw std::invalid_argument("free_rrbs size mismatch");

    std::vector<int> keys;
    keys.push_back(0);
    for (int bs = 0; bs < n_bs; ++bs) {
        if (bs != serving_bs && !ho_allowed)
            continue;
        const int cap = std::min(free_rrbs[static_cast<std::size_t>(bs)],
                                 topo.rrbs_per_bs);
        for (int rrb = topo.rrbs_per_bs; rrb >= 1; --rrb) {
            if (rrb > cap)
                continue;
            for (int p = 0; p < power_levels; ++p)
                keys.push_back(action_key({bs, rrb, p}, topo, power_levels));
        }
    }
    return keys; // construction order is already ascending
}

RewardBreakdown reward_breakdown(const RewardWeights& w, int rrbs_used,
                                 int rrbs_per_bs, std::int64_t q_next_bits,
                                 std::int64_t q_norm_bits, double int_mw,
                                 double int_norm_mw, bool handover) {
    RewardBreakdown r;
    r.resource_term =
        1.0 / (1.0 + static_cast<double>(rrbs_used) / rrbs_per_bs);
    r.delay_term = 1.0 / (1.0 + static_cast<double>(q_next_bits) /
                                    static_cast<double>(q_norm_bits));
    r.interference_term = 1.0 / (1.0 + int_mw / int_norm_mw);
    r.handover = handover;
    r.total = w.alpha_s * r.resource_term + w.alpha_d * r.delay_term +
              w.alpha_f * r.interference_term - (handover ? w.alpha_h : 0.0);
    return r;
}

double interference_norm_mw(const EnvConfig& cfg) {
    double pl_min = 1e300;
    for (const auto& bs : cfg.topology.bs) {
        const double d3d = std::max(std::abs(cfg.drone.altitude_m - bs.z), 1.0);
        pl_min = std::min(pl_min, path_loss_los_db(d3d, cfg.fc_ghz));
    }
    const double p_max_dbm = mw_to_dbm(cfg.p_max_w * 1000.0);
    return dbm_to_mw(p_max_dbm - pl_min + cfg.tx_gain_db + cfg.rx_gain_db);
}

// --- Environment ----------------------------------------------------------

namespace {
void validate(const EnvConfig& c) {
    if (c.topology.bs.empty())
        throw std::invalid_argument("topology needs at least one BS");
    if (c.topology.area_width_m <= 0 || c.topology.area_height_m <= 0)
        throw std::invalid_argument("bad area dimensions");
    if (c.topology.rrbs_per_bs < 1)
        throw std::invalid_argument("rrbs_per_bs < 1");
    if (c.drone.speed_mps <= 0)
        throw std::invalid_argument("drone speed must be positive");
    if (!(c.drone.altitude_m > 22.5) || !(c.drone.altitude_m <= 300.0))
        throw std::invalid_argument("drone altitude outside (22.5, 300] m");
    if (c.power_levels < 1 || c.p_max_w <= 0)
        throw std::invalid_argument("bad power configuration");
    if (c.frame_ttis < 1 || c.min_ho_interval_ttis < 1)
        throw std::invalid_argument("bad frame / handover interval");
    if (c.quantizer.pl_bin_db <= 0 ||
        c.quantizer.pl_max_db <= c.quantizer.pl_min_db)
        throw std::invalid_argument("bad path-loss quantizer range");
    if (c.quantizer.packet_bits <= 0 || c.q_norm_bits <= 0)
        throw std::invalid_argument("bad packet / queue normalizer");
    if (c.tti_s <= 0 || c.fc_ghz <= 0)
        throw std::invalid_argument("bad TTI or carrier frequency");
}
} // namespace

Environment::Environment(const EnvConfig& cfg) : cfg_(cfg) {
    validate(cfg_);
    dims_ = state_dims(cfg_.topology, cfg_.quantizer);
    n_actions_ = action_count(cfg_.topology, cfg_.power_levels);
    p_max_dbm_ = mw_to_dbm(cfg_.p_max_w * 1000.0);
    int_norm_mw_ = interference_norm_mw(cfg_);

    budget_.subcarrier_hz = cfg_.subcarrier_hz;
    budget_.sc_per_rrb = cfg_.sc_per_rrb;
    budget_.noise_density_w_hz =
        cfg_.noise_density_w_hz * std::pow(10.0, cfg_.noise_figure_db / 10.0);
    budget_.ext_interference_w_hz =
        budget_.noise_density_w_hz *
        (std::pow(10.0, cfg_.noise_rise_db / 10.0) - 1.0);
    budget_.tx_gain_db = cfg_.tx_gain_db;
    budget_.rx_gain_db = cfg_.rx_gain_db;

    const int n_bs = dims_.n_bs;
    free_rrbs_.assign(static_cast<std::size_t>(n_bs), 0);
    los_.assign(static_cast<std::size_t>(n_bs), true);
    shadow_db_.assign(static_cast<std::size_t>(n_bs), 0.0);
    measured_pl_db_.assign(static_cast<std::size_t>(n_bs), 0.0);

    // Enumerating every (ho_allowed, serving, occupancy) feasible set is
    // cheap for small topologies and removes all per-TTI set building.
    const int occ_base = cfg_.topology.rrbs_per_bs + 1;
    double combos = 2.0 * n_bs * std::pow(occ_base, n_bs);
    use_cache_ = combos <= 20000.0;
    if (use_cache_) {
        feasible_cache_.resize(static_cast<std::size_t>(combos));
        std::vector<int> free(static_cast<std::size_t>(n_bs), 0);
        for (int ho = 0; ho < 2; ++ho)
            for (int sv = 0; sv < n_bs; ++sv) {
                const int n_occ = static_cast<int>(std::pow(occ_base, n_bs) + 0.5);
                for (int occ = 0; occ < n_occ; ++occ) {
                    int rem = occ;
                    for (int i = 0; i < n_bs; ++i) {
                        free[static_cast<std::size_t>(i)] = rem % occ_base;
                        rem /= occ_base;
                    }
                    const std::size_t idx = static_cast<std::size_t>(
                        (ho * n_bs + sv) * n_occ + occ);
                    feasible_cache_[idx] = feasible_actions(
                        sv, free, ho != 0, cfg_.topology, cfg_.power_levels);
                }
            }
    }
}

double Environment::power_w(int level) const {
    if (level < 0 || level >= cfg_.power_levels)
        throw std::out_of_range("power level out of range");
    return cfg_.p_max_w / std::pow(2.0, level);
}

bool Environment::ho_allowed() const {
    return (tti_ % cfg_.frame_ttis == 0) && ho_timer_ == 0 && dims_.n_bs > 1;
}

void Environment::prepare_tti() {
    const int n_bs = dims_.n_bs;
    std::uniform_int_distribution<int> occ(0, cfg_.topology.rrbs_per_bs);
    for (int i = 0; i < n_bs; ++i)
        free_rrbs_[static_cast<std::size_t>(i)] = occ(rng_);

    const bool frame_boundary = (tti_ % cfg_.frame_ttis == 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < n_bs; ++i) {
        const auto geom = make_link_geometry(pos_, cfg_.topology.bs[static_cast<std::size_t>(i)]);
        if (frame_boundary) {
            const bool los = uni(rng_) < los_probability(geom.d2d, geom.drone_height);
            los_[static_cast<std::size_t>(i)] = los;
            const double sigma = shadow_sigma_db(geom.drone_height, los);
            shadow_db_[static_cast<std::size_t>(i)] =
                std::normal_distribution<double>(0.0, sigma)(rng_);
        }
        const double pl =
            los_[static_cast<std::size_t>(i)]
                ? path_loss_los_db(geom.d3d, cfg_.fc_ghz)
                : path_loss_nlos_db(geom.d3d, geom.drone_height, cfg_.fc_ghz);
        measured_pl_db_[static_cast<std::size_t>(i)] =
            pl + shadow_db_[static_cast<std::size_t>(i)];
    }
}

RawObservation Environment::observation() const {
    RawObservation raw;
    raw.altitude_m = cfg_.drone.altitude_m;
    raw.speed_mps = cfg_.drone.speed_mps;
    raw.serving_bs = serving_bs_;
    raw.q_bits = buffer_.q_bits;
    raw.measured_pl_db = measured_pl_db_;
    return raw;
}

EnvState Environment::observe_quantized() {
    return quantize(observation(), cfg_.quantizer, &clamp_events_);
}

EnvState Environment::reset(std::uint64_t seed) {
    rng_.seed(seed);
    pos_.x = 0.0;
    pos_.y = std::uniform_real_distribution<double>(
        0.0, cfg_.topology.area_height_m)(rng_);
    pos_.z = cfg_.drone.altitude_m;

    // initial serving cell: the BS nearest the bottom-left corner
    int best = 0;
    double best_d2 = 1e300;
    for (int i = 0; i < dims_.n_bs; ++i) {
        const auto& b = cfg_.topology.bs[static_cast<std::size_t>(i)];
        const double d2 = b.x * b.x + b.y * b.y;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    serving_bs_ = best;
    ho_timer_ = 0;
    tti_ = 0;
    buffer_ = BufferState{};
    clamp_events_ = 0;
    prepare_tti();
    return observe_quantized();
}

const std::vector<int>& Environment::feasible() const {
    if (use_cache_) {
        const int n_bs = dims_.n_bs;
        const int occ_base = cfg_.topology.rrbs_per_bs + 1;
        int occ = 0;
        for (int i = n_bs - 1; i >= 0; --i)
            occ = occ * occ_base + free_rrbs_[static_cast<std::size_t>(i)];
        int n_occ = 1;
        for (int i = 0; i < n_bs; ++i)
            n_occ *= occ_base;
        const std::size_t idx = static_cast<std::size_t>(
            ((ho_allowed() ? 1 : 0) * n_bs + serving_bs_) * n_occ + occ);
        return feasible_cache_[idx];
    }
    feasible_scratch_ = feasible_actions(serving_bs_, free_rrbs_, ho_allowed(),
                                         cfg_.topology, cfg_.power_levels);
    return feasible_scratch_;
}

StepResult Environment::step(int key) {
    Action a = action_from_key(key, cfg_.topology, cfg_.power_levels);
    if (a.rrb_count == 0)
        a.target_bs = serving_bs_;
    return step(a);
}

StepResult Environment::step(const Action& a) {
    if (a.target_bs < 0 || a.target_bs >= dims_.n_bs)
        throw std::out_of_range("target BS out of range");
    if (a.rrb_count < 0 || a.rrb_count > cfg_.topology.rrbs_per_bs)
        throw std::out_of_range("rrb_count out of range");
    if (a.power_level < 0 || a.power_level >= cfg_.power_levels)
        throw std::out_of_range("power level out of range");

    // feasibility contract
    if (a.rrb_count > free_rrbs_[static_cast<std::size_t>(a.target_bs)])
        throw std::logic_error("allocation exceeds free RRBs");
    if (a.target_bs != serving_bs_ && !ho_allowed())
        throw std::logic_error("handover outside allowed instant");

    StepResult out;
    out.position = pos_;
    out.q_before_bits = buffer_.q_bits;

    // 1. handover bookkeeping
    out.handover = a.target_bs != serving_bs_;
    if (out.handover) {
        serving_bs_ = a.target_bs;
        ho_timer_ = cfg_.min_ho_interval_ttis;
        on_handover(cfg_.traffic, buffer_);
    }

    // 2. traffic in
    out.arrived_bits = arrivals(cfg_.traffic, buffer_, rng_);

    // 3. transmission
    if (a.rrb_count > 0) {
        out.rrbs_used = a.rrb_count;
        out.tx_power_w = power_w(a.power_level);
        serving_chan_.los = los_[static_cast<std::size_t>(serving_bs_)];
        serving_chan_.path_loss_db = measured_pl_db_[static_cast<std::size_t>(serving_bs_)];
        serving_chan_.shadow_db = 0.0; // already folded into the measurement
        const std::size_t n_sc =
            static_cast<std::size_t>(a.rrb_count) * cfg_.sc_per_rrb;
        serving_chan_.small_scale.resize(n_sc);
        std::exponential_distribution<double> exp1(1.0);
        for (auto& g : serving_chan_.small_scale)
            g = exp1(rng_);
        out.rate_bps = uplink_rate({a.rrb_count, out.tx_power_w}, budget_,
                                   serving_chan_);
    }

    // 4. queue update
    const auto tx_capacity = static_cast<std::int64_t>(out.rate_bps * cfg_.tti_s);
    out.served_bits = std::min(buffer_.q_bits + out.arrived_bits, tx_capacity);
    out.dropped_bits =
        advance_queue(cfg_.traffic, buffer_, out.arrived_bits, out.served_bits);
    out.q_after_bits = buffer_.q_bits;

    // 5. interference towards the other BSs
    if (a.rrb_count > 0) {
        const double p_dbm = mw_to_dbm(out.tx_power_w * 1000.0);
        for (int i = 0; i < dims_.n_bs; ++i) {
            if (i == serving_bs_)
                continue;
            out.interference_mw += dbm_to_mw(interference_to_bs(
                p_dbm, measured_pl_db_[static_cast<std::size_t>(i)],
                cfg_.tx_gain_db, cfg_.rx_gain_db));
        }
    }

    // 6. reward
    out.reward = reward_breakdown(cfg_.weights, out.rrbs_used,
                                  cfg_.topology.rrbs_per_bs, buffer_.q_bits,
                                  cfg_.q_norm_bits, out.interference_mw,
                                  int_norm_mw_, out.handover);
    const RewardWeights& rw = cfg_.weights;
    const double lo = -rw.alpha_h - 1e-12;
    const double hi = rw.alpha_s + rw.alpha_d + rw.alpha_f + 1e-12;
    if (out.reward.total < lo || out.reward.total > hi)
        throw std::logic_error("reward outside analytic bounds");

    // 7. kinematics and next observation
    pos_.x += cfg_.drone.speed_mps * cfg_.tti_s;
    ++tti_;
    if (ho_timer_ > 0)
        --ho_timer_;
    out.done = pos_.x >= cfg_.topology.area_width_m || pos_.x < 0.0 ||
               pos_.y < 0.0 || pos_.y > cfg_.topology.area_height_m;
    if (!out.done)
        prepare_tti();
    out.state = observe_quantized();
    return out;
}

} // namespace dronesim

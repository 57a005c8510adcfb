#include "dronesim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "dronesim/kpi.hpp"
#include "dronesim/link_layer.hpp"

namespace dronesim {

EnvConfig ScenarioConfig::to_env_config() const {
    EnvConfig e;
    e.topology = topology;
    e.drone = drone;
    e.quantizer = quantizer;
    e.quantizer.packet_bits = traffic.packet_bits;
    e.weights = weights;
    e.traffic = traffic;
    e.traffic.tti_s = tti_s;
    e.fc_ghz = fc_ghz;
    e.p_max_w = p_max_w;
    e.power_levels = power_levels;
    e.subcarrier_hz = subcarrier_hz;
    e.sc_per_rrb = sc_per_rrb;
    e.noise_density_w_hz = dbm_to_mw(thermal_noise_dbm_hz) * 1e-3;
    e.noise_figure_db = noise_figure_db;
    e.noise_rise_db = noise_rise_db;
    e.tx_gain_db = tx_gain_db;
    e.rx_gain_db = rx_gain_db;
    e.frame_ttis = frame_ttis;
    e.min_ho_interval_ttis = min_ho_interval_ttis;
    e.tti_s = tti_s;
    e.q_norm_bits = q_norm_bits;
    return e;
}

TrainConfig ScenarioConfig::to_train_config() const {
    TrainConfig t;
    t.episodes = train_episodes;
    t.beta = beta;
    t.visit_scale = visit_scale;
    t.epsilon_start = epsilon_start;
    t.epsilon_floor = epsilon_floor;
    t.epsilon_decay = epsilon_decay;
    t.replay_capacity = static_cast<std::size_t>(replay_capacity);
    t.batch_size = batch_size;
    t.target_refresh = target_refresh;
    t.reward_bound = std::max(weights.alpha_h,
                              weights.alpha_s + weights.alpha_d + weights.alpha_f);
    t.seed = seed;
    t.pure_random_behavior = pure_random;
    return t;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_num(const std::string& v, const std::string& key) {
    std::size_t pos = 0;
    double x = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("bad numeric value for " + key + ": " + v);
    }
    if (trim(v.substr(pos)) != "")
        throw std::runtime_error("trailing junk in value for " + key + ": " + v);
    return x;
}

std::int64_t parse_int(const std::string& v, const std::string& key) {
    const double x = parse_num(v, key);
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9)
        throw std::runtime_error("expected integer for " + key + ": " + v);
    return static_cast<std::int64_t>(r);
}

// "x:y,x:y,..." -> BS ground positions; the shared height is set separately.
std::vector<Position3D> parse_bs_list(const std::string& v, double height) {
    std::vector<Position3D> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("bad BS position (want x:y): " + item);
        Position3D p;
        p.x = parse_num(trim(item.substr(0, colon)), "topology.bs");
        p.y = parse_num(trim(item.substr(colon + 1)), "topology.bs");
        p.z = height;
        out.push_back(p);
    }
    if (out.empty())
        throw std::runtime_error("empty BS list");
    return out;
}

std::string bs_list_to_string(const std::vector<Position3D>& bs) {
    std::string s;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (i)
            s += ',';
        s += format_double(bs[i].x) + ":" + format_double(bs[i].y);
    }
    return s;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct KeyEntry {
    const char* key;
    Setter set;
    Getter get;
};

#define NUM_KEY(name, field)                                                   \
    {name, [](ScenarioConfig& c, const std::string& v) { c.field = parse_num(v, name); }, \
     [](const ScenarioConfig& c) { return format_double(c.field); }}
#define INT_KEY(name, field, type)                                             \
    {name, [](ScenarioConfig& c, const std::string& v) { c.field = static_cast<type>(parse_int(v, name)); }, \
     [](const ScenarioConfig& c) { return std::to_string(c.field); }}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> table = {
        {"seed",
         [](ScenarioConfig& c, const std::string& v) {
             c.seed = static_cast<std::uint64_t>(parse_int(v, "seed"));
         },
         [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
        NUM_KEY("area.width_m", topology.area_width_m),
        NUM_KEY("area.height_m", topology.area_height_m),
        {"topology.bs",
         [](ScenarioConfig& c, const std::string& v) {
             const double h = c.topology.bs.empty() ? 25.0 : c.topology.bs[0].z;
             c.topology.bs = parse_bs_list(v, h);
         },
         [](const ScenarioConfig& c) { return bs_list_to_string(c.topology.bs); }},
        {"topology.bs_height_m",
         [](ScenarioConfig& c, const std::string& v) {
             const double h = parse_num(v, "topology.bs_height_m");
             for (auto& b : c.topology.bs)
                 b.z = h;
         },
         [](const ScenarioConfig& c) {
             return format_double(c.topology.bs.empty() ? 25.0
                                                        : c.topology.bs[0].z);
         }},
        INT_KEY("topology.rrbs_per_bs", topology.rrbs_per_bs, int),
        NUM_KEY("drone.speed_mps", drone.speed_mps),
        NUM_KEY("drone.altitude_m", drone.altitude_m),
        NUM_KEY("channel.fc_ghz", fc_ghz),
        INT_KEY("channel.frame_ttis", frame_ttis, int),
        NUM_KEY("channel.thermal_noise_dbm_hz", thermal_noise_dbm_hz),
        NUM_KEY("channel.noise_figure_db", noise_figure_db),
        NUM_KEY("channel.noise_rise_db", noise_rise_db),
        NUM_KEY("channel.tx_gain_db", tx_gain_db),
        NUM_KEY("channel.rx_gain_db", rx_gain_db),
        NUM_KEY("radio.p_max_w", p_max_w),
        INT_KEY("radio.power_levels", power_levels, int),
        NUM_KEY("radio.subcarrier_hz", subcarrier_hz),
        INT_KEY("radio.sc_per_rrb", sc_per_rrb, int),
        NUM_KEY("radio.circuit_power_w", circuit_power_w),
        NUM_KEY("traffic.lambda0_hz", traffic.lambda0_hz),
        INT_KEY("traffic.packet_bits", traffic.packet_bits, std::int64_t),
        INT_KEY("traffic.ho_packet_bits", traffic.ho_packet_bits, std::int64_t),
        INT_KEY("traffic.ho_packet_count", traffic.ho_packet_count, int),
        INT_KEY("traffic.ho_window_ttis", traffic.ho_window_ttis, int),
        INT_KEY("traffic.q_max_bits", traffic.q_max_bits, std::int64_t),
        NUM_KEY("env.tti_s", tti_s),
        INT_KEY("env.min_ho_interval_ttis", min_ho_interval_ttis, int),
        NUM_KEY("weights.alpha_s", weights.alpha_s),
        NUM_KEY("weights.alpha_d", weights.alpha_d),
        NUM_KEY("weights.alpha_f", weights.alpha_f),
        NUM_KEY("weights.alpha_h", weights.alpha_h),
        INT_KEY("weights.q_norm_bits", q_norm_bits, std::int64_t),
        NUM_KEY("quantizer.pl_min_db", quantizer.pl_min_db),
        NUM_KEY("quantizer.pl_max_db", quantizer.pl_max_db),
        NUM_KEY("quantizer.pl_bin_db", quantizer.pl_bin_db),
        INT_KEY("train.episodes", train_episodes, int),
        NUM_KEY("train.beta", beta),
        NUM_KEY("train.visit_scale", visit_scale),
        NUM_KEY("train.epsilon_start", epsilon_start),
        NUM_KEY("train.epsilon_floor", epsilon_floor),
        NUM_KEY("train.epsilon_decay", epsilon_decay),
        {"train.pure_random",
         [](ScenarioConfig& c, const std::string& v) {
             const long long b = parse_int(v, "train.pure_random");
             if (b != 0 && b != 1)
                 throw std::runtime_error("train.pure_random must be 0 or 1");
             c.pure_random = b != 0;
         },
         [](const ScenarioConfig& c) {
             return std::string(c.pure_random ? "1" : "0");
         }},
        INT_KEY("train.replay_capacity", replay_capacity, long),
        INT_KEY("train.batch_size", batch_size, int),
        INT_KEY("train.target_refresh", target_refresh, int),
        INT_KEY("eval.episodes", eval_episodes, int),
        NUM_KEY("eval.heatmap_cell_m", heatmap_cell_m),
        NUM_KEY("baseline.hysteresis_db", hysteresis_db),
    };
    return table;
}

#undef NUM_KEY
#undef INT_KEY

void set_key(ScenarioConfig& cfg, const std::string& key,
             const std::string& value) {
    for (const auto& e : key_table())
        if (key == e.key) {
            e.set(cfg, value);
            return;
        }
    throw std::runtime_error("unknown configuration key: " + key);
}

} // namespace

ScenarioConfig load_config(const std::string& path) {
    ScenarioConfig cfg;
    if (path.empty())
        return cfg;
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        set_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::runtime_error("override must look like key=value: " +
                                 assignment);
    set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void validate_config(const ScenarioConfig& cfg) {
    (void)Environment(cfg.to_env_config()); // env-level checks
    if (cfg.train_episodes < 1 || cfg.eval_episodes < 1)
        throw std::runtime_error("episode counts must be positive");
    if (!(cfg.beta >= 0.0) || cfg.beta >= 1.0)
        throw std::runtime_error("train.beta must lie in [0, 1)");
    if (cfg.epsilon_start < 0 || cfg.epsilon_start > 1 || cfg.epsilon_floor < 0 ||
        cfg.epsilon_floor > 1 || cfg.epsilon_decay <= 0 || cfg.epsilon_decay > 1)
        throw std::runtime_error("bad epsilon schedule");
    if (cfg.replay_capacity < 1 || cfg.batch_size < 1 || cfg.target_refresh < 1)
        throw std::runtime_error("bad replay configuration");
    if (cfg.visit_scale <= 0)
        throw std::runtime_error("train.visit_scale must be positive");
    if (cfg.weights.alpha_s < 0 || cfg.weights.alpha_d < 0 ||
        cfg.weights.alpha_f < 0 || cfg.weights.alpha_h < 0)
        throw std::runtime_error("reward weights must be non-negative");
    if (cfg.hysteresis_db < 0)
        throw std::runtime_error("hysteresis must be non-negative");
    if (cfg.traffic.lambda0_hz < 0 || cfg.traffic.packet_bits <= 0 ||
        cfg.traffic.ho_packet_bits < 0 || cfg.traffic.ho_packet_count < 0 ||
        cfg.traffic.ho_window_ttis < 1 || cfg.traffic.q_max_bits < 0)
        throw std::runtime_error("bad traffic configuration");
    (void)HeatmapGrid(cfg.topology.area_width_m, cfg.topology.area_height_m,
                      cfg.heatmap_cell_m);
}

std::vector<std::string> serialize_config(const ScenarioConfig& cfg) {
    std::vector<std::string> out;
    out.reserve(key_table().size());
    for (const auto& e : key_table())
        out.push_back(std::string(e.key) + " = " + e.get(cfg));
    return out;
}

} // namespace dronesim

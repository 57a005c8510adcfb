#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dronesim/agent.hpp"
#include "dronesim/baseline.hpp"
#include "dronesim/config.hpp"
#include "dronesim/episode.hpp"
#include "dronesim/kpi.hpp"

namespace ds = dronesim;

namespace {

// Exit codes: 0 ok, 1 config/usage error (bad file, unknown key, missing
// policy), 2 runtime failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int episodes = -1; // -1: use the config value
};

void add_common(CLI::App* cmd, CommonOpts& o, bool need_out = true) {
    cmd->add_option("--config", o.config_path, "scenario file (key = value)");
    auto* out = cmd->add_option("--out", o.out_dir, "output directory");
    if (need_out)
        out->required();
    cmd->add_option("--set", o.sets, "override, key=value (repeatable)");
    cmd->add_option("--seed", o.seed, "override the scenario seed")
        ->each([&o](const std::string&) { o.seed_given = true; });
    cmd->add_option("--episodes", o.episodes, "override the episode count");
}

ds::ScenarioConfig resolve(const CommonOpts& o, bool episodes_are_training) {
    try {
        ds::ScenarioConfig cfg = ds::load_config(o.config_path);
        for (const auto& s : o.sets)
            ds::apply_override(cfg, s);
        if (o.seed_given)
            cfg.seed = o.seed;
        if (o.episodes >= 0) {
            if (o.episodes == 0)
                throw std::runtime_error("--episodes must be positive");
            (episodes_are_training ? cfg.train_episodes : cfg.eval_episodes) =
                o.episodes;
        }
        ds::validate_config(cfg);
        return cfg;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::vector<std::string> config_header(const std::string& cmd,
                                       const ds::ScenarioConfig& cfg) {
    std::vector<std::string> h;
    h.push_back("dronesim " + cmd);
    for (auto& line : ds::serialize_config(cfg))
        h.push_back(line);
    return h;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream os(p);
    if (!os)
        throw std::runtime_error("cannot write " + p.string());
    return os;
}

void write_train_log(std::ostream& os, const std::vector<std::string>& header,
                     const std::vector<ds::EpisodeLog>& log) {
    for (const auto& h : header)
        os << "# " << h << "\n";
    os << "episode,epsilon,steps,reward_total\n";
    for (const auto& e : log)
        os << e.episode << ',' << ds::format_double(e.epsilon) << ',' << e.steps
           << ',' << ds::format_double(e.reward_total) << "\n";
}

ds::QTable load_policy_checked(const std::string& path,
                               const ds::Environment& env) {
    try {
        ds::QTable t = ds::load_policy(path);
        if (t.n_states() != env.dims().n_states() ||
            t.n_actions() != env.n_actions())
            throw std::runtime_error(
                "policy dimensions do not match the scenario: " + path);
        return t;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

int cmd_train(const CommonOpts& o) {
    const ds::ScenarioConfig cfg = resolve(o, /*episodes_are_training=*/true);
    std::filesystem::create_directories(o.out_dir);

    ds::Environment env(cfg.to_env_config());
    ds::DroneEnvAdapter adapter(env);
    const ds::TrainResult result = ds::train(adapter, cfg.to_train_config());

    const std::filesystem::path out(o.out_dir);
    ds::save_policy(result.table, (out / "policy.bin").string());
    auto os = open_out(out / "train_log.csv");
    write_train_log(os, config_header("train", cfg), result.log);
    std::cout << "trained " << cfg.train_episodes << " episodes, "
              << result.table.nonzero_values() << " table entries -> "
              << (out / "policy.bin").string() << "\n";
    return 0;
}

// Shared by eval / baseline / heatmap. policy_path empty means baseline.
int run_eval(const std::string& cmd, const CommonOpts& o,
             const std::string& policy_path, bool trace, bool heatmap_only) {
    const ds::ScenarioConfig cfg = resolve(o, /*episodes_are_training=*/false);
    std::filesystem::create_directories(o.out_dir);

    ds::Environment env(cfg.to_env_config());
    const bool learned = !policy_path.empty();
    ds::QTable table = learned ? load_policy_checked(policy_path, env)
                               : ds::QTable(1, 1);

    ds::HeatmapGrid grid(cfg.topology.area_width_m, cfg.topology.area_height_m,
                         cfg.heatmap_cell_m);
    ds::ConstraintAudit audit;
    ds::RunOptions opt;
    opt.handover_map = &grid;
    opt.audit = &audit;

    const std::filesystem::path out(o.out_dir);
    std::vector<std::string> header = config_header(cmd, cfg);
    if (learned)
        header.push_back("policy = " + policy_path);

    if (trace) {
        // Episode 0 rerun with the same seed; does not disturb the main pass.
        ds::RunOptions topt;
        topt.keep_trace = true;
        const std::uint64_t s0 = ds::derive_seed(cfg.seed, ds::kEvalStream, 0);
        const ds::EpisodeRun run =
            learned ? ds::run_learned_episode(env, table, s0, topt)
                    : ds::run_baseline_episode(env, cfg.hysteresis_db, s0, topt);
        auto os = open_out(out / "trace.csv");
        ds::write_trace_csv(os, header, run.trace);
    }

    const std::vector<ds::EpisodeSummary> eps =
        learned ? ds::evaluate_learned(env, table, cfg.seed, cfg.eval_episodes, opt)
                : ds::evaluate_baseline(env, cfg.hysteresis_db, cfg.seed,
                                        cfg.eval_episodes, opt);

    {
        auto os = open_out(out / "heatmap.csv");
        ds::write_heatmap_csv(os, header, grid);
    }
    if (!heatmap_only) {
        auto os = open_out(out / "episodes.csv");
        ds::write_episode_csv(os, header, eps);

        std::vector<std::string> sum_header = header;
        sum_header.push_back("audit ttis = " + std::to_string(audit.ttis));
        sum_header.push_back("audit violations = " +
                             std::to_string(audit.total()));
        auto os2 = open_out(out / "summary.csv");
        ds::write_summary_csv(os2, sum_header, ds::aggregate(eps));
    }
    const ds::KpiSummary k = ds::aggregate(eps);
    std::cout << cmd << ": " << k.episodes << " episodes, "
              << ds::format_double(k.mean_handovers) << " handovers/ep, "
              << "delay " << ds::format_double(k.mean_delay_s) << " s, "
              << "interference " << ds::format_double(k.mean_interference_mw)
              << " mW, audit violations " << audit.total() << "\n";
    return 0;
}

struct SweepSpec {
    std::string key;
    std::vector<std::string> values;
};

SweepSpec parse_sweep(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--sweep must look like key=v1,v2,...: " + spec);
    SweepSpec s;
    s.key = spec.substr(0, eq);
    std::stringstream ss(spec.substr(eq + 1));
    std::string item;
    while (std::getline(ss, item, ','))
        s.values.push_back(item);
    if (s.values.empty())
        throw ConfigError("--sweep has no values: " + spec);
    return s;
}

int cmd_sweep(const CommonOpts& o, const std::string& sweep_arg) {
    const ds::ScenarioConfig base = resolve(o, /*episodes_are_training=*/false);
    const SweepSpec sweep = parse_sweep(sweep_arg);
    std::filesystem::create_directories(o.out_dir);

    std::vector<ds::KpiSummary> rows;
    for (const auto& v : sweep.values) {
        ds::ScenarioConfig cfg = base;
        try {
            ds::apply_override(cfg, sweep.key + "=" + v);
            ds::validate_config(cfg);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        ds::Environment env(cfg.to_env_config());
        ds::DroneEnvAdapter adapter(env);
        const ds::TrainResult result = ds::train(adapter, cfg.to_train_config());
        rows.push_back(ds::aggregate(ds::evaluate_learned(
            env, result.table, cfg.seed, cfg.eval_episodes, {})));
        std::cout << "sweep " << sweep.key << " = " << v << ": "
                  << ds::format_double(rows.back().mean_handovers)
                  << " handovers/ep\n";
    }

    auto col = [&](auto proj) {
        std::vector<double> c;
        for (const auto& r : rows)
            c.push_back(proj(r));
        return ds::normalize(c);
    };
    const auto n_ho = col([](const ds::KpiSummary& r) { return r.mean_handovers; });
    const auto n_delay = col([](const ds::KpiSummary& r) { return r.mean_delay_s; });
    const auto n_int =
        col([](const ds::KpiSummary& r) { return r.mean_interference_mw; });
    const auto n_rrb = col([](const ds::KpiSummary& r) { return r.mean_rrbs; });

    std::vector<std::string> header = config_header("sweep", base);
    header.push_back("sweep key = " + sweep.key);
    auto os = open_out(std::filesystem::path(o.out_dir) / "sweep.csv");
    for (const auto& h : header)
        os << "# " << h << "\n";
    os << "key,value,mean_handovers,mean_delay_s,mean_interference_mw,mean_rrbs,"
          "mean_rate_bps,mean_reward_per_tti,drop_fraction,"
          "norm_handovers,norm_delay,norm_interference,norm_rrbs\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ds::KpiSummary& r = rows[i];
        os << sweep.key << ',' << sweep.values[i] << ','
           << ds::format_double(r.mean_handovers) << ','
           << ds::format_double(r.mean_delay_s) << ','
           << ds::format_double(r.mean_interference_mw) << ','
           << ds::format_double(r.mean_rrbs) << ','
           << ds::format_double(r.mean_rate_bps) << ','
           << ds::format_double(r.mean_reward_per_tti) << ','
           << ds::format_double(r.drop_fraction) << ','
           << ds::format_double(n_ho[i]) << ',' << ds::format_double(n_delay[i])
           << ',' << ds::format_double(n_int[i]) << ','
           << ds::format_double(n_rrb[i]) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"drone cellular uplink simulator: learned H-RRM vs RSS baseline"};
    app.require_subcommand(1);

    CommonOpts train_o, eval_o, base_o, sweep_o, heat_o;
    std::string eval_policy, heat_policy, sweep_arg;
    bool eval_trace = false, base_trace = false;

    CLI::App* c_train = app.add_subcommand("train", "train a policy");
    add_common(c_train, train_o);

    CLI::App* c_eval = app.add_subcommand("eval", "evaluate a trained policy");
    add_common(c_eval, eval_o);
    c_eval->add_option("--policy", eval_policy, "policy file from train")
        ->required();
    c_eval->add_flag("--trace", eval_trace, "write a per-TTI trace of episode 0");

    CLI::App* c_base = app.add_subcommand("baseline", "evaluate the RSS baseline");
    add_common(c_base, base_o);
    c_base->add_flag("--trace", base_trace, "write a per-TTI trace of episode 0");

    CLI::App* c_sweep = app.add_subcommand("sweep", "train+eval over a value list");
    add_common(c_sweep, sweep_o);
    c_sweep->add_option("--sweep", sweep_arg, "key=v1,v2,...")->required();

    CLI::App* c_heat = app.add_subcommand("heatmap", "handover position grid only");
    add_common(c_heat, heat_o);
    c_heat->add_option("--policy", heat_policy,
                       "policy file; omitted runs the baseline");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (c_train->parsed())
            return cmd_train(train_o);
        if (c_eval->parsed())
            return run_eval("eval", eval_o, eval_policy, eval_trace, false);
        if (c_base->parsed())
            return run_eval("baseline", base_o, "", base_trace, false);
        if (c_sweep->parsed())
            return cmd_sweep(sweep_o, sweep_arg);
        if (c_heat->parsed())
            return run_eval("heatmap", heat_o, heat_policy, false, true);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include "dronesim/episode.hpp"

#include <cmath>

#include "dronesim/baseline.hpp"
#include "dronesim/link_layer.hpp"

namespace dronesim {

int DroneEnvAdapter::begin_episode(std::uint64_t seed) {
    return state_key(env_.reset(seed), env_.dims());
}

DiscreteEnv::Step DroneEnvAdapter::apply(int action) {
    const StepResult r = env_.step(action);
    return {state_key(r.state, env_.dims()), r.reward.total, r.done};
}

namespace {

TtiRecord to_record(const Environment& env, long tti, const StepResult& r) {
    TtiRecord rec;
    rec.tti = tti;
    rec.serving_bs = env.serving_bs(); // step applies handovers first
    rec.handover = r.handover;
    rec.rrbs_used = r.rrbs_used;
    rec.tx_power_w = r.tx_power_w;
    rec.rate_bps = r.rate_bps;
    rec.arrived_bits = r.arrived_bits;
    rec.served_bits = r.served_bits;
    rec.dropped_bits = r.dropped_bits;
    rec.q_before_bits = r.q_before_bits;
    rec.q_after_bits = r.q_after_bits;
    rec.interference_mw = r.interference_mw;
    rec.reward = r.reward.total;
    rec.x = r.position.x;
    rec.y = r.position.y;
    return rec;
}

void audit_step(ConstraintAudit& audit, const Environment& env,
                const StepResult& r, long tti, long& last_ho_tti) {
    const EnvConfig& cfg = env.config();
    ++audit.ttis;
    if (r.tx_power_w > cfg.p_max_w * (1.0 + 1e-12))
        ++audit.power_violations;
    if (r.rrbs_used < 0 || r.rrbs_used > cfg.topology.rrbs_per_bs)
        ++audit.rrb_violations;
    if (r.handover) {
        if (last_ho_tti >= 0 && tti - last_ho_tti < cfg.min_ho_interval_ttis)
            ++audit.ho_spacing_violations;
        last_ho_tti = tti;
    }
    const RewardWeights& w = cfg.weights;
    const double lo = -w.alpha_h - 1e-9;
    const double hi = w.alpha_s + w.alpha_d + w.alpha_f + 1e-9;
    if (!(r.reward.total >= lo && r.reward.total <= hi))
        ++audit.reward_bound_violations;
}

template <typename Policy>
EpisodeRun run_episode(Environment& env, std::uint64_t episode_seed,
                       const RunOptions& opt, Policy&& policy) {
    EpisodeRun run;
    env.reset(episode_seed);
    long last_ho_tti = -1;
    bool done = false;
    while (!done) {
        const long tti = env.tti();
        const StepResult r = policy();
        done = r.done;
        const TtiRecord rec = to_record(env, tti, r);
        record(run.summary, rec);
        if (opt.keep_trace)
            run.trace.push_back(rec);
        if (opt.handover_map && r.handover)
            opt.handover_map->add(r.position.x, r.position.y);
        if (opt.audit)
            audit_step(*opt.audit, env, r, tti, last_ho_tti);
    }
    return run;
}

} // namespace

EpisodeRun run_learned_episode(Environment& env, const QTable& table,
                               std::uint64_t episode_seed,
                               const RunOptions& opt) {
    Rng greedy_rng(0); // epsilon 0 consumes no randomness
    const StateDims& dims = env.dims();
    return run_episode(env, episode_seed, opt, [&]() {
        const EnvState s = quantize(env.observation(), env.config().quantizer);
        const int a =
            select_action(table, state_key(s, dims), env.feasible(), 0.0, greedy_rng);
        return env.step(a);
    });
}

EpisodeRun run_baseline_episode(Environment& env, double hysteresis_db,
                                std::uint64_t episode_seed,
                                const RunOptions& opt) {
    const double p_max_dbm = mw_to_dbm(env.config().p_max_w * 1e3);
    return run_episode(env, episode_seed, opt, [&]() {
        const RawObservation obs = env.observation();
        const std::vector<double> rss =
            baseline_rss_dbm(p_max_dbm, obs.measured_pl_db);
        const Action a =
            baseline_action(rss, env.serving_bs(), env.free_rrbs(),
                            env.ho_allowed(), hysteresis_db, obs.q_bits);
        return env.step(a);
    });
}

std::vector<EpisodeSummary> evaluate_learned(Environment& env,
                                             const QTable& table,
                                             std::uint64_t seed, int episodes,
                                             const RunOptions& opt) {
    std::vector<EpisodeSummary> out;
    out.reserve(static_cast<std::size_t>(episodes));
    for (int i = 0; i < episodes; ++i) {
        EpisodeRun run = run_learned_episode(
            env, table, derive_seed(seed, kEvalStream, static_cast<std::uint64_t>(i)),
            opt);
        run.summary.episode = i;
        out.push_back(run.summary);
    }
    return out;
}

std::vector<EpisodeSummary> evaluate_baseline(Environment& env,
                                              double hysteresis_db,
                                              std::uint64_t seed, int episodes,
                                              const RunOptions& opt) {
    std::vector<EpisodeSummary> out;
    out.reserve(static_cast<std::size_t>(episodes));
    for (int i = 0; i < episodes; ++i) {
        EpisodeRun run = run_baseline_episode(
            env, hysteresis_db,
            derive_seed(seed, kEvalStream, static_cast<std::uint64_t>(i)), opt);
        run.summary.episode = i;
        out.push_back(run.summary);
    }
    return out;
}

} // namespace dronesim

#pragma once

#include <cstdint>
#include <vector>

#include "dronesim/agent.hpp"
#include "dronesim/environment.hpp"
#include "dronesim/kpi.hpp"

namespace dronesim {

// DiscreteEnv facade over the drone environment for the trainer.
class DroneEnvAdapter : public DiscreteEnv {
public:
    explicit DroneEnvAdapter(Environment& env) : env_(env) {}

    int state_count() const override { return env_.dims().n_states(); }
    int action_count() const override { return env_.n_actions(); }
    int begin_episode(std::uint64_t seed) override;
    const std::vector<int>& feasible() const override { return env_.feasible(); }
    Step apply(int action) override;

private:
    Environment& env_;
};

// Invariants checked on every TTI of an evaluation run. Violations are
// counted, not thrown, so one pass over a full run reports totals.
struct ConstraintAudit {
    long ttis = 0;
    long power_violations = 0;      // tx power above P_max
    long rrb_violations = 0;        // grant above the per-BS budget
    long ho_spacing_violations = 0; // handovers closer than the min interval
    long reward_bound_violations = 0;

    long total() const {
        return power_violations + rrb_violations + ho_spacing_violations +
               reward_bound_violations;
    }
};

struct RunOptions {
    bool keep_trace = false;
    HeatmapGrid* handover_map = nullptr; // decision positions of handovers
    ConstraintAudit* audit = nullptr;
};

struct EpisodeRun {
    EpisodeSummary summary;
    std::vector<TtiRecord> trace; // filled only when keep_trace is set
};

// Greedy (epsilon = 0) rollout of a learned table.
EpisodeRun run_learned_episode(Environment& env, const QTable& table,
                               std::uint64_t episode_seed,
                               const RunOptions& opt = {});

// RSS + hysteresis baseline rollout.
EpisodeRun run_baseline_episode(Environment& env, double hysteresis_db,
                                std::uint64_t episode_seed,
                                const RunOptions& opt = {});

// Evaluation episode i runs on derive_seed(seed, kEvalStream, i), disjoint
// from the training episode stream.
inline constexpr std::uint64_t kEvalStream = 0xe7a1;

std::vector<EpisodeSummary> evaluate_learned(Environment& env,
                                             const QTable& table,
                                             std::uint64_t seed, int episodes,
                                             const RunOptions& opt = {});
std::vector<EpisodeSummary> evaluate_baseline(Environment& env,
                                              double hysteresis_db,
                                              std::uint64_t seed, int episodes,
                                              const RunOptions& opt = {});

} // namespace dronesim

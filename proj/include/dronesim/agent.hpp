#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dronesim/rng.hpp"

namespace dronesim {

struct Experience {
    std::int32_t state = 0;
    std::int32_t action = 0;
    std::int32_t next_state = 0;
    bool terminal = false;
    double reward = 0.0;
};

// Dense tabular Q function with per-state visit counts and a frozen
// bootstrap snapshot. The snapshot behaves exactly like a full copy taken
// at the last refresh, but is maintained copy-on-first-write per state so
// refreshing every C updates stays O(1).
class QTable {
public:
    QTable(int n_states, int n_actions);

    int n_states() const { return n_states_; }
    int n_actions() const { return n_actions_; }

    double value(int s, int a) const { return values_[flat(s, a)]; }
    void set_value(int s, int a, double v); // preserves snapshot semantics
    std::uint32_t visits(int s) const { return visits_[check_state(s)]; }
    void set_visits(int s, std::uint32_t n);

    void refresh_snapshot();
    double snapshot_value(int s, int a) const;
    double snapshot_max(int s) const; // max over all actions of the snapshot

    const double* row(int s) const { return &values_[flat(s, 0)]; }

    std::int64_t nonzero_values() const;

private:
    friend void q_update(QTable&, const Experience&, const struct QUpdateRule&);

    std::size_t flat(int s, int a) const;
    int check_state(int s) const;
    const double* snapshot_row(int s) const; // live or stored row

    int n_states_ = 0;
    int n_actions_ = 0;
    std::vector<double> values_;
    std::vector<std::uint32_t> visits_;

    std::uint32_t epoch_ = 1;
    std::vector<std::uint32_t> snap_epoch_; // per state
    std::vector<std::uint32_t> snap_slot_;
    std::vector<double> snap_rows_;
};

struct QUpdateRule {
    double beta = 0.8;
    double visit_scale = 5.0;   // learning rate 1 / (1 + n / visit_scale)
    double reward_bound = 1.01; // |reward| bound, checks |Q| <= bound/(1-beta)
};

// One Q-learning update against the table's current snapshot:
//   y = w                      (terminal)
//   y = w + beta * max_a' snapshot(s', a')
//   Q(s,a) <- (1 - alpha) Q(s,a) + alpha y,  alpha from visits(s)
void q_update(QTable& table, const Experience& e, const QUpdateRule& rule);

// Uniform ring buffer. sample() returns min(batch, size) distinct entries.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return data_.size(); }
    void push(const Experience& e);
    const Experience& at(std::size_t i) const { return data_[i]; }
    void sample(std::size_t batch, Rng& rng,
                std::vector<const Experience*>& out) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Experience> data_;
};

// Epsilon-greedy over the feasible actions. Ties resolve to the lowest
// action key. epsilon == 0 consumes no randomness.
int select_action(const QTable& table, int state,
                  const std::vector<int>& feasible, double epsilon, Rng& rng);

// Minimal episodic control surface the trainer drives. Implemented by the
// drone environment adapter and by hand-built test MDPs.
class DiscreteEnv {
public:
    virtual ~DiscreteEnv() = default;
    virtual int state_count() const = 0;
    virtual int action_count() const = 0;
    virtual int begin_episode(std::uint64_t seed) = 0;
    virtual const std::vector<int>& feasible() const = 0;

    struct Step {
        int next_state = 0;
        double reward = 0.0;
        bool terminal = false;
    };
    virtual Step apply(int action) = 0;
};

struct TrainConfig {
    int episodes = 500;
    double beta = 0.8;
    double visit_scale = 5.0;
    double epsilon_start = 1.0;
    double epsilon_floor = 0.05;
    double epsilon_decay = 0.995; // per episode
    std::size_t replay_capacity = 50000;
    int batch_size = 32;    // replay mini-batch M
    int target_refresh = 100; // snapshot refresh period C, in updates
    double reward_bound = 1.01;
    std::uint64_t seed = 1;
    bool pure_random_behavior = false;
};

struct EpisodeLog {
    int episode = 0;
    double epsilon = 0.0;
    long steps = 0;
    double reward_total = 0.0;
};

struct TrainResult {
    QTable table;
    std::vector<EpisodeLog> log;
};

TrainResult train(DiscreteEnv& env, const TrainConfig& cfg);

// Versioned little-endian binary round-trip of visits and non-zero values.
void save_policy(const QTable& table, const std::string& path);
QTable load_policy(const std::string& path);

} // namespace dronesim

#include "dronesim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace dronesim {

QTable::QTable(int n_states, int n_actions)
    : n_states_(n_states), n_actions_(n_actions) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("QTable dimensions must be positive");
    const std::size_t n =
        static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions);
    values_.assign(n, 0.0);
    visits_.assign(static_cast<std::size_t>(n_states), 0);
    snap_epoch_.assign(static_cast<std::size_t>(n_states), 0);
    snap_slot_.assign(static_cast<std::size_t>(n_states), 0);
}

int QTable::check_state(int s) const {
    if (s < 0 || s >= n_states_)
        throw std::out_of_range("state key out of range");
    return s;
}

std::size_t QTable::flat(int s, int a) const {
    check_state(s);
    if (a < 0 || a >= n_actions_)
        throw std::out_of_range("action key out of range");
    return static_cast<std::size_t>(s) * n_actions_ + static_cast<std::size_t>(a);
}

void QTable::set_value(int s, int a, double v) {
    const std::size_t idx = flat(s, a);
    if (snap_epoch_[static_cast<std::size_t>(s)] != epoch_) {
        snap_epoch_[static_cast<std::size_t>(s)] = epoch_;
        snap_slot_[static_cast<std::size_t>(s)] =
            static_cast<std::uint32_t>(snap_rows_.size() / n_actions_);
        const double* live = row(s);
        snap_rows_.insert(snap_rows_.end(), live, live + n_actions_);
    }
    values_[idx] = v;
}

void QTable::set_visits(int s, std::uint32_t n) {
    visits_[static_cast<std::size_t>(check_state(s))] = n;
}

void QTable::refresh_snapshot() {
    ++epoch_;
    snap_rows_.clear();
}

const double* QTable::snapshot_row(int s) const {
    check_state(s);
    if (snap_epoch_[static_cast<std::size_t>(s)] == epoch_)
        return &snap_rows_[static_cast<std::size_t>(
                               snap_slot_[static_cast<std::size_t>(s)]) *
                           n_actions_];
    return row(s);
}

double QTable::snapshot_value(int s, int a) const {
    if (a < 0 || a >= n_actions_)
        throw std::out_of_range("action key out of range");
    return snapshot_row(s)[a];
}

double QTable::snapshot_max(int s) const {
    const double* r = snapshot_row(s);
    double best = r[0];
    for (int a = 1; a < n_actions_; ++a)
        best = std::max(best, r[a]);
    return best;
}

std::int64_t QTable::nonzero_values() const {
    std::int64_t n = 0;
    for (double v : values_)
        n += (v != 0.0);
    return n;
}

void q_update(QTable& table, const Experience& e, const QUpdateRule& rule) {
    if (!(rule.beta >= 0.0) || rule.beta >= 1.0)
        throw std::invalid_argument("beta must lie in [0, 1)");
    const std::uint32_t n =
        table.visits_[static_cast<std::size_t>(table.check_state(e.state))];
    const double alpha = 1.0 / (1.0 + static_cast<double>(n) / rule.visit_scale);
    double y = e.reward;
    if (!e.terminal)
        y += rule.beta * table.snapshot_max(e.next_state);
    const double q_new =
        (1.0 - alpha) * table.value(e.state, e.action) + alpha * y;

    const double bound = rule.reward_bound / (1.0 - rule.beta) + 1e-9;
    if (std::abs(q_new) > bound)
        throw std::logic_error("Q value escaped its analytic bound");

    table.set_value(e.state, e.action, q_new);
    table.visits_[static_cast<std::size_t>(e.state)] = n + 1;
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0)
        throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(capacity);
}

void ReplayMemory::push(const Experience& e) {
    if (data_.size() < capacity_) {
        data_.push_back(e);
    } else {
        data_[next_] = e; // overwrite oldest
    }
    next_ = (next_ + 1) % capacity_;
}

void ReplayMemory::sample(std::size_t batch, Rng& rng,
                          std::vector<const Experience*>& out) const {
    out.clear();
    if (data_.empty())
        return;
    if (data_.size() <= batch) {
        for (const auto& e : data_)
            out.push_back(&e);
        return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    static thread_local std::vector<std::size_t> chosen;
    chosen.clear();
    while (chosen.size() < batch) { // distinct draws; collisions are rare
        const std::size_t idx = pick(rng);
        if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end())
            continue;
        chosen.push_back(idx);
        out.push_back(&data_[idx]);
    }
}

int select_action(const QTable& table, int state,
                  const std::vector<int>& feasible, double epsilon, Rng& rng) {
    if (feasible.empty())
        throw std::invalid_argument("empty feasible action set");
    if (epsilon > 0.0) {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        if (u < epsilon) {
            std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
            return feasible[pick(rng)];
        }
    }
    int best = feasible.front();
    double best_v = table.value(state, best);
    for (std::size_t i = 1; i < feasible.size(); ++i) {
        const double v = table.value(state, feasible[i]);
        if (v > best_v) { // strict: ties keep the lowest key
            best_v = v;
            best = feasible[i];
        }
    }
    return best;
}

namespace {
constexpr std::uint64_t kTrainStream = 0xd20e;
constexpr std::uint64_t kAgentStream = 0xa6e7;
} // namespace

TrainResult train(DiscreteEnv& env, const TrainConfig& cfg) {
    if (cfg.episodes < 1 || cfg.batch_size < 1 || cfg.target_refresh < 1)
        throw std::invalid_argument("bad training configuration");
    TrainResult res{QTable(env.state_count(), env.action_count()), {}};
    QTable& table = res.table;
    ReplayMemory replay(cfg.replay_capacity);
    Rng agent_rng(derive_seed(cfg.seed, kAgentStream, 0));
    const QUpdateRule rule{cfg.beta, cfg.visit_scale, cfg.reward_bound};

    std::vector<const Experience*> batch;
    batch.reserve(static_cast<std::size_t>(cfg.batch_size));
    long long updates = 0;
    double epsilon = cfg.epsilon_start;
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        const double eps = cfg.pure_random_behavior
                               ? 1.0
                               : std::max(cfg.epsilon_floor, epsilon);
        EpisodeLog log;
        log.episode = ep;
        log.epsilon = eps;

        int s = env.begin_episode(derive_seed(cfg.seed, kTrainStream,
                                              static_cast<std::uint64_t>(ep)));
        bool terminal = false;
        while (!terminal) {
            const int a = select_action(table, s, env.feasible(), eps, agent_rng);
            const auto st = env.apply(a);
            replay.push({s, a, st.next_state, st.terminal, st.reward});

            replay.sample(static_cast<std::size_t>(cfg.batch_size), agent_rng,
                          batch);
            for (const Experience* e : batch)
                __builtin_prefetch(e);
            for (const Experience* e : batch) {
                __builtin_prefetch(table.row(e->next_state));
                __builtin_prefetch(table.row(e->state) + e->action);
            }
            for (const Experience* e : batch) {
                q_update(table, *e, rule);
                if (++updates % cfg.target_refresh == 0)
                    table.refresh_snapshot();
            }

            log.reward_total += st.reward;
            ++log.steps;
            terminal = st.terminal;
            s = st.next_state;
        }
        res.log.push_back(log);
        epsilon *= cfg.epsilon_decay;
    }
    return res;
}

// --- persistence -----------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'D', 'S', 'Q', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T> void put(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
template <typename T> void get(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
}
} // namespace

void save_policy(const QTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open policy file for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put(os, kVersion);
    put(os, static_cast<std::uint32_t>(table.n_states()));
    put(os, static_cast<std::uint32_t>(table.n_actions()));

    std::uint64_t n_visits = 0;
    for (int s = 0; s < table.n_states(); ++s)
        n_visits += table.visits(s) != 0;
    put(os, n_visits);
    for (int s = 0; s < table.n_states(); ++s)
        if (table.visits(s) != 0) {
            put(os, static_cast<std::uint32_t>(s));
            put(os, table.visits(s));
        }

    put(os, static_cast<std::uint64_t>(table.nonzero_values()));
    for (int s = 0; s < table.n_states(); ++s)
        for (int a = 0; a < table.n_actions(); ++a) {
            const double v = table.value(s, a);
            if (v != 0.0) {
                const std::uint64_t flat =
                    static_cast<std::uint64_t>(s) *
                        static_cast<std::uint64_t>(table.n_actions()) +
                    static_cast<std::uint64_t>(a);
                put(os, flat);
                std::uint64_t bits;
                std::memcpy(&bits, &v, sizeof(bits)); // bit-exact round trip
                put(os, bits);
            }
        }
    if (!os)
        throw std::runtime_error("short write to policy file: " + path);
}

QTable load_policy(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::runtime_error("cannot open policy file: " + path);
    char magic[4];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a policy file: " + path);
    std::uint32_t version = 0, n_states = 0, n_actions = 0;
    get(is, version);
    if (version != kVersion)
        throw std::runtime_error("unsupported policy file version");
    get(is, n_states);
    get(is, n_actions);
    QTable table(static_cast<int>(n_states), static_cast<int>(n_actions));

    std::uint64_t n_visits = 0;
    get(is, n_visits);
    for (std::uint64_t i = 0; i < n_visits; ++i) {
        std::uint32_t s = 0, n = 0;
        get(is, s);
        get(is, n);
        table.set_visits(static_cast<int>(s), n);
    }
    std::uint64_t n_values = 0;
    get(is, n_values);
    for (std::uint64_t i = 0; i < n_values; ++i) {
        std::uint64_t flat = 0, bits = 0;
        get(is, flat);
        get(is, bits);
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        table.set_value(static_cast<int>(flat / n_actions),
                        static_cast<int>(flat % n_actions), v);
    }
    if (!is)
        throw std::runtime_error("truncated policy file: " + path);
    return table;
}

} // namespace dronesim

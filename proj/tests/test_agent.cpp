#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "dronesim/agent.hpp"

using namespace dronesim;

namespace {

// Deterministic two-state chain: action 0 stays (reward 0.05, so waiting
// can never beat moving on under beta = 0.8), action 1 advances, paying
// 1.0 into the terminal state.
class ChainEnv : public DiscreteEnv {
public:
    int state_count() const override { return 3; } // 2 live + terminal
    int action_count() const override { return 2; }
    int begin_episode(std::uint64_t) override {
        s_ = 0;
        return s_;
    }
    const std::vector<int>& feasible() const override { return acts_; }
    Step apply(int a) override {
        Step st;
        if (a == 0) {
            st = {s_, 0.05, false};
        } else if (s_ == 0) {
            s_ = 1;
            st = {1, 0.5, false};
        } else {
            s_ = 2;
            st = {2, 1.0, true};
        }
        if (!st.terminal && ++steps_ >= 20) // stay-forever cutoff
            st.terminal = true;
        if (st.terminal) {
            steps_ = 0;
            s_ = 0;
        }
        return st;
    }

private:
    int s_ = 0;
    long steps_ = 0;
    std::vector<int> acts_ = {0, 1};
};

struct TempFile {
    std::string path;
    explicit TempFile(const char* name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("q_update follows the visit-count learning rate") {
    QUpdateRule rule;
    rule.beta = 0.8;

    SUBCASE("first visit overwrites entirely") {
        QTable t(4, 3);
        q_update(t, {0, 1, 2, true, 1.0}, rule);
        CHECK(t.value(0, 1) == 1.0); // alpha = 1 at n = 0
        CHECK(t.visits(0) == 1);
    }
    SUBCASE("n = 5 halves the step") {
        QTable t(4, 3);
        t.set_value(2, 0, 1.0);
        t.set_visits(2, 5);
        q_update(t, {2, 0, 3, true, 1.0}, rule);
        CHECK(t.value(2, 0) == doctest::Approx(1.0)); // 0.5*1 + 0.5*1
        t.set_value(2, 1, 0.0);
        q_update(t, {2, 1, 3, true, 1.0}, rule); // now n = 6, alpha = 5/11
        CHECK(t.value(2, 1) == doctest::Approx(5.0 / 11.0));
    }
    SUBCASE("bootstrap adds beta times the snapshot maximum") {
        QTable t(4, 3);
        t.set_value(1, 2, 2.0); // best action at the next state
        t.set_value(1, 0, 1.5);
        t.refresh_snapshot();
        q_update(t, {0, 0, 1, false, 1.0}, rule);
        CHECK(t.value(0, 0) == doctest::Approx(2.6)); // 1 + 0.8 * 2
    }
    SUBCASE("terminal transitions ignore the next state") {
        QTable t(4, 3);
        t.set_value(1, 2, 100.0);
        t.refresh_snapshot();
        q_update(t, {0, 0, 1, true, 1.0}, rule);
        CHECK(t.value(0, 0) == 1.0);
    }
    SUBCASE("visits are per state, not per action") {
        QTable t(4, 3);
        q_update(t, {3, 0, 0, true, 1.0}, rule);
        CHECK(t.visits(3) == 1);
        q_update(t, {3, 1, 0, true, 1.0}, rule); // alpha = 1/(1+1/5)
        CHECK(t.value(3, 1) == doctest::Approx(5.0 / 6.0));
        CHECK(t.visits(3) == 2);
    }
}

TEST_CASE("q_update rejects diverging values") {
    QUpdateRule rule;
    rule.beta = 0.8;
    rule.reward_bound = 1.01;
    QTable t(3, 2);
    // plant an absurd bootstrap source: |y| > bound / (1 - beta)
    t.set_value(1, 0, 100.0);
    t.refresh_snapshot();
    CHECK_THROWS_AS(q_update(t, {0, 0, 1, false, 1.0}, rule),
                    std::logic_error);
    CHECK_THROWS_AS(q_update(t, {0, 0, 0, true, 50.0}, rule),
                    std::logic_error);
}

TEST_CASE("the snapshot stays frozen between refreshes") {
    QTable t(3, 2);
    t.set_value(0, 0, 1.0);
    t.set_value(0, 1, 3.0);
    t.refresh_snapshot();
    CHECK(t.snapshot_max(0) == 3.0);

    t.set_value(0, 1, -7.0); // live change must not leak into the snapshot
    t.set_value(0, 0, 9.0);
    CHECK(t.snapshot_max(0) == 3.0);
    CHECK(t.snapshot_value(0, 1) == 3.0);
    CHECK(t.value(0, 1) == -7.0);

    t.refresh_snapshot();
    CHECK(t.snapshot_max(0) == 9.0);

    // states never written since the refresh read through to live values
    t.set_value(1, 0, 4.0);
    t.refresh_snapshot();
    t.set_value(1, 1, 2.0);
    CHECK(t.snapshot_max(1) == 4.0);
}

TEST_CASE("select_action explores and exploits correctly") {
    QTable t(2, 6);
    t.set_value(0, 1, 0.5);
    t.set_value(0, 4, 0.5);
    t.set_value(0, 3, 0.2);
    const std::vector<int> feasible = {1, 3, 4};

    SUBCASE("greedy ties break to the lowest key") {
        Rng rng(1);
        CHECK(select_action(t, 0, feasible, 0.0, rng) == 1);
    }
    SUBCASE("greedy ignores infeasible actions") {
        t.set_value(0, 0, 99.0); // not in the feasible set
        Rng rng(1);
        CHECK(select_action(t, 0, feasible, 0.0, rng) == 1);
    }
    SUBCASE("greedy consumes no randomness") {
        Rng rng(42), copy(42);
        select_action(t, 0, feasible, 0.0, rng);
        CHECK(rng == copy);
    }
    SUBCASE("single feasible action is returned as-is") {
        Rng rng(1);
        const std::vector<int> one = {3};
        CHECK(select_action(t, 0, one, 0.0, rng) == 3);
        CHECK(select_action(t, 0, one, 1.0, rng) == 3);
    }
    SUBCASE("epsilon = 1 is uniform over the feasible set") {
        Rng rng(7);
        const int draws = 100000;
        std::vector<int> counts(6, 0);
        for (int i = 0; i < draws; ++i)
            ++counts[static_cast<std::size_t>(
                select_action(t, 0, feasible, 1.0, rng))];
        CHECK(counts[0] == 0);
        CHECK(counts[2] == 0);
        CHECK(counts[5] == 0);
        for (int a : feasible)
            CHECK(std::abs(counts[static_cast<std::size_t>(a)] / double(draws) -
                           1.0 / 3.0) < 0.02);
    }
    SUBCASE("empty feasible set is a contract violation") {
        Rng rng(1);
        const std::vector<int> none;
        CHECK_THROWS_AS(select_action(t, 0, none, 0.5, rng),
                        std::invalid_argument);
    }
}

TEST_CASE("replay memory is a ring with distinct sampling") {
    ReplayMemory mem(3);
    for (int i = 0; i < 5; ++i)
        mem.push({i, 0, 0, false, double(i)});
    CHECK(mem.size() == 3);
    // entries 3, 4 overwrote 0, 1; 2 survives
    std::vector<int> states;
    for (std::size_t i = 0; i < mem.size(); ++i)
        states.push_back(mem.at(i).state);
    std::sort(states.begin(), states.end());
    CHECK(states == std::vector<int>{2, 3, 4});

    SUBCASE("samples within one batch are distinct") {
        ReplayMemory big(100);
        for (int i = 0; i < 100; ++i)
            big.push({i, 0, 0, false, 0.0});
        Rng rng(3);
        std::vector<const Experience*> out;
        for (int trial = 0; trial < 200; ++trial) {
            big.sample(32, rng, out);
            REQUIRE(out.size() == 32);
            std::vector<const Experience*> uniq(out);
            std::sort(uniq.begin(), uniq.end());
            REQUIRE(std::adjacent_find(uniq.begin(), uniq.end()) == uniq.end());
        }
    }
    SUBCASE("asking for more than stored returns everything") {
        Rng rng(4);
        std::vector<const Experience*> out;
        mem.sample(32, rng, out);
        CHECK(out.size() == 3);
    }
}

TEST_CASE("training is deterministic and learns the chain") {
    ChainEnv env;
    TrainConfig cfg;
    cfg.episodes = 300;
    cfg.seed = 12;
    cfg.replay_capacity = 2000;
    cfg.batch_size = 8;
    cfg.target_refresh = 50;
    cfg.reward_bound = 1.0;

    const TrainResult a = train(env, cfg);
    const TrainResult b = train(env, cfg);
    REQUIRE(a.table.n_states() == 3);
    for (int s = 0; s < 3; ++s) {
        CHECK(a.table.visits(s) == b.table.visits(s));
        for (int act = 0; act < 2; ++act)
            CHECK(a.table.value(s, act) == b.table.value(s, act));
    }
    CHECK(a.log.size() == 300);

    // advancing dominates staying from both live states
    CHECK(a.table.value(0, 1) > a.table.value(0, 0));
    CHECK(a.table.value(1, 1) > a.table.value(1, 0));

    // epsilon decays multiplicatively and respects the floor
    CHECK(a.log[0].epsilon == doctest::Approx(1.0));
    CHECK(a.log[1].epsilon == doctest::Approx(0.995));
    CHECK(a.log.back().epsilon >= cfg.epsilon_floor - 1e-12);
}

TEST_CASE("myopic training recovers immediate rewards") {
    ChainEnv env;
    TrainConfig cfg;
    cfg.episodes = 400;
    cfg.beta = 0.0;
    cfg.seed = 31;
    cfg.batch_size = 8;
    cfg.reward_bound = 1.0;
    const TrainResult r = train(env, cfg);
    CHECK(r.table.value(0, 0) == doctest::Approx(0.05).epsilon(0.01));
    CHECK(r.table.value(0, 1) == doctest::Approx(0.5).epsilon(0.01));
    CHECK(r.table.value(1, 1) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("policies survive a save/load round trip") {
    SUBCASE("empty table") {
        TempFile f("dronesim_test_policy_empty.bin");
        QTable t(5, 7);
        save_policy(t, f.path);
        const QTable r = load_policy(f.path);
        CHECK(r.n_states() == 5);
        CHECK(r.n_actions() == 7);
        CHECK(r.nonzero_values() == 0);
    }
    SUBCASE("large randomized table is bit-exact") {
        TempFile f("dronesim_test_policy_big.bin");
        QTable t(2500, 40); // 100k entries
        Rng rng(6);
        std::uniform_real_distribution<double> v(-2.0, 2.0);
        for (int s = 0; s < 2500; ++s) {
            t.set_visits(s, static_cast<std::uint32_t>(rng() % 1000));
            for (int a = 0; a < 40; ++a)
                t.set_value(s, a, v(rng));
        }
        save_policy(t, f.path);
        const QTable r = load_policy(f.path);
        REQUIRE(r.n_states() == t.n_states());
        REQUIRE(r.n_actions() == t.n_actions());
        for (int s = 0; s < 2500; ++s) {
            REQUIRE(r.visits(s) == t.visits(s));
            for (int a = 0; a < 40; ++a)
                REQUIRE(r.value(s, a) == t.value(s, a));
        }
    }
    SUBCASE("corrupt files are rejected") {
        TempFile f("dronesim_test_policy_bad.bin");
        {
            std::ofstream os(f.path, std::ios::binary);
            os << "not a policy";
        }
        CHECK_THROWS_AS(load_policy(f.path), std::runtime_error);
        CHECK_THROWS_AS(load_policy("/nonexistent/nowhere.bin"),
                        std::runtime_error);

        // truncation after a valid header
        TempFile g("dronesim_test_policy_trunc.bin");
        QTable t(50, 4);
        t.set_value(3, 2, 1.5);
        t.set_visits(3, 9);
        save_policy(t, g.path);
        const auto full = std::filesystem::file_size(g.path);
        std::filesystem::resize_file(g.path, full - 6);
        CHECK_THROWS_AS(load_policy(g.path), std::runtime_error);
    }
}

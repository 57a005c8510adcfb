#include "dronesim/baseline.hpp"

#include <stdexcept>

namespace dronesim {

Action baseline_action(const std::vector<double>& rss_dbm, int serving_bs,
                       const std::vector<int>& free_rrbs, bool ho_allowed,
                       double hysteresis_db, std::int64_t q_bits) {
    const int n_bs = static_cast<int>(rss_dbm.size());
    if (serving_bs < 0 || serving_bs >= n_bs)
        throw std::out_of_range("serving BS out of range");
    if (free_rrbs.size() != rss_dbm.size())
        throw std::invalid_argument("free_rrbs size mismatch");

    int target = serving_bs;
    if (ho_allowed) {
        int best = 0;
        for (int i = 1; i < n_bs; ++i)
            if (rss_dbm[static_cast<std::size_t>(i)] >
                rss_dbm[static_cast<std::size_t>(best)])
                best = i;
        if (best != serving_bs &&
            rss_dbm[static_cast<std::size_t>(best)] >
                rss_dbm[static_cast<std::size_t>(serving_bs)] + hysteresis_db)
            target = best;
    }

    Action a;
    a.target_bs = target;
    a.power_level = 0;
    a.rrb_count =
        q_bits > 0 ? free_rrbs[static_cast<std::size_t>(target)] : 0;
    return a;
}

std::vector<double> baseline_rss_dbm(double p_max_dbm,
                                     const std::vector<double>& measured_pl_db) {
    std::vector<double> rss;
    rss.reserve(measured_pl_db.size());
    for (double pl : measured_pl_db)
        rss.push_back(p_max_dbm - pl);
    return rss;
}

} // namespace dronesim

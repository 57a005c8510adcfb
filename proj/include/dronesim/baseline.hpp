#pragma once

#include <cstdint>
#include <vector>

#include "dronesim/environment.hpp"

namespace dronesim {

// Classic RSS handover with hysteresis: switch to the strongest BS when it
// beats the serving one by more than hysteresis_db (strict), earliest at
// the allowed handover instants. Transmission is greedy: whenever the
// buffer is non-empty, all free RRBs of the (possibly new) serving BS at
// maximum power; power_level 0 is P_max by construction.
// A triggered handover with an empty buffer yields rrb_count == 0 but
// still switches target_bs.
Action baseline_action(const std::vector<double>& rss_dbm, int serving_bs,
                       const std::vector<int>& free_rrbs, bool ho_allowed,
                       double hysteresis_db, std::int64_t q_bits);

// RSS the drone attributes to each BS: transmit power minus the measured
// large-scale loss (channel reciprocity).
std::vector<double> baseline_rss_dbm(double p_max_dbm,
                                     const std::vector<double>& measured_pl_db);

} // namespace dronesim

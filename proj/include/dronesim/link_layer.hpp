#pragma once

#include <cmath>
#include <vector>

#include "dronesim/a2g_channel.hpp"

namespace dronesim {

// Uplink grant for one TTI. rrb_count == 0 or power_w == 0 means the
// drone does not transmit.
struct Allocation {
    int rrb_count = 0;
    double power_w = 0.0;
};

struct LinkBudget {
    double subcarrier_hz = 15e3;
    int sc_per_rrb = 12;
    double noise_density_w_hz = 0.0;   // thermal noise plus receiver figure
    double ext_interference_w_hz = 0.0; // co-channel activity at the BS
    double tx_gain_db = 0.0;
    double rx_gain_db = 0.0;
};

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

// Shannon rate of an SC-FDMA uplink in bits/s. The effective SNR is the
// harmonic combination P * (sum_s 1/alpha_s)^-1 over the allocated
// subcarriers, so one faded subcarrier drags the whole grant down.
// chan.small_scale must hold exactly rrb_count * sc_per_rrb gains.
double uplink_rate(const Allocation& alloc, const LinkBudget& budget,
                   const ChannelRealization& chan);

// Received power (dBm) the drone's transmission produces at one BS.
double interference_to_bs(double tx_power_dbm, double path_loss_db,
                          double tx_gain_db, double rx_gain_db);

// Sum of received powers, converted to milliwatts (power adds in linear
// units, not in dB).
double total_interference_mw(const std::vector<double>& received_dbm);

} // namespace dronesim

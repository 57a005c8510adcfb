#include "dronesim/link_layer.hpp"

#include <stdexcept>

namespace dronesim {

double uplink_rate(const Allocation& alloc, const LinkBudget& budget,
                   const ChannelRealization& chan) {
    if (alloc.rrb_count < 0 || alloc.power_w < 0.0)
        throw std::invalid_argument("negative allocation");
    if (alloc.rrb_count == 0 || alloc.power_w == 0.0)
        return 0.0;
    const std::size_t n_sc =
        static_cast<std::size_t>(alloc.rrb_count) * budget.sc_per_rrb;
    if (chan.small_scale.size() != n_sc)
        throw std::logic_error("small_scale length != allocated subcarriers");

    const double gain_db =
        -chan.large_scale_db() + budget.tx_gain_db + budget.rx_gain_db;
    const double g_large = std::pow(10.0, gain_db / 10.0);
    const double noise_w =
        (budget.noise_density_w_hz + budget.ext_interference_w_hz) *
        budget.subcarrier_hz;

    double sum_inv = 0.0; // sum over subcarriers of 1/alpha_s
    for (double h2 : chan.small_scale) {
        if (h2 <= 0.0)
            return 0.0; // fully faded subcarrier kills the grant
        sum_inv += noise_w / (g_large * h2);
    }
    const double gamma = alloc.power_w / sum_inv;
    return budget.subcarrier_hz * static_cast<double>(n_sc) *
           std::log2(1.0 + gamma);
}

double interference_to_bs(double tx_power_dbm, double path_loss_db,
                          double tx_gain_db, double rx_gain_db) {
    return tx_power_dbm - path_loss_db + tx_gain_db + rx_gain_db;
}

double total_interference_mw(const std::vector<double>& received_dbm) {
    double mw = 0.0;
    for (double dbm : received_dbm)
        mw += dbm_to_mw(dbm);
    return mw;
}

} // namespace dronesim

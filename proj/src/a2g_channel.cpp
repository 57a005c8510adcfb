#include "dronesim/a2g_channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dronesim {

namespace {
constexpr double kMinHeight = 22.5;
constexpr double kMaxHeight = 300.0;
constexpr double kFullLosHeight = 100.0;

void check_height(double h) {
    if (!(h > kMinHeight) || !(h <= kMaxHeight))
        throw std::domain_error("drone height outside (22.5, 300] m");
}
} // namespace

double los_probability(double d2d_m, double height_m) {
    check_height(height_m);
    if (height_m > kFullLosHeight)
        return 1.0;
    const double lg = std::log10(height_m);
    const double p1 = 4300.0 * lg - 3800.0;
    const double d1 = std::max(460.0 * lg - 700.0, 18.0);
    if (d2d_m <= d1)
        return 1.0;
    const double p = d1 / d2d_m +
                     std::exp(-d2d_m / p1) * (1.0 - d1 / d2d_m);
    return std::clamp(p, 0.0, 1.0);
}

double path_loss_los_db(double d3d_m, double fc_ghz) {
    const double d = std::max(d3d_m, 1.0);
    return 28.0 + 22.0 * std::log10(d) + 20.0 * std::log10(fc_ghz);
}

double path_loss_nlos_db(double d3d_m, double height_m, double fc_ghz) {
    const double d = std::max(d3d_m, 1.0);
    return 15.0 + (46.0 - 7.0 * std::log10(height_m)) * std::log10(d) +
           20.0 * std::log10(fc_ghz);
}

double shadow_sigma_db(double height_m, bool los) {
    if (!los)
        return 6.0;
    return 4.64 * std::exp(-0.00066 * height_m);
}

ChannelRealization realize_channel(const LinkGeometry& geom, double fc_ghz,
                                   int n_subcarriers, Rng& rng) {
    if (n_subcarriers < 0)
        throw std::invalid_argument("negative subcarrier count");
    ChannelRealization ch;
    const double h = geom.drone_height;
    const double p_los = los_probability(geom.d2d, h);
    ch.los = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_los;
    ch.path_loss_db = ch.los ? path_loss_los_db(geom.d3d, fc_ghz)
                             : path_loss_nlos_db(geom.d3d, h, fc_ghz);
    const double sigma = shadow_sigma_db(h, ch.los);
    ch.shadow_db = std::normal_distribution<double>(0.0, sigma)(rng);
    ch.small_scale.resize(static_cast<std::size_t>(n_subcarriers));
    std::exponential_distribution<double> exp1(1.0);
    for (auto& g : ch.small_scale)
        g = exp1(rng);
    return ch;
}

} // namespace dronesim

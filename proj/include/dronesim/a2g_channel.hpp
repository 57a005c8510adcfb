#pragma once

#include <vector>

#include "dronesim/geometry.hpp"
#include "dronesim/rng.hpp"

namespace dronesim {

// One realization of the air-to-ground channel towards a BS.
// large_scale_db() is what a power measurement at the BS would see;
// small_scale holds per-subcarrier |H|^2 gains (unit-mean exponential,
// i.e. Rayleigh amplitude), one entry per allocated subcarrier.
struct ChannelRealization {
    bool los = true;
    double path_loss_db = 0.0; // deterministic distance-dependent part
    double shadow_db = 0.0;    // zero-mean lognormal shadowing draw
    std::vector<double> small_scale;

    double large_scale_db() const { return path_loss_db + shadow_db; }
};

// LoS probability of the low-altitude A2G model. Valid for drone heights
// in (22.5, 300] m; above 100 m the link is deterministically LoS.
// Throws std::domain_error outside the height range.
double los_probability(double d2d_m, double height_m);

// LoS / NLoS path loss in dB at carrier frequency fc (GHz). Distances
// below 1 m are clamped to 1 m to keep the log terms sane.
double path_loss_los_db(double d3d_m, double fc_ghz);
double path_loss_nlos_db(double d3d_m, double height_m, double fc_ghz);

// Shadow fading standard deviation (dB). Pure formula, no domain check:
// LoS sigma decays with height, NLoS is a constant 6 dB.
double shadow_sigma_db(double height_m, bool los);

// Draws LoS state, shadowing and n_subcarriers small-scale gains in that
// fixed order (reproducibility contract for a given rng state).
ChannelRealization realize_channel(const LinkGeometry& geom, double fc_ghz,
                                   int n_subcarriers, Rng& rng);

} // namespace dronesim

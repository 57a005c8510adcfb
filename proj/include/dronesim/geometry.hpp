#pragma once

#include <cmath>

namespace dronesim {

struct Position3D {
    double x = 0.0; // m
    double y = 0.0; // m
    double z = 0.0; // m, height above ground
};

// Drone-to-BS link geometry. d2d is the ground projection, d3d the true
// antenna-to-antenna distance. drone_height is the drone altitude above
// ground, which is the height parameter of the A2G channel model.
struct LinkGeometry {
    double d2d = 0.0;
    double d3d = 0.0;
    double drone_height = 0.0;
};

inline LinkGeometry make_link_geometry(const Position3D& drone,
                                       const Position3D& bs) {
    LinkGeometry g;
    const double dx = drone.x - bs.x;
    const double dy = drone.y - bs.y;
    const double dz = drone.z - bs.z;
    g.d2d = std::sqrt(dx * dx + dy * dy);
    g.d3d = std::sqrt(g.d2d * g.d2d + dz * dz);
    g.drone_height = drone.z;
    return g;
}

} // namespace dronesim

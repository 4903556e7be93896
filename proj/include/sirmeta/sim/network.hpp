#pragma once

#include <cmath>
#include <cstdint>
#include <array>
#include <vector>

#include "sirmeta/errors.hpp"
#include "sirmeta/sim/philox.hpp"
#include "sirmeta/sim/sim_config.hpp"

namespace sirmeta::sim {

struct Point {
    double x = 0;
    double y = 0;
};

/// Square of the given side with opposite edges identified.
class Torus {
public:
    explicit Torus(double side) : side_(side) {}

    double side() const noexcept { return side_; }

    double delta(double a, double b) const {
        double d = a - b;
        d -= side_ * std::round(d / side_);
        return d;
    }
    double dist2(const Point& p, const Point& q) const {
        const double dx = delta(p.x, q.x);
        const double dy = delta(p.y, q.y);
        return dx * dx + dy * dy;
    }
    double dist(const Point& p, const Point& q) const { return std::sqrt(dist2(p, q)); }

private:
    double side_;
};

/// Poisson(density * side^2) points, i.i.d. uniform on [0, side)^2. The count
/// comes from entity 0 of the stream and point i from entity 1, index i.
std::vector<Point> generate_ppp(double density, double side, const Stream& stream);

/// Bucket grid answering torus nearest-neighbour queries; ties go to the
/// lowest index.
class NearestIndex {
public:
    NearestIndex(const std::vector<Point>& points, const Torus& torus);
    int nearest(const Point& p) const;

private:
    int brute_force(const Point& p) const;

    const std::vector<Point>* points_;
    Torus torus_;
    int grid_ = 1;
    double cell_ = 0;
    std::vector<std::vector<int>> buckets_;
};

struct TaggedLink {
    int bs = 0;
    Point ue;
    double distance = 0;
    bool synthetic = false;  // the cell drew no UE
};

struct NetworkRealization {
    double side = 0;
    std::vector<Point> bs_points;
    std::vector<Point> ue_points;
    std::vector<int> association;    // UE index -> BS index
    std::vector<TaggedLink> tagged;  // one per BS, in BS order

    Torus torus() const { return Torus(side); }
    int cells() const { return static_cast<int>(bs_points.size()); }
};

/// Voronoi cell of BS b under the torus metric, as a convex polygon of
/// offsets from bs[b] (counter-clockwise, not wrapped).
std::vector<Point> voronoi_cell(const std::vector<Point>& bs, int b, const Torus& torus);

/// Uniform point of a convex polygon given by offsets from its origin, which
/// must lie inside it; u holds three uniforms.
Point uniform_in_polygon(const std::vector<Point>& poly, const std::array<double, 3>& u);

/// Nearest-BS association and one tagged UE per cell: the first drawn UE
/// that falls in the cell, or a uniform point of the cell when none did.
NetworkRealization build_realization(const SimConfig& cfg, std::uint32_t realization);

/// Same, from given points (entity streams are used only for fallbacks).
NetworkRealization build_realization(double side, std::vector<Point> bs, std::vector<Point> ue,
                                     const Stream& fallback);

} // namespace sirmeta::sim

#include "sirmeta/sim/network.hpp"

#include <algorithm>
#include <random>

namespace sirmeta::sim {

std::vector<Point> generate_ppp(double density, double side, const Stream& stream) {
    if (!(density > 0 && side > 0)) throw DomainError("generate_ppp: density and side must be > 0");
    StreamEngine engine(stream, 0);
    std::poisson_distribution<long long> count(density * side * side);
    const long long n = count(engine);
    std::vector<Point> points(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const auto u = stream.uniforms(1, static_cast<std::uint64_t>(i));
        points[i] = {u[0] * side, u[1] * side};
    }
    return points;
}

NearestIndex::NearestIndex(const std::vector<Point>& points, const Torus& torus)
    : points_(&points), torus_(torus) {
    const auto n = static_cast<double>(points.size());
    grid_ = std::max(1, static_cast<int>(std::sqrt(n / 2.0)));
    cell_ = torus_.side() / grid_;
    buckets_.assign(static_cast<std::size_t>(grid_) * grid_, {});
    auto slot = [&](double v) {
        const double w = v - torus_.side() * std::floor(v / torus_.side());
        return std::min(grid_ - 1, static_cast<int>(w / cell_));
    };
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
        buckets_[slot(points[i].x) * grid_ + slot(points[i].y)].push_back(i);
    }
}

int NearestIndex::brute_force(const Point& p) const {
    int best = -1;
    double best_d2 = 0;
    for (int i = 0; i < static_cast<int>(points_->size()); ++i) {
        const double d2 = torus_.dist2(p, (*points_)[i]);
        if (best < 0 || d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

int NearestIndex::nearest(const Point& p) const {
    if (points_->empty()) return -1;
    const double side = torus_.side();
    const double wx = p.x - side * std::floor(p.x / side);
    const double wy = p.y - side * std::floor(p.y / side);
    const int cx = std::min(grid_ - 1, static_cast<int>(wx / cell_));
    const int cy = std::min(grid_ - 1, static_cast<int>(wy / cell_));

    int best = -1;
    double best_d2 = 0;
    auto visit = [&](int bx, int by) {
        bx = ((bx % grid_) + grid_) % grid_;
        by = ((by % grid_) + grid_) % grid_;
        for (int i : buckets_[bx * grid_ + by]) {
            const double d2 = torus_.dist2(p, (*points_)[i]);
            if (best < 0 || d2 < best_d2 || (d2 == best_d2 && i < best)) {
                best = i;
                best_d2 = d2;
            }
        }
    };
    for (int r = 0;; ++r) {
        if (2 * r + 1 > grid_) return brute_force(p);
        if (r == 0) {
            visit(cx, cy);
        } else {
            for (int d = -r; d <= r; ++d) {
                visit(cx + d, cy - r);
                visit(cx + d, cy + r);
            }
            for (int d = -r + 1; d <= r - 1; ++d) {
                visit(cx - r, cy + d);
                visit(cx + r, cy + d);
            }
        }
        // Everything outside the visited block is at least r cells away.
        const double reach = r * cell_;
        if (best >= 0 && best_d2 < reach * reach) return best;
    }
}

namespace {

double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }

// Keeps the part of poly with p.v <= c.
std::vector<Point> clip(const std::vector<Point>& poly, const Point& v, double c) {
    std::vector<Point> out;
    out.reserve(poly.size() + 1);
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        const double fa = a.x * v.x + a.y * v.y - c;
        const double fb = b.x * v.x + b.y * v.y - c;
        if (fa <= 0) out.push_back(a);
        if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
            const double t = fa / (fa - fb);
            out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
        }
    }
    return out;
}

} // namespace

std::vector<Point> voronoi_cell(const std::vector<Point>& bs, int b, const Torus& torus) {
    // Start from the fundamental square, whose sides are the bisectors with b's own images.
    const double h = 0.5 * torus.side();
    std::vector<Point> poly{{-h, -h}, {h, -h}, {h, h}, {-h, h}};
    std::vector<std::pair<double, Point>> others;
    others.reserve(9 * bs.size());
    for (int x = 0; x < static_cast<int>(bs.size()); ++x) {
        if (x == b) continue;
        const Point v{torus.delta(bs[x].x, bs[b].x), torus.delta(bs[x].y, bs[b].y)};
        // Other images matter too when the network is sparse.
        for (int i = -1; i <= 1; ++i) {
            for (int j = -1; j <= 1; ++j) {
                const Point w{v.x + 2 * h * i, v.y + 2 * h * j};
                others.emplace_back(w.x * w.x + w.y * w.y, w);
            }
        }
    }
    std::sort(others.begin(), others.end(), [](const auto& a, const auto& c) { return a.first < c.first; });
    double reach2 = 2 * h * h;  // squared distance of the farthest vertex
    for (const auto& [d2, v] : others) {
        // A BS farther than twice the farthest vertex cannot cut the cell.
        if (d2 > 4 * reach2) break;
        poly = clip(poly, v, 0.5 * d2);
        reach2 = 0;
        for (const Point& p : poly) reach2 = std::max(reach2, p.x * p.x + p.y * p.y);
    }
    return poly;
}

Point uniform_in_polygon(const std::vector<Point>& poly, const std::array<double, 3>& u) {
    // Fan of triangles (0, p_i, p_{i+1}); pick one by area, then a uniform point in it.
    std::vector<double> cum(poly.size(), 0.0);
    double total = 0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        total += 0.5 * std::abs(cross(poly[i], poly[(i + 1) % poly.size()]));
        cum[i] = total;
    }
    const auto i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u[0] * total) - cum.begin());
    const Point& a = poly[std::min(i, poly.size() - 1)];
    const Point& c = poly[(std::min(i, poly.size() - 1) + 1) % poly.size()];
    double s = u[1], t = u[2];
    if (s + t > 1) {
        s = 1 - s;
        t = 1 - t;
    }
    return {s * a.x + t * c.x, s * a.y + t * c.y};
}

NetworkRealization build_realization(double side, std::vector<Point> bs, std::vector<Point> ue,
                                     const Stream& fallback) {
    if (bs.empty()) throw DomainError("build_realization: no base stations drawn");
    NetworkRealization net;
    net.side = side;
    net.bs_points = std::move(bs);
    net.ue_points = std::move(ue);
    const Torus torus(side);
    const NearestIndex index(net.bs_points, torus);

    net.association.resize(net.ue_points.size());
    const int cells = net.cells();
    std::vector<int> first(cells, -1);
    for (int i = 0; i < static_cast<int>(net.ue_points.size()); ++i) {
        const int b = index.nearest(net.ue_points[i]);
        net.association[i] = b;
        if (first[b] < 0) first[b] = i;
    }

    net.tagged.resize(cells);
    for (int b = 0; b < cells; ++b) {
        TaggedLink& link = net.tagged[b];
        link.bs = b;
        if (first[b] >= 0) {
            link.ue = net.ue_points[first[b]];
        } else {
            link.synthetic = true;
            const auto u01 = fallback.uniforms(static_cast<std::uint32_t>(b), 0);
            const auto u2 = fallback.uniforms(static_cast<std::uint32_t>(b), 1);
            const Point off = uniform_in_polygon(voronoi_cell(net.bs_points, b, torus), {u01[0], u01[1], u2[0]});
            const Point& o = net.bs_points[b];
            link.ue = {o.x + off.x - side * std::floor((o.x + off.x) / side),
                       o.y + off.y - side * std::floor((o.y + off.y) / side)};
        }
        link.distance = torus.dist(link.ue, net.bs_points[b]);
    }
    return net;
}

NetworkRealization build_realization(const SimConfig& cfg, std::uint32_t realization) {
    cfg.validate();
    auto bs = generate_ppp(cfg.lambda_b, cfg.region_side, Stream(cfg.seed, realization, Purpose::bs_points));
    auto ue = generate_ppp(cfg.lambda_u, cfg.region_side, Stream(cfg.seed, realization, Purpose::ue_points));
    return build_realization(cfg.region_side, std::move(bs), std::move(ue),
                             Stream(cfg.seed, realization, Purpose::fallback));
}

} // namespace sirmeta::sim

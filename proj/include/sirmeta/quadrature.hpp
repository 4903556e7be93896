#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "sirmeta/errors.hpp"

namespace sirmeta::quadrature {

/// Gauss-Legendre rule mapped to [0, 1].
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule on [0, 1] (Newton iteration on P_n).
inline GaussRule gauss_legendre(int n) {
    GaussRule rule{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 1;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1, p2 = 0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double w = 1.0 / ((1 - z * z) * pp * pp);
        rule.nodes[i] = 0.5 * (1 - z);
        rule.nodes[n - 1 - i] = 0.5 * (1 + z);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

struct QuadResult {
    double value = 0;
    double abs_error = 0;
    int subdivisions = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <typename F>
Segment gk15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = f(center - dx) + f(center + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Bisects the segment with the largest error estimate until the total error
/// is below max(abs_tol, rel_tol * |I|). Throws ConvergenceError when the
/// subdivision budget is exhausted first.
template <typename F>
QuadResult integrate_adaptive(F&& f, double a, double b, double abs_tol, double rel_tol,
                              int max_subdivisions = 2000) {
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk15(f, a, b);
    double total = first.value;
    double error = first.error;
    heap.push(first);
    int subdivisions = 0;
    while (error > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (subdivisions >= max_subdivisions) {
            throw ConvergenceError("adaptive quadrature exceeded " +
                                   std::to_string(max_subdivisions) +
                                   " subdivisions (error estimate " + std::to_string(error) +
                                   ")");
        }
        const auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-sum to shed accumulated rounding from the running updates.
    double resum = 0, reerr = 0;
    while (!heap.empty()) {
        resum += heap.top().value;
        reerr += heap.top().error;
        heap.pop();
    }
    return {resum, reerr, subdivisions};
}

/// Composite Gauss-Legendre nodes and weights over consecutive panels.
struct CompositeRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

inline CompositeRule composite_rule(const std::vector<double>& edges, const GaussRule& base) {
    const Eigen::Index per = base.nodes.size();
    const Eigen::Index panels = static_cast<Eigen::Index>(edges.size()) - 1;
    CompositeRule out{Eigen::VectorXd(panels * per), Eigen::VectorXd(panels * per)};
    for (Eigen::Index p = 0; p < panels; ++p) {
        const double a = edges[p];
        const double h = edges[p + 1] - a;
        out.nodes.segment(p * per, per) = (a + h * base.nodes.array()).matrix();
        out.weights.segment(p * per, per) = h * base.weights;
    }
    return out;
}

} // namespace sirmeta::quadrature

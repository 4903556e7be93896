#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sirmeta/errors.hpp"

namespace sirmeta {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Pool-adjacent-violators projection onto nondecreasing sequences
/// (least squares, equal weights).
template <typename Derived>
VectorX<typename Derived::Scalar> isotonic_projection(const Eigen::MatrixBase<Derived>& y) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = y.size();
    std::vector<Scalar> level;
    std::vector<Eigen::Index> width;
    level.reserve(n);
    width.reserve(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        level.push_back(y[i]);
        width.push_back(1);
        while (level.size() > 1 && level[level.size() - 2] > level.back()) {
            const Scalar v = level.back();
            const Eigen::Index w = width.back();
            level.pop_back();
            width.pop_back();
            level.back() = (level.back() * Scalar(width.back()) + v * Scalar(w)) /
                           Scalar(width.back() + w);
            width.back() += w;
        }
    }
    VectorX<Scalar> out(n);
    Eigen::Index pos = 0;
    for (std::size_t b = 0; b < level.size(); ++b) {
        out.segment(pos, width[b]).setConstant(level[b]);
        pos += width[b];
    }
    return out;
}

/// CDF of a [0, 1]-valued random variable sampled on a grid.
///
/// values[i] = P(X < u_points[i]); the last value is 1, so an atom at 1 shows
/// up as the jump into the final grid point. Between grid points the CDF is
/// interpolated linearly.
template <typename Scalar>
class CdfGridT {
public:
    using Vector = VectorX<Scalar>;

    CdfGridT() = default;

    CdfGridT(Vector u_points, Vector values)
        : u_(std::move(u_points)), f_(std::move(values)) {
        validate();
    }

    /// `n` equally spaced points on [0, 1] with the given values.
    static CdfGridT uniform(Eigen::Index n, const Vector& values) {
        return CdfGridT(Vector::LinSpaced(n, Scalar(0), Scalar(1)), values);
    }

    /// u-grid of n equally spaced points on [0, 1].
    static Vector uniform_points(Eigen::Index n) { return Vector::LinSpaced(n, Scalar(0), Scalar(1)); }

    /// All mass at 1: F = 0 below the final grid point.
    static CdfGridT point_mass_at_one(Eigen::Index n) {
        Vector f = Vector::Zero(n);
        f[n - 1] = 1;
        return uniform(n, f);
    }

    /// Builds a grid from raw (possibly noisy) values: clamps, projects onto
    /// nondecreasing sequences and pins the endpoint values.
    static CdfGridT from_noisy(Vector u_points, const Vector& raw) {
        Vector f = isotonic_projection(raw.cwiseMax(Scalar(0)).cwiseMin(Scalar(1)));
        f[0] = 0;
        f[f.size() - 1] = 1;
        return CdfGridT(std::move(u_points), f);
    }

    const Vector& u_points() const noexcept { return u_; }
    const Vector& values() const noexcept { return f_; }
    Eigen::Index size() const noexcept { return u_.size(); }

    /// Linear interpolation of the CDF at u (clamped to [0, 1]).
    Scalar operator()(Scalar u) const {
        if (u <= u_[0]) return f_[0];
        const Eigen::Index n = u_.size();
        if (u >= u_[n - 1]) return f_[n - 1];
        const auto* begin = u_.data();
        const auto* it = std::upper_bound(begin, begin + n, u);
        const Eigen::Index hi = it - begin;
        const Eigen::Index lo = hi - 1;
        const Scalar t = (u - u_[lo]) / (u_[hi] - u_[lo]);
        return f_[lo] + t * (f_[hi] - f_[lo]);
    }

    /// Resamples onto other u-points by linear interpolation.
    CdfGridT resampled(const Vector& u_points) const {
        Vector f(u_points.size());
        for (Eigen::Index i = 0; i < u_points.size(); ++i) f[i] = (*this)(u_points[i]);
        f[f.size() - 1] = 1;
        return CdfGridT(u_points, f);
    }

    /// Mean of the distribution, 1 - integral of F over [0, 1] (trapezoid).
    Scalar mean() const {
        Scalar area = 0;
        for (Eigen::Index i = 0; i + 1 < u_.size(); ++i) {
            area += Scalar(0.5) * (f_[i] + f_[i + 1]) * (u_[i + 1] - u_[i]);
        }
        return Scalar(1) - area;
    }

private:
    void validate() const {
        const Eigen::Index n = u_.size();
        if (n < 2 || f_.size() != n) throw DomainError("CdfGrid: need >= 2 points and matching values");
        if (u_[0] != Scalar(0) || u_[n - 1] != Scalar(1)) {
            throw DomainError("CdfGrid: u-points must include 0 and 1");
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i > 0 && !(u_[i] > u_[i - 1])) throw DomainError("CdfGrid: u-points must increase strictly");
            if (!(f_[i] >= Scalar(0) && f_[i] <= Scalar(1))) throw DomainError("CdfGrid: values must lie in [0, 1]");
            if (i > 0 && f_[i] < f_[i - 1]) throw DomainError("CdfGrid: values must be nondecreasing");
        }
        if (f_[n - 1] != Scalar(1)) throw DomainError("CdfGrid: value at u = 1 must be 1");
    }

    Vector u_;
    Vector f_;
};

using CdfGrid = CdfGridT<double>;

} // namespace sirmeta

#pragma once

// Interference term of the meta-distribution transform.
//
// With g(w) = theta / (theta + w^{1/delta}) and an interferer active with
// probability q, the per-atom exponent is
//   G(q, s) = delta * sum_k binom(s, k) q^k Z(k, delta, theta)
//           = int_1^inf [1 - (1 - q g(w))^s] dw.
// The integral is evaluated after the change of variable v = -ln(1 - q g),
//   G(q, s) = int_0^{V_q} (1 - e^{-s v}) rho_q(v) dv,
// so that the oscillation in s becomes a plain exponential in v.

#include <Eigen/Core>

#include "sirmeta/cdf_grid.hpp"
#include "sirmeta/gil_pelaez.hpp"
#include "sirmeta/specfun.hpp"

namespace sirmeta {

/// Atoms of the interferer activity law q = min(1, xi / mu) induced by a CDF
/// of mu on a u-grid.
///
/// Index 0 is q = 1 (cells with mu <= xi), indices 1..segments are the grid
/// increments above xi located at their midpoints, and the final index is
/// q = xi (the no-retransmission seed).
class ActivityLayout {
public:
    ActivityLayout(const Eigen::VectorXd& u_points, double xi);

    const Eigen::VectorXd& levels() const noexcept { return levels_; }
    Eigen::Index size() const noexcept { return levels_.size(); }
    double xi() const noexcept { return xi_; }

    /// Masses of the activity law under F (the seed atom gets 0).
    Eigen::VectorXd masses(const CdfGrid& F) const;
    /// All mass on q = xi.
    Eigen::VectorXd favorable() const;
    /// All mass on q = 1.
    Eigen::VectorXd dominant() const;

private:
    double xi_;
    Eigen::VectorXd u_;
    Eigen::VectorXd levels_;
    Eigen::VectorXd lower_;  // increment start, max(u_i, xi)
    Eigen::VectorXd upper_;  // increment end u_{i+1}
};

/// sum_j m_j q_j^k over an activity law.
double activity_moment(const Eigen::VectorXd& levels, const Eigen::VectorXd& masses, int k);

/// Quadrature in v for a fixed set of activity levels, resolving
/// oscillations of e^{-j w v} up to w = omega_max.
class InterferenceTransform {
public:
    InterferenceTransform(Eigen::VectorXd levels, double theta, double delta, double omega_max);

    /// sum_j m_j G(q_j, s). Accurate for |Im s| <= omega_max.
    Complex exponent(const Eigen::VectorXd& masses, Complex s) const;

    /// sum_j m_j G(q_j, j w) at every node of the rule.
    Eigen::VectorXcd exponent_on(const OmegaRule& rule, const Eigen::VectorXd& masses) const;

    /// 1 / (1 + exponent) at every node of the rule.
    Eigen::VectorXcd mgf_on(const OmegaRule& rule, const Eigen::VectorXd& masses) const;

    Eigen::Index node_count() const noexcept { return v_.size(); }

private:
    Eigen::VectorXd weighted_density(const Eigen::VectorXd& masses) const;

    Eigen::VectorXd levels_;
    double theta_;
    double delta_;
    Eigen::VectorXd v_;
    Eigen::VectorXd w_;
    Eigen::MatrixXd rho_;  // rho_{q_j}(v_l), zero beyond V_{q_j}
};

/// G(q, s) for a single level.
Complex interference_exponent(double q, double theta, double delta, Complex s);

} // namespace sirmeta

#pragma once

// Gil-Pelaez inversion for Y = ln(mu), mu in (0, 1]:
//   P(mu < u) = 1/2 - (1/pi) int_0^inf Im{u^{-j w} M_Y(j w)} / w dw.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sirmeta/analysis_config.hpp"
#include "sirmeta/quadrature.hpp"
#include "sirmeta/specfun.hpp"

namespace sirmeta {

/// Composite Gauss-Legendre rule on [omega_min, omega_max]: log-spaced panels
/// up to 1, then equal-width panels. The equal-width part is laid out panel
/// by panel so callers can step exp(j w v) across panels by recurrence.
struct OmegaRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
    Eigen::Index log_count = 0;        // nodes below 1
    double uniform_start = 1.0;
    double panel_width = 1.0;
    Eigen::Index panels = 0;
    quadrature::GaussRule base;        // per-panel rule on [0, 1]

    Eigen::Index size() const { return nodes.size(); }
};

OmegaRule make_omega_rule(const AnalysisConfig& cfg);

/// Edges used for the adaptive inversion: log panels below 1, unit panels above.
std::vector<double> omega_partition(const AnalysisConfig& cfg);

/// Gil-Pelaez inversion on fixed u-points and a fixed rule. The trigonometric
/// kernel is tabulated once, so each inversion is two matrix-vector products.
class GilPelaezSweep {
public:
    GilPelaezSweep(const OmegaRule& rule, const Eigen::VectorXd& u_points);

    /// P(mu < u) at every u-point; 0 at u <= 0 and 1 at u >= 1.
    Eigen::VectorXd operator()(const Eigen::VectorXcd& mgf) const;

private:
    Eigen::VectorXd u_;
    Eigen::VectorXd scale_;   // w_k / omega_k
    Eigen::MatrixXd cos_;     // cos(-omega_k ln u_i), interior u only
    Eigen::MatrixXd sin_;
    std::vector<Eigen::Index> interior_;
};

/// Gil-Pelaez CDF at every u from transform samples on `rule`.
Eigen::VectorXd gil_pelaez_sweep(const OmegaRule& rule, const Eigen::VectorXcd& mgf,
                                 const Eigen::VectorXd& u_points);

/// P(mu < u) for transform samples on `rule` (u in (0, 1)), clamped to [0, 1].
double gil_pelaez_point(const OmegaRule& rule, const Eigen::VectorXcd& mgf, double u);

/// P(mu < u) for a transform given as a callable w -> M_Y(j w), by adaptive
/// Gauss-Kronrod on [omega_min, omega_max]. Result clamped to [0, 1].
template <typename Mgf>
double gil_pelaez_cdf(Mgf&& mgf, double u, const AnalysisConfig& cfg,
                      double abs_tol = 1e-7, int max_subdivisions = 20000) {
    if (!(u > 0 && u < 1)) throw DomainError("gil_pelaez_cdf: u must lie in (0, 1)");
    const double log_u = std::log(u);
    auto integrand = [&](double w) {
        const Complex m = mgf(Complex(0.0, w));
        return (std::polar(1.0, -w * log_u) * m).imag() / w;
    };
    const auto edges = omega_partition(cfg);
    double total = 0;
    // Spread the tolerance across the initial panels.
    const double panel_tol = abs_tol / static_cast<double>(edges.size());
    int budget = max_subdivisions;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const auto r = quadrature::integrate_adaptive(integrand, edges[p], edges[p + 1], panel_tol,
                                                      1e-12, budget);
        budget -= r.subdivisions;
        total += r.value;
    }
    return std::clamp(0.5 - total / std::numbers::pi, 0.0, 1.0);
}

} // namespace sirmeta

#include <cmath>
#include <string>

#include "sirmeta/metadist.hpp"
#include "sirmeta/quadrature.hpp"

namespace sirmeta {

namespace {

// int_xi^1 t^{-k} f(t) dt for the Beta(a, b) density f. With t = 1 - s^{1/b}
// the (1 - t)^{b - 1} factor cancels against the Jacobian.
double inverse_moment_tail(double a, double b, double xi, int k) {
    if (xi >= 1) return 0;
    const double top = std::pow(1 - xi, b);
    const double expo = a - k - 1;
    auto f = [&](double s) { return std::pow(1 - std::pow(s, 1 / b), expo); };
    const auto r = quadrature::integrate_adaptive(f, 0.0, top, 1e-14, 1e-11, 4000);
    return r.value * std::exp(-specfun::log_beta(a, b)) / b;
}

} // namespace

double BetaParams::cdf(double u) const { return specfun::ibeta(a(), b(), u); }

CdfGrid BetaParams::grid(const Eigen::VectorXd& u_points) const {
    Eigen::VectorXd f(u_points.size());
    for (Eigen::Index i = 0; i < u_points.size(); ++i) f[i] = cdf(u_points[i]);
    return CdfGrid::from_noisy(u_points, f);
}

DegenerateVarianceError::DegenerateVarianceError(double mu, double m2)
    : DomainError("beta_approx: degenerate variance (mu = " + std::to_string(mu) +
                  ", M2 = " + std::to_string(m2) + ")"),
      mu_(mu),
      m2_(m2) {}

BetaApproxResult beta_approx(const AnalysisConfig& cfg) {
    cfg.validate();
    if (cfg.theta == 0 || cfg.xi == 0) throw DegenerateVarianceError(1, 1);

    const double delta = cfg.delta();
    const double z1 = specfun::z_kernel(1, delta, cfg.theta);
    const double z2 = specfun::z_kernel(2, delta, cfg.theta);
    const double xi = cfg.xi;

    double eta1 = xi;
    double eta2 = xi * xi;
    BetaApproxResult out;
    for (int n = 1; n <= cfg.fp_max_iter; ++n) {
        const double m1 = 1 / (1 + delta * eta1 * z1);
        const double m2 = 1 / (1 + delta * (2 * eta1 * z1 + eta2 * z2));
        const double var = m2 - m1 * m1;
        if (!(var > 0) || !(m1 - m2 > 0)) throw DegenerateVarianceError(m1, m2);
        const BetaParams p{m1, (m1 - m2) * (1 - m1) / var};
        out.sequence.push_back(p);
        out.params = p;
        if (n > 1) {
            const BetaParams& q = out.sequence[out.sequence.size() - 2];
            if (std::abs(p.mu - q.mu) + std::abs(p.beta - q.beta) / (1 + q.beta) < cfg.fp_tol) {
                out.converged = true;
                return out;
            }
        }
        const double below = specfun::ibeta(p.a(), p.b(), xi);
        eta1 = below + xi * inverse_moment_tail(p.a(), p.b(), xi, 1);
        eta2 = below + xi * xi * inverse_moment_tail(p.a(), p.b(), xi, 2);
    }
    return out;
}

} // namespace sirmeta

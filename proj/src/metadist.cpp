#include "sirmeta/metadist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sirmeta {

namespace {

constexpr double kSeriesStopRel = 1e-12;
constexpr double kSeriesFailRel = 1e-8;
// Peak series term, relative to the result, beyond which cancellation has
// eaten too many digits and the integral form is used instead.
constexpr double kSeriesCancellation = 1e4;

struct SeriesOutcome {
    Complex value;
    double peak = 0;
};

SeriesOutcome series_bracket(const ActivityLayout& layout, const Eigen::VectorXd& masses,
                             const AnalysisConfig& cfg, Complex s) {
    const double delta = cfg.delta();
    Complex sum = 1.0;
    Complex binom = 1.0;
    double peak = 0;
    double last = 0;
    for (int k = 1; k <= cfg.k_max; ++k) {
        binom *= (s - double(k - 1)) / double(k);
        const double eta = activity_moment(layout.levels(), masses, k);
        const Complex term = delta * binom * eta * specfun::z_kernel(k, delta, cfg.theta);
        sum += term;
        last = std::abs(term);
        peak = std::max(peak, last);
        if (last <= kSeriesStopRel * std::abs(sum)) return {sum, peak};
    }
    if (last > kSeriesFailRel * std::abs(sum)) {
        throw ConvergenceError("mgf series unconverged at k_max = " + std::to_string(cfg.k_max) +
                               " (last term " + std::to_string(last) + ")");
    }
    return {sum, peak};
}

CdfGrid sweep(const InterferenceTransform& transform, const OmegaRule& rule,
              const GilPelaezSweep& invert, const Eigen::VectorXd& masses, const Eigen::VectorXd& u) {
    return CdfGrid::from_noisy(u, invert(transform.mgf_on(rule, masses)));
}

double sup_distance(const CdfGrid& a, const CdfGrid& b) {
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

bool degenerate(const AnalysisConfig& cfg) { return cfg.xi == 0 || cfg.theta == 0; }

} // namespace

double eta_k(const CdfGrid& F, double xi, int k) {
    if (k < 1) throw DomainError("eta_k: k must be >= 1");
    const ActivityLayout layout(F.u_points(), xi);
    return std::clamp(activity_moment(layout.levels(), layout.masses(F), k), 0.0, 1.0);
}

double avg_active_prob(const CdfGrid& F, double xi) {
    if (xi == 0) return 0;
    if (xi == 1) return 1;
    return eta_k(F, xi, 1);
}

Complex mgf_series(const CdfGrid& F_prev, const AnalysisConfig& cfg, Complex s) {
    cfg.validate();
    if (cfg.theta == 0) return 1.0;
    const ActivityLayout layout(F_prev.u_points(), cfg.xi);
    return 1.0 / series_bracket(layout, layout.masses(F_prev), cfg, s).value;
}

Complex mgf_at(const CdfGrid& F_prev, const AnalysisConfig& cfg, Complex s) {
    cfg.validate();
    if (cfg.theta == 0) return 1.0;
    const ActivityLayout layout(F_prev.u_points(), cfg.xi);
    const Eigen::VectorXd masses = layout.masses(F_prev);
    try {
        const auto out = series_bracket(layout, masses, cfg, s);
        if (out.peak <= kSeriesCancellation * std::max(1.0, std::abs(out.value))) return 1.0 / out.value;
    } catch (const ConvergenceError&) {
    }
    const InterferenceTransform transform(layout.levels(), cfg.theta, cfg.delta(),
                                          std::max(cfg.omega_max, std::abs(s.imag())));
    return 1.0 / (1.0 + transform.exponent(masses, s));
}

FixedPointError::FixedPointError(CdfGrid last, CdfGrid previous, double distance)
    : ConvergenceError("fixed point did not converge (last sup-norm change " +
                       std::to_string(distance) + ")"),
      last_(std::move(last)),
      previous_(std::move(previous)),
      distance_(distance) {}

FixedPointResult fixed_point_cdf(const AnalysisConfig& cfg) {
    cfg.validate();
    const Eigen::VectorXd u = CdfGrid::uniform_points(cfg.grid_size);
    if (degenerate(cfg)) return {CdfGrid::point_mass_at_one(cfg.grid_size), 0, {}, 0};

    const ActivityLayout layout(u, cfg.xi);
    const OmegaRule rule = make_omega_rule(cfg);
    const InterferenceTransform transform(layout.levels(), cfg.theta, cfg.delta(), cfg.omega_max);
    const GilPelaezSweep invert(rule, u);

    const CdfGrid seed = sweep(transform, rule, invert, layout.favorable(), u);
    const CdfGrid ceiling = sweep(transform, rule, invert, layout.dominant(), u);

    FixedPointResult result{seed, 0, {}, 0};
    CdfGrid prev = seed;
    for (int n = 1; n <= cfg.fp_max_iter; ++n) {
        CdfGrid next = sweep(transform, rule, invert, layout.masses(prev), u);
        const double d = sup_distance(next, prev);
        result.distances.push_back(d);
        result.bracket_violation =
            std::max({result.bracket_violation, (seed.values() - next.values()).maxCoeff(),
                      (next.values() - ceiling.values()).maxCoeff()});
        if (d < cfg.fp_tol) {
            result.cdf = std::move(next);
            result.iterations = n;
            return result;
        }
        if (n == cfg.fp_max_iter) throw FixedPointError(std::move(next), std::move(prev), d);
        prev = std::move(next);
    }
    throw FixedPointError(prev, prev, 0);  // unreachable, fp_max_iter >= 1
}

CdfGrid dominant_cdf(const AnalysisConfig& cfg) {
    cfg.validate();
    if (cfg.theta == 0) return CdfGrid::point_mass_at_one(cfg.grid_size);
    const Eigen::VectorXd u = CdfGrid::uniform_points(cfg.grid_size);
    Eigen::VectorXd level = Eigen::VectorXd::Ones(1);
    const InterferenceTransform transform(level, cfg.theta, cfg.delta(), cfg.omega_max);
    const OmegaRule rule = make_omega_rule(cfg);
    return sweep(transform, rule, GilPelaezSweep(rule, u), level, u);
}

CdfGrid favorable_cdf(const AnalysisConfig& cfg) {
    cfg.validate();
    if (degenerate(cfg)) return CdfGrid::point_mass_at_one(cfg.grid_size);
    const Eigen::VectorXd u = CdfGrid::uniform_points(cfg.grid_size);
    Eigen::VectorXd level = Eigen::VectorXd::Constant(1, cfg.xi);
    const InterferenceTransform transform(level, cfg.theta, cfg.delta(), cfg.omega_max);
    const OmegaRule rule = make_omega_rule(cfg);
    return sweep(transform, rule, GilPelaezSweep(rule, u), Eigen::VectorXd::Ones(1), u);
}

double moment(const AnalysisConfig& cfg, int m, const CdfGrid& F) {
    cfg.validate();
    if (m < 1) throw DomainError("moment: m must be >= 1");
    if (cfg.theta == 0) return 1;
    const ActivityLayout layout(F.u_points(), cfg.xi);
    const Eigen::VectorXd masses = layout.masses(F);
    const double delta = cfg.delta();
    double sum = 0;
    double binom = 1;
    for (int k = 1; k <= m; ++k) {
        binom *= double(m - k + 1) / double(k);
        sum += binom * activity_moment(layout.levels(), masses, k) * specfun::z_kernel(k, delta, cfg.theta);
    }
    return 1.0 / (1.0 + delta * sum);
}

CoverageEnvelope coverage_envelope(const AnalysisConfig& cfg) {
    cfg.validate();
    if (cfg.theta == 0) return {};
    const double dz = cfg.delta() * specfun::z_kernel(1, cfg.delta(), cfg.theta);
    return {1.0 / (1.0 + dz), 1.0 / (1.0 + cfg.xi * dz), std::clamp(1.0 - cfg.xi * dz, 0.0, 1.0)};
}

double delay_cdf(const AnalysisConfig& cfg, const CdfGrid& F, double T) {
    cfg.validate();
    if (!(T >= 1)) throw DomainError("delay_cdf: T must be >= 1");
    if (T == 1) return 0;
    const double arg = std::isinf(T) ? cfg.xi : std::min(1.0, cfg.xi + (1 - cfg.xi) / T);
    return std::clamp(1.0 - F(arg), 0.0, 1.0);
}

} // namespace sirmeta

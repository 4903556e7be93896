#include <cmath>

#include "sirmeta/metadist.hpp"

namespace sirmeta {

const char* to_string(StabilityMode mode) {
    switch (mode) {
    case StabilityMode::sufficient: return "sufficient";
    case StabilityMode::necessary: return "necessary";
    case StabilityMode::approximate: return "approximate";
    }
    return "unknown";
}

StabilityMode stability_mode_from_string(const std::string& name) {
    if (name == "sufficient") return StabilityMode::sufficient;
    if (name == "necessary") return StabilityMode::necessary;
    if (name == "approximate") return StabilityMode::approximate;
    throw ConfigError("mode", "unknown stability mode '" + name + "'");
}

StabilitySolver::StabilitySolver(AnalysisConfig cfg, double resolution)
    : cfg_(cfg), resolution_(resolution) {
    cfg_.validate();
    if (!(resolution > 0)) throw DomainError("StabilitySolver: resolution must be > 0");
    rule_ = make_omega_rule(cfg_);
    if (cfg_.theta > 0) {
        const InterferenceTransform t(Eigen::VectorXd::Ones(1), cfg_.theta, cfg_.delta(), cfg_.omega_max);
        dominant_mgf_ = t.mgf_on(rule_, Eigen::VectorXd::Ones(1));
    }
}

double StabilitySolver::unstable_fraction(double xi, StabilityMode mode) {
    if (!(xi > 0) || cfg_.theta == 0) return 0;
    if (xi >= 1) return 1;
    auto& cache = cache_[static_cast<int>(mode)];
    if (auto it = cache.find(xi); it != cache.end()) return it->second;

    double value = 0;
    switch (mode) {
    case StabilityMode::sufficient:
        value = gil_pelaez_point(rule_, dominant_mgf_, xi);
        break;
    case StabilityMode::necessary: {
        const InterferenceTransform t(Eigen::VectorXd::Constant(1, xi), cfg_.theta, cfg_.delta(),
                                      cfg_.omega_max);
        value = gil_pelaez_point(rule_, t.mgf_on(rule_, Eigen::VectorXd::Ones(1)), xi);
        break;
    }
    case StabilityMode::approximate: {
        AnalysisConfig probe = cfg_;
        probe.xi = xi;
        const auto fp = fixed_point_cdf(probe);
        const ActivityLayout layout(fp.cdf.u_points(), xi);
        const InterferenceTransform t(layout.levels(), probe.theta, probe.delta(), probe.omega_max);
        value = gil_pelaez_point(rule_, t.mgf_on(rule_, layout.masses(fp.cdf)), xi);
        break;
    }
    }
    cache.emplace(xi, value);
    return value;
}

double StabilitySolver::threshold(double epsilon, StabilityMode mode) {
    if (!(epsilon >= 0 && epsilon <= 1)) throw DomainError("stability_threshold: epsilon must lie in [0, 1]");
    if (epsilon == 1) return 1;
    double lo = 0;
    double hi = 1;
    while (hi - lo > resolution_) {
        const double mid = 0.5 * (lo + hi);
        if (unstable_fraction(mid, mode) <= epsilon) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

double stability_threshold(const AnalysisConfig& cfg, double epsilon, StabilityMode mode) {
    StabilitySolver solver(cfg);
    return solver.threshold(epsilon, mode);
}

} // namespace sirmeta

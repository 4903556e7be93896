#include "sirmeta/gil_pelaez.hpp"

namespace sirmeta {

namespace {

constexpr int kLogPanels = 12;

std::vector<double> log_edges(double lo) {
    std::vector<double> edges;
    const double a = std::log10(lo);
    for (int i = 0; i <= kLogPanels; ++i) {
        edges.push_back(std::pow(10.0, a + (0.0 - a) * i / kLogPanels));
    }
    edges.back() = 1.0;
    return edges;
}

} // namespace

OmegaRule make_omega_rule(const AnalysisConfig& cfg) {
    cfg.validate();
    OmegaRule rule;
    rule.base = quadrature::gauss_legendre(cfg.omega_panel_points);
    const auto low = quadrature::composite_rule(log_edges(cfg.omega_min), rule.base);

    rule.uniform_start = 1.0;
    rule.panels = static_cast<Eigen::Index>(
        std::ceil((cfg.omega_max - rule.uniform_start) / cfg.omega_panel_width - 1e-9));
    rule.panel_width = (cfg.omega_max - rule.uniform_start) / static_cast<double>(rule.panels);

    const Eigen::Index per = rule.base.nodes.size();
    rule.log_count = low.nodes.size();
    rule.nodes.resize(rule.log_count + rule.panels * per);
    rule.weights.resize(rule.nodes.size());
    rule.nodes.head(rule.log_count) = low.nodes;
    rule.weights.head(rule.log_count) = low.weights;
    for (Eigen::Index p = 0; p < rule.panels; ++p) {
        const double a = rule.uniform_start + rule.panel_width * static_cast<double>(p);
        rule.nodes.segment(rule.log_count + p * per, per) =
            (a + rule.panel_width * rule.base.nodes.array()).matrix();
        rule.weights.segment(rule.log_count + p * per, per) = rule.panel_width * rule.base.weights;
    }
    return rule;
}

std::vector<double> omega_partition(const AnalysisConfig& cfg) {
    auto edges = log_edges(cfg.omega_min);
    double w = 1.0;
    while (w < cfg.omega_max - 1e-12) {
        w = std::min(w + 1.0, cfg.omega_max);
        edges.push_back(w);
    }
    return edges;
}

GilPelaezSweep::GilPelaezSweep(const OmegaRule& rule, const Eigen::VectorXd& u_points)
    : u_(u_points), scale_((rule.weights.array() / rule.nodes.array()).matrix()) {
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
        if (u_[i] > 0 && u_[i] < 1) interior_.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(interior_.size());
    cos_.resize(n, rule.size());
    sin_.resize(n, rule.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::ArrayXd phase = -std::log(u_[interior_[r]]) * rule.nodes.array();
        cos_.row(r) = phase.cos().matrix().transpose();
        sin_.row(r) = phase.sin().matrix().transpose();
    }
}

Eigen::VectorXd GilPelaezSweep::operator()(const Eigen::VectorXcd& mgf) const {
    if (mgf.size() != scale_.size()) throw DomainError("GilPelaezSweep: transform size mismatch");
    // Im{e^{j p} m} = cos(p) Im m + sin(p) Re m
    const Eigen::VectorXd re = (mgf.real().array() * scale_.array()).matrix();
    const Eigen::VectorXd im = (mgf.imag().array() * scale_.array()).matrix();
    const Eigen::VectorXd acc = cos_ * im + sin_ * re;
    Eigen::VectorXd out = (u_.array() >= 1).cast<double>().matrix();
    for (std::size_t r = 0; r < interior_.size(); ++r) {
        out[interior_[r]] = 0.5 - acc[static_cast<Eigen::Index>(r)] / std::numbers::pi;
    }
    return out;
}

Eigen::VectorXd gil_pelaez_sweep(const OmegaRule& rule, const Eigen::VectorXcd& mgf,
                                 const Eigen::VectorXd& u_points) {
    return GilPelaezSweep(rule, u_points)(mgf);
}

double gil_pelaez_point(const OmegaRule& rule, const Eigen::VectorXcd& mgf, double u) {
    Eigen::VectorXd one(1);
    one[0] = u;
    return std::clamp(gil_pelaez_sweep(rule, mgf, one)[0], 0.0, 1.0);
}

} // namespace sirmeta

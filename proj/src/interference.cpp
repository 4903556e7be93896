#include "sirmeta/interference.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sirmeta {

namespace {

constexpr int kSingularNodes = 16;
constexpr int kPanelNodes = 8;

// 1 - e^{-x} without cancellation for small |x|.
Complex one_minus_exp_neg(Complex x) {
    const double a = x.real();
    const double b = x.imag();
    const double s = std::sin(0.5 * b);
    const double decay = std::exp(-a);
    return {-std::expm1(-a) + decay * 2.0 * s * s, decay * std::sin(b)};
}

double level_extent(double q, double theta) { return -std::log1p(-q * theta / (1.0 + theta)); }

} // namespace

ActivityLayout::ActivityLayout(const Eigen::VectorXd& u_points, double xi) : xi_(xi), u_(u_points) {
    if (!(xi >= 0 && xi <= 1)) throw DomainError("ActivityLayout: xi must lie in [0, 1]");
    std::vector<double> lo, hi;
    for (Eigen::Index i = 0; i + 1 < u_.size(); ++i) {
        if (u_[i + 1] > xi) {
            lo.push_back(std::max(u_[i], xi));
            hi.push_back(u_[i + 1]);
        }
    }
    const auto segments = static_cast<Eigen::Index>(lo.size());
    lower_ = Eigen::Map<Eigen::VectorXd>(lo.data(), segments);
    upper_ = Eigen::Map<Eigen::VectorXd>(hi.data(), segments);
    levels_.resize(segments + 2);
    levels_[0] = 1.0;
    levels_.segment(1, segments) = (xi / (0.5 * (lower_ + upper_).array())).matrix();
    levels_[segments + 1] = xi;
}

Eigen::VectorXd ActivityLayout::masses(const CdfGrid& F) const {
    if (F.size() != u_.size() || F.u_points() != u_) {
        throw DomainError("ActivityLayout: CDF grid does not match the layout");
    }
    Eigen::VectorXd m = Eigen::VectorXd::Zero(size());
    m[0] = F(xi_);
    for (Eigen::Index s = 0; s < lower_.size(); ++s) {
        m[s + 1] = std::max(0.0, F(upper_[s]) - F(lower_[s]));
    }
    return m;
}

Eigen::VectorXd ActivityLayout::favorable() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(size());
    m[size() - 1] = 1.0;
    return m;
}

Eigen::VectorXd ActivityLayout::dominant() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(size());
    m[0] = 1.0;
    return m;
}

double activity_moment(const Eigen::VectorXd& levels, const Eigen::VectorXd& masses, int k) {
    return (masses.array() * levels.array().pow(static_cast<double>(k))).sum();
}

InterferenceTransform::InterferenceTransform(Eigen::VectorXd levels, double theta, double delta,
                                             double omega_max)
    : levels_(std::move(levels)), theta_(theta), delta_(delta) {
    if (!(delta > 0 && delta < 1)) throw DomainError("InterferenceTransform: delta must lie in (0, 1)");
    if (!(theta >= 0)) throw DomainError("InterferenceTransform: theta must be >= 0");
    if (!(omega_max > 0)) throw DomainError("InterferenceTransform: omega_max must be > 0");

    std::vector<double> extents;
    for (Eigen::Index j = 0; j < levels_.size(); ++j) {
        if (levels_[j] > 0 && theta > 0) extents.push_back(level_extent(levels_[j], theta));
    }
    rho_.setZero(0, levels_.size());
    if (extents.empty()) return;
    std::sort(extents.begin(), extents.end());
    const double v_lo = extents.front();
    const double v_hi = extents.back();

    // Panels no wider than one oscillation period at omega_max.
    const double h = 2 * std::numbers::pi / omega_max;
    const double v_c = std::min(h, v_lo);

    std::vector<double> edges{v_c};
    for (double e = 2 * v_c; e < std::min(h, v_hi); e *= 2) edges.push_back(e);
    for (double e = std::max(h, edges.back()) ; e < v_hi; e += h) edges.push_back(e);
    edges.insert(edges.end(), extents.begin(), extents.end());
    std::sort(edges.begin(), edges.end());
    std::vector<double> clean;
    for (double e : edges) {
        if (e > v_hi) break;
        if (clean.empty() || e - clean.back() > 1e-13 * std::max(1.0, e)) clean.push_back(e);
    }
    if (clean.back() < v_hi) clean.push_back(v_hi);

    const auto sing = quadrature::gauss_legendre(kSingularNodes);
    const auto base = quadrature::gauss_legendre(kPanelNodes);
    const auto panels = quadrature::composite_rule(clean, base);

    // v = v_c y^p absorbs the v^{-delta} behaviour at the origin.
    const double p = 1.0 / (1.0 - delta);
    v_.resize(kSingularNodes + panels.nodes.size());
    w_.resize(v_.size());
    for (int i = 0; i < kSingularNodes; ++i) {
        const double y = sing.nodes[i];
        v_[i] = v_c * std::pow(y, p);
        w_[i] = sing.weights[i] * v_c * p * std::pow(y, p - 1);
    }
    v_.tail(panels.nodes.size()) = panels.nodes;
    w_.tail(panels.nodes.size()) = panels.weights;

    rho_.setZero(v_.size(), levels_.size());
    for (Eigen::Index j = 0; j < levels_.size(); ++j) {
        const double q = levels_[j];
        if (!(q > 0)) continue;
        const double extent = level_extent(q, theta);
        for (Eigen::Index l = 0; l < v_.size(); ++l) {
            const double v = v_[l];
            if (v >= extent) continue;
            const double e = -std::expm1(-v);
            const double b = theta * (q / e - 1.0);
            rho_(l, j) = delta * std::pow(b, delta - 1.0) * theta * q * std::exp(-v) / (e * e);
        }
    }
}

Eigen::VectorXd InterferenceTransform::weighted_density(const Eigen::VectorXd& masses) const {
    if (masses.size() != levels_.size()) throw DomainError("InterferenceTransform: mass vector size mismatch");
    if (v_.size() == 0) return {};
    return (w_.array() * (rho_ * masses).array()).matrix();
}

Complex InterferenceTransform::exponent(const Eigen::VectorXd& masses, Complex s) const {
    const Eigen::VectorXd c = weighted_density(masses);
    Complex acc = 0;
    for (Eigen::Index l = 0; l < c.size(); ++l) acc += c[l] * one_minus_exp_neg(s * v_[l]);
    return acc;
}

Eigen::VectorXcd InterferenceTransform::exponent_on(const OmegaRule& rule,
                                                    const Eigen::VectorXd& masses) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(rule.size());
    const Eigen::VectorXd c = weighted_density(masses);
    if (c.size() == 0) return out;

    // Nodes near the origin carry a large total weight that cancels against
    // e^{-j w v}; they are summed directly for every w.
    const Eigen::Index near = kSingularNodes;
    for (Eigen::Index k = 0; k < rule.size(); ++k) {
        Complex acc = 0;
        for (Eigen::Index l = 0; l < near; ++l) {
            acc += c[l] * one_minus_exp_neg(Complex(0.0, rule.nodes[k] * v_[l]));
        }
        out[k] = acc;
    }

    const Eigen::Index far = c.size() - near;
    const Eigen::VectorXd cf = c.tail(far);
    const Eigen::VectorXd vf = v_.tail(far);
    const double total = cf.sum();

    for (Eigen::Index k = 0; k < rule.log_count; ++k) {
        Complex acc = 0;
        for (Eigen::Index l = 0; l < far; ++l) {
            acc += cf[l] * one_minus_exp_neg(Complex(0.0, rule.nodes[k] * vf[l]));
        }
        out[k] += acc;
    }

    // Equal-width panels: e^{-j (a + p H + H x_i) v} = e^{-j (a + H x_i) v} (e^{-j H v})^p,
    // stepped in split real/imaginary form since the weights are real.
    const Eigen::Index per = rule.base.nodes.size();
    Eigen::ArrayXXd re(far, per), im(far, per);
    for (Eigen::Index i = 0; i < per; ++i) {
        const Eigen::ArrayXd phase = -(rule.uniform_start + rule.panel_width * rule.base.nodes[i]) * vf.array();
        re.col(i) = phase.cos();
        im.col(i) = phase.sin();
    }
    const Eigen::ArrayXd step_re = (rule.panel_width * vf.array()).cos();
    const Eigen::ArrayXd step_im = -(rule.panel_width * vf.array()).sin();
    Eigen::ArrayXXd tmp(far, per);
    for (Eigen::Index p = 0; p < rule.panels; ++p) {
        const Eigen::RowVectorXd acc_re = cf.transpose() * re.matrix();
        const Eigen::RowVectorXd acc_im = cf.transpose() * im.matrix();
        const Eigen::Index offset = rule.log_count + p * per;
        for (Eigen::Index i = 0; i < per; ++i) out[offset + i] += Complex(total - acc_re[i], -acc_im[i]);
        tmp = re.colwise() * step_re - im.colwise() * step_im;
        im = re.colwise() * step_im + im.colwise() * step_re;
        re = tmp;
    }
    return out;
}

Eigen::VectorXcd InterferenceTransform::mgf_on(const OmegaRule& rule, const Eigen::VectorXd& masses) const {
    return (1.0 + exponent_on(rule, masses).array()).inverse().matrix();
}

Complex interference_exponent(double q, double theta, double delta, Complex s) {
    Eigen::VectorXd level(1);
    level[0] = q;
    const InterferenceTransform t(level, theta, delta, std::max(1.0, std::abs(s.imag())));
    return t.exponent(Eigen::VectorXd::Ones(1), s);
}

} // namespace sirmeta

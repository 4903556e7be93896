#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sirmeta/cdf_grid.hpp"
#include "sirmeta/gil_pelaez.hpp"
#include "sirmeta/quadrature.hpp"

using namespace sirmeta;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {2, 5, 8, 16}) {
        const auto r = quadrature::gauss_legendre(n);
        EXPECT_NEAR(r.weights.sum(), 1.0, 1e-14);
        for (int p = 0; p < 2 * n; ++p) {
            const double got = (r.weights.array() * r.nodes.array().pow(p)).sum();
            EXPECT_NEAR(got, 1.0 / (p + 1), 1e-13) << n << ' ' << p;
        }
    }
}

TEST(AdaptiveQuadrature, SmoothAndSingular) {
    auto r = quadrature::integrate_adaptive([](double x) { return std::exp(-x) * std::cos(5 * x); }, 0, 10,
                                            1e-12, 1e-12);
    const double want = (1 - std::exp(-10.0) * (std::cos(50.0) - 5 * std::sin(50.0))) / 26.0;
    EXPECT_NEAR(r.value, want, 1e-11);
    r = quadrature::integrate_adaptive([](double x) { return 1 / std::sqrt(x); }, 0, 1, 1e-9, 1e-10, 5000);
    EXPECT_NEAR(r.value, 2.0, 1e-8);
}

TEST(AdaptiveQuadrature, BudgetExhaustionThrows) {
    EXPECT_THROW(quadrature::integrate_adaptive([](double x) { return std::sin(1 / x); }, 1e-9, 1, 1e-15, 0, 3),
                 ConvergenceError);
}

TEST(Isotonic, ProjectsOntoMonotone) {
    Eigen::VectorXd y(6);
    y << 0.1, 0.5, 0.3, 0.2, 0.8, 0.7;
    const Eigen::VectorXd p = isotonic_projection(y);
    for (int i = 1; i < 6; ++i) EXPECT_GE(p[i], p[i - 1]);
    EXPECT_NEAR(p[1], (0.5 + 0.3 + 0.2) / 3, 1e-15);
    EXPECT_NEAR(p[4], 0.75, 1e-15);
    EXPECT_NEAR(p.sum(), y.sum(), 1e-14);
    const Eigen::VectorXd mono = Eigen::VectorXd::LinSpaced(5, 0, 1);
    EXPECT_EQ(isotonic_projection(mono), mono);
}

TEST(CdfGrid, ValidatesAndInterpolates) {
    const auto u = CdfGrid::uniform_points(5);
    Eigen::VectorXd f(5);
    f << 0, 0.1, 0.2, 0.6, 1;
    const CdfGrid g(u, f);
    EXPECT_NEAR(g(0.375), 0.15, 1e-15);
    EXPECT_EQ(g(-1), 0);
    EXPECT_EQ(g(2), 1);
    EXPECT_NEAR(g.mean(), 1 - 0.25 * (0.05 + 0.15 + 0.4 + 0.8), 1e-15);
    f[2] = 0.05;
    EXPECT_THROW(CdfGrid(u, f), DomainError);
    f[2] = 0.2;
    f[4] = 0.9;
    EXPECT_THROW(CdfGrid(u, f), DomainError);
    EXPECT_EQ(CdfGrid::point_mass_at_one(11).values().head(10).sum(), 0.0);
}

TEST(CdfGrid, FromNoisyIsMonotoneAndPinned) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0, 0.05);
    const auto u = CdfGrid::uniform_points(101);
    Eigen::VectorXd raw = u;
    for (auto& v : raw) v += noise(rng);
    const CdfGrid g = CdfGrid::from_noisy(u, raw);
    EXPECT_EQ(g.values()[0], 0);
    EXPECT_EQ(g.values()[100], 1);
    for (int i = 1; i < 101; ++i) EXPECT_GE(g.values()[i], g.values()[i - 1]);
}

TEST(CdfGrid, FloatScalar) {
    const CdfGridT<float> g = CdfGridT<float>::uniform(3, Eigen::Vector3f(0, 0.5f, 1));
    EXPECT_FLOAT_EQ(g(0.25f), 0.25f);
}

namespace {

// Transforms E[mu^{j w}] of known laws on (0, 1).
Complex uniform_mgf(Complex s) { return 1.0 / (1.0 + s); }
Complex beta25_mgf(Complex s) {
    Complex m(1, 0);
    for (int i = 2; i <= 6; ++i) m *= double(i) / (double(i) + s);
    return m;
}
double beta25_cdf(double u) { return 1 - std::pow(1 - u, 6) - 6 * u * std::pow(1 - u, 5); }

} // namespace

TEST(GilPelaez, SweepRoundTrip) {
    const AnalysisConfig cfg;
    const OmegaRule rule = make_omega_rule(cfg);
    const auto u = CdfGrid::uniform_points(201);
    Eigen::VectorXcd mu(rule.size()), mb(rule.size());
    for (Eigen::Index i = 0; i < rule.size(); ++i) {
        mu[i] = uniform_mgf(Complex(0, rule.nodes[i]));
        mb[i] = beta25_mgf(Complex(0, rule.nodes[i]));
    }
    const Eigen::VectorXd fu = gil_pelaez_sweep(rule, mu, u);
    const Eigen::VectorXd fb = gil_pelaez_sweep(rule, mb, u);
    double eu = 0, eb = 0;
    for (int i = 0; i < 201; ++i) {
        eu = std::max(eu, std::abs(fu[i] - u[i]));
        eb = std::max(eb, std::abs(fb[i] - beta25_cdf(u[i])));
    }
    EXPECT_LT(eu, 1e-3);
    EXPECT_LT(eb, 1e-3);
    EXPECT_EQ(fu[0], 0);
    EXPECT_EQ(fu[200], 1);
}

TEST(GilPelaez, AdaptivePointwise) {
    const AnalysisConfig cfg;
    for (double u : {0.05, 0.3, 0.5, 0.9}) {
        EXPECT_NEAR(gil_pelaez_cdf(uniform_mgf, u, cfg), u, 1e-3) << u;
        EXPECT_NEAR(gil_pelaez_cdf(beta25_mgf, u, cfg), beta25_cdf(u), 1e-3) << u;
    }
    EXPECT_THROW(gil_pelaez_cdf(uniform_mgf, 0.0, cfg), DomainError);
}

TEST(GilPelaez, PointMatchesSweep) {
    const AnalysisConfig cfg;
    const OmegaRule rule = make_omega_rule(cfg);
    Eigen::VectorXcd m(rule.size());
    for (Eigen::Index i = 0; i < rule.size(); ++i) m[i] = beta25_mgf(Complex(0, rule.nodes[i]));
    Eigen::VectorXd u(1);
    u << 0.37;
    EXPECT_NEAR(gil_pelaez_point(rule, m, 0.37), gil_pelaez_sweep(rule, m, u)[0], 1e-12);
}

TEST(OmegaRule, CoversRangeWithPositiveWeights) {
    const AnalysisConfig cfg;
    const OmegaRule rule = make_omega_rule(cfg);
    EXPECT_GT(rule.nodes.minCoeff(), cfg.omega_min);
    EXPECT_LT(rule.nodes.maxCoeff(), cfg.omega_max);
    EXPECT_GT(rule.weights.minCoeff(), 0);
    EXPECT_NEAR(rule.weights.sum(), cfg.omega_max - cfg.omega_min, 1e-9);
}

TEST(GilPelaez, PointMassStep) {
    const AnalysisConfig cfg;
    const double c = 0.5;
    auto mgf = [&](Complex s) { return std::exp(s * std::log(c)); };
    EXPECT_NEAR(gil_pelaez_cdf(mgf, 0.2, cfg), 0.0, 1e-2);
    EXPECT_NEAR(gil_pelaez_cdf(mgf, 0.8, cfg), 1.0, 1e-2);
}

TEST(GilPelaez, BetaMedian) {
    double lo = 0, hi = 1;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (beta25_cdf(mid) < 0.5 ? lo : hi) = mid;
    }
    EXPECT_NEAR(static_cast<double>(oracle::beta_cdf(2, 5, lo)), 0.5, 1e-9);
    EXPECT_NEAR(gil_pelaez_cdf(beta25_mgf, lo, AnalysisConfig{}), 0.5, 1e-3);
}

#pragma once

// Meta distribution of the conditional SIR coverage probability mu in a
// Poisson cellular network whose base stations transmit only when their
// Bernoulli(xi)-fed queues are nonempty.

#include <map>
#include <string>
#include <vector>

#include "sirmeta/analysis_config.hpp"
#include "sirmeta/cdf_grid.hpp"
#include "sirmeta/gil_pelaez.hpp"
#include "sirmeta/interference.hpp"
#include "sirmeta/specfun.hpp"

namespace sirmeta {

/// eta^{(k)} = F(xi) + int_xi^1 (xi/t)^k F(dt), with the Stieltjes integral
/// taken as a sum over grid increments at their midpoints.
double eta_k(const CdfGrid& F, double xi, int k);

/// Average active probability, eta^{(1)}.
double avg_active_prob(const CdfGrid& F, double xi);

/// M_Y(s) from the binomial series with closed-form Z(k). Stops at the first
/// term below 1e-12 relative or at k_max; throws ConvergenceError when the
/// k_max-th term still exceeds 1e-8 relative.
Complex mgf_series(const CdfGrid& F_prev, const AnalysisConfig& cfg, Complex s);

/// M_Y(s) = [1 + delta sum_k binom(s, k) eta^{(k)} Z(k)]^{-1}. Uses the series
/// when it is numerically safe and the integral form of the same sum otherwise.
Complex mgf_at(const CdfGrid& F_prev, const AnalysisConfig& cfg, Complex s);

struct FixedPointResult {
    CdfGrid cdf;
    int iterations = 0;             // updates after the seed sweep
    std::vector<double> distances;  // sup-norm change per update
    // Largest violation of F_seed <= F_n <= F_dominant over all iterates.
    double bracket_violation = 0;
};

/// Raised when the fixed point does not settle within fp_max_iter updates.
class FixedPointError : public ConvergenceError {
public:
    FixedPointError(CdfGrid last, CdfGrid previous, double distance);

    const CdfGrid& last() const noexcept { return last_; }
    const CdfGrid& previous() const noexcept { return previous_; }
    double distance() const noexcept { return distance_; }

private:
    CdfGrid last_;
    CdfGrid previous_;
    double distance_;
};

/// Iterates F_n = GP[M_Y | F_{n-1}] from the seed eta_0^{(k)} = xi^k.
FixedPointResult fixed_point_cdf(const AnalysisConfig& cfg);

/// CDF with every interferer always active (eta^{(k)} = 1).
CdfGrid dominant_cdf(const AnalysisConfig& cfg);

/// CDF without retransmissions (eta^{(k)} = xi^k).
CdfGrid favorable_cdf(const AnalysisConfig& cfg);

/// M_m = 1 / (1 + delta sum_{k<=m} binom(m, k) eta^{(k)} Z(k)) with eta from F.
double moment(const AnalysisConfig& cfg, int m, const CdfGrid& F);

struct CoverageEnvelope {
    double lower = 1;          // dominant system
    double upper = 1;          // no retransmissions
    double light_traffic = 1;  // 1 - xi delta Z(1)
};

CoverageEnvelope coverage_envelope(const AnalysisConfig& cfg);

/// Beta(a, b) parameterised by its mean mu and b = beta.
struct BetaParams {
    double mu = 0;
    double beta = 0;

    double a() const noexcept { return mu * beta / (1 - mu); }
    double b() const noexcept { return beta; }
    double cdf(double u) const;
    /// Beta CDF sampled on u-points.
    CdfGrid grid(const Eigen::VectorXd& u_points) const;
};

/// M_2 - M_1^2 <= 0, so no Beta fit exists.
class DegenerateVarianceError : public DomainError {
public:
    DegenerateVarianceError(double mu, double m2);
    double mu() const noexcept { return mu_; }
    double m2() const noexcept { return m2_; }

private:
    double mu_;
    double m2_;
};

struct BetaApproxResult {
    std::vector<BetaParams> sequence;
    BetaParams params;
    bool converged = false;
};

/// Moment-matched Beta iteration seeded by eta_0^{(k)} = xi^k.
BetaApproxResult beta_approx(const AnalysisConfig& cfg);

enum class StabilityMode { sufficient, necessary, approximate };

const char* to_string(StabilityMode mode);
StabilityMode stability_mode_from_string(const std::string& name);

/// Largest xi whose instability fraction stays within epsilon. Keeps the
/// evaluations of the xi-dependent criteria so repeated queries are cheap.
class StabilitySolver {
public:
    explicit StabilitySolver(AnalysisConfig cfg, double resolution = 1e-4);

    double threshold(double epsilon, StabilityMode mode);

    /// Fraction of unstable queues at xi under the given mode.
    double unstable_fraction(double xi, StabilityMode mode);

private:
    AnalysisConfig cfg_;
    double resolution_;
    OmegaRule rule_;
    Eigen::VectorXcd dominant_mgf_;
    std::map<double, double> cache_[3];
};

double stability_threshold(const AnalysisConfig& cfg, double epsilon, StabilityMode mode);

/// P(D <= T) = 1 - F(xi + (1 - xi) / T) for the mean delay D.
double delay_cdf(const AnalysisConfig& cfg, const CdfGrid& F, double T);

} // namespace sirmeta

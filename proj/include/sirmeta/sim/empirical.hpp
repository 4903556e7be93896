#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "sirmeta/cdf_grid.hpp"
#include "sirmeta/errors.hpp"
#include "sirmeta/sim/queue_sim.hpp"

namespace sirmeta::sim {

/// Too few links survive the filters for an empirical distribution.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

inline constexpr int kMinEmpiricalLinks = 500;

/// How links are counted. A link sampled uniformly from its cell stands for
/// a share of users proportional to the cell area, so per_user weights each
/// link by cell_users. per_link counts every link once (cell-biased).
/// If no link carries a user count, per_user falls back to per_link.
enum class LinkWeighting { per_user, per_link };

/// F(u) = weighted fraction of links with success fraction < u, over links
/// with at least min_attempts attempts, on `u_points` (F(1) = 1 by convention).
CdfGrid empirical_meta_cdf(const std::vector<LinkStats>& links, int min_attempts,
                           const Eigen::VectorXd& u_points = CdfGrid::uniform_points(201),
                           LinkWeighting weighting = LinkWeighting::per_user);

/// Empirical distribution of per-link mean delays. Links whose censored
/// packets outnumber the delivered ones count as unstable (delay = inf);
/// links without measured arrivals are left out.
class EmpiricalDelay {
public:
    explicit EmpiricalDelay(const std::vector<LinkStats>& links,
                            LinkWeighting weighting = LinkWeighting::per_user);

    /// P(D <= T) over the population, unstable links included in the denominator.
    double cdf(double T) const;
    double outage(double T) const { return 1.0 - cdf(T); }
    double unstable_fraction() const;
    /// Number of links in the population (unweighted).
    std::size_t population() const { return delays_.size() + unstable_; }

private:
    std::vector<std::pair<double, double>> delays_;  // (finite mean delay, weight), sorted
    std::vector<double> cumulative_;                 // running weight over delays_
    std::size_t unstable_ = 0;
    double unstable_weight_ = 0;
    double total_weight_ = 0;
};

EmpiricalDelay empirical_delay_cdf(const std::vector<LinkStats>& links,
                                   LinkWeighting weighting = LinkWeighting::per_user);

/// Weighted mean over links of active_slots / measure_slots.
double empirical_active_prob(const std::vector<LinkStats>& links, int measure_slots,
                             LinkWeighting weighting = LinkWeighting::per_user);

/// Weighted mean of per-link success fractions (links with attempts > 0).
double empirical_mean_coverage(const std::vector<LinkStats>& links,
                               LinkWeighting weighting = LinkWeighting::per_user);

/// One row per link: attempts successes active_slots mean_sojourn censored cell_users.
void write_link_table(std::ostream& os, const std::vector<LinkStats>& links);

} // namespace sirmeta::sim

#include "sirmeta/sim/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <ostream>
#include <string>

namespace sirmeta::sim {

namespace {

// Per-link weight function for a population.
struct Weigher {
    bool by_users;
    Weigher(const std::vector<LinkStats>& links, LinkWeighting weighting)
        : by_users(weighting == LinkWeighting::per_user &&
                   std::any_of(links.begin(), links.end(), [](const LinkStats& s) { return s.cell_users > 0; })) {}
    double operator()(const LinkStats& s) const { return by_users ? static_cast<double>(s.cell_users) : 1.0; }
};

} // namespace

CdfGrid empirical_meta_cdf(const std::vector<LinkStats>& links, int min_attempts,
                           const Eigen::VectorXd& u_points, LinkWeighting weighting) {
    if (min_attempts < 1) throw DomainError("empirical_meta_cdf: min_attempts must be >= 1");
    const Weigher weight(links, weighting);
    std::vector<std::pair<double, double>> fractions;
    for (const auto& s : links) {
        if (s.attempts >= min_attempts) fractions.emplace_back(s.success_fraction(), weight(s));
    }
    if (fractions.size() < static_cast<std::size_t>(kMinEmpiricalLinks)) {
        throw InsufficientDataError("empirical_meta_cdf: " + std::to_string(fractions.size()) +
                                    " links with >= " + std::to_string(min_attempts) +
                                    " attempts, need " + std::to_string(kMinEmpiricalLinks));
    }
    std::sort(fractions.begin(), fractions.end());
    std::vector<double> cum(fractions.size() + 1, 0.0);
    for (std::size_t i = 0; i < fractions.size(); ++i) cum[i + 1] = cum[i] + fractions[i].second;
    if (!(cum.back() > 0)) throw InsufficientDataError("empirical_meta_cdf: zero total weight");
    Eigen::VectorXd f(u_points.size());
    for (Eigen::Index i = 0; i < u_points.size(); ++i) {
        const auto below = std::lower_bound(fractions.begin(), fractions.end(), std::make_pair(u_points[i], -1.0)) -
                           fractions.begin();
        f[i] = cum[static_cast<std::size_t>(below)] / cum.back();
    }
    f[f.size() - 1] = 1.0;
    return CdfGrid(u_points, f);
}

EmpiricalDelay::EmpiricalDelay(const std::vector<LinkStats>& links, LinkWeighting weighting) {
    const Weigher weight(links, weighting);
    for (const auto& s : links) {
        if (s.arrivals == 0) continue;
        const double w = weight(s);
        total_weight_ += w;
        if (s.unstable() || s.delivered == 0) {
            ++unstable_;
            unstable_weight_ += w;
        } else {
            delays_.emplace_back(s.mean_sojourn(), w);
        }
    }
    std::sort(delays_.begin(), delays_.end());
    cumulative_.resize(delays_.size() + 1, 0.0);
    for (std::size_t i = 0; i < delays_.size(); ++i) cumulative_[i + 1] = cumulative_[i] + delays_[i].second;
}

double EmpiricalDelay::cdf(double T) const {
    if (!(total_weight_ > 0)) return 0;
    const auto within = std::upper_bound(delays_.begin(), delays_.end(),
                                         std::make_pair(T, std::numeric_limits<double>::infinity())) -
                        delays_.begin();
    return cumulative_[static_cast<std::size_t>(within)] / total_weight_;
}

double EmpiricalDelay::unstable_fraction() const {
    return total_weight_ > 0 ? unstable_weight_ / total_weight_ : 0.0;
}

EmpiricalDelay empirical_delay_cdf(const std::vector<LinkStats>& links, LinkWeighting weighting) {
    return EmpiricalDelay(links, weighting);
}

double empirical_active_prob(const std::vector<LinkStats>& links, int measure_slots, LinkWeighting weighting) {
    if (links.empty()) throw InsufficientDataError("empirical_active_prob: no links");
    if (measure_slots < 1) throw DomainError("empirical_active_prob: measure_slots must be >= 1");
    const Weigher weight(links, weighting);
    double sum = 0, total = 0;
    for (const auto& s : links) {
        const double w = weight(s);
        sum += w * static_cast<double>(s.active_slots) / measure_slots;
        total += w;
    }
    if (!(total > 0)) throw InsufficientDataError("empirical_active_prob: zero total weight");
    return sum / total;
}

double empirical_mean_coverage(const std::vector<LinkStats>& links, LinkWeighting weighting) {
    const Weigher weight(links, weighting);
    double sum = 0, total = 0;
    for (const auto& s : links) {
        if (s.attempts == 0) continue;
        const double w = weight(s);
        sum += w * s.success_fraction();
        total += w;
    }
    if (!(total > 0)) throw InsufficientDataError("empirical_mean_coverage: no link transmitted");
    return sum / total;
}

void write_link_table(std::ostream& os, const std::vector<LinkStats>& links) {
    os << "attempts successes active_slots mean_sojourn censored cell_users\n";
    char buf[64];
    for (const auto& s : links) {
        const auto r = std::to_chars(buf, buf + sizeof buf, s.mean_sojourn());
        os << s.attempts << ' ' << s.successes << ' ' << s.active_slots << ' '
           << std::string_view(buf, static_cast<std::size_t>(r.ptr - buf)) << ' ' << s.censored << ' '
           << s.cell_users << '\n';
    }
}

} // namespace sirmeta::sim

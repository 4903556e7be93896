#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "sirmeta/sim/network.hpp"
#include "sirmeta/sim/philox.hpp"
#include "sirmeta/sim/sim_config.hpp"

namespace sirmeta::sim {

/// FIFO buffers of arrival slots, one per BS.
class QueueState {
public:
    explicit QueueState(int cells) : queues_(static_cast<std::size_t>(cells)) {}

    int cells() const noexcept { return static_cast<int>(queues_.size()); }
    int buffer_len(int b) const { return static_cast<int>(queues_[b].size()); }
    bool active(int b) const { return !queues_[b].empty(); }
    /// Slots since the head-of-line packet arrived (0 when empty).
    std::int64_t head_age(int b, std::int64_t now) const {
        return queues_[b].empty() ? 0 : now - queues_[b].front();
    }

    void push(int b, std::int64_t arrival_slot) { queues_[b].push_back(arrival_slot); }
    std::int64_t pop(int b) {
        const std::int64_t a = queues_[b].front();
        queues_[b].pop_front();
        return a;
    }
    const std::deque<std::int64_t>& queue(int b) const { return queues_[b]; }

private:
    std::vector<std::deque<std::int64_t>> queues_;
};

struct SlotOutcome {
    bool active = false;
    bool success = false;
    std::int64_t sojourn = 0;  // slots from arrival to delivery, 0 without a delivery
    bool arrival = false;
    std::int64_t delivered_arrival = -1;  // arrival slot of the delivered packet
};

/// Counters of one tagged link over the measurement window.
struct LinkStats {
    std::int64_t attempts = 0;
    std::int64_t successes = 0;
    std::int64_t active_slots = 0;
    std::int64_t arrivals = 0;         // arrivals inside the window
    std::int64_t delivered = 0;        // of those, delivered inside the window
    std::int64_t sojourn_sum = 0;
    std::int64_t censored = 0;         // of those, still queued at the horizon
    std::int64_t initial_backlog = 0;  // buffer length when the window opens
    std::int64_t final_buffer = 0;
    std::int64_t cell_users = 0;       // UEs drawn in the cell, proportional to its area on average
    std::vector<std::int32_t> sojourns;  // only with keep_sojourns

    double success_fraction() const { return attempts > 0 ? double(successes) / double(attempts) : 0.0; }
    double mean_sojourn() const { return delivered > 0 ? double(sojourn_sum) / double(delivered) : 0.0; }
    bool unstable() const { return censored > delivered; }

    bool operator==(const LinkStats&) const = default;
};

struct RealizationStats {
    std::uint32_t index = 0;
    std::vector<LinkStats> links;

    bool operator==(const RealizationStats&) const = default;
};

struct SimulationResult {
    SimConfig config;
    std::vector<RealizationStats> realizations;

    /// All links of all realizations, in realization order.
    std::vector<LinkStats> links() const;
};

/// SIR of every tagged link for a given active set and power gains
/// gain(link, bs); inactive links get 0, and links without interference +inf.
std::vector<double> link_sir(const NetworkRealization& net, double alpha, const std::vector<char>& active,
                             const std::function<double(int, int)>& gain);

/// Slot dynamics of one realization.
///
/// In the marginal fading model a transmission succeeds with probability
/// prod_x 1 / (1 + theta (d_0 / d_x)^alpha) over the active interferers,
/// which is P(SIR >= theta) under Exp(1) fading given the active set. Each
/// factor is the chance that interferer x does not "kill" the link, i.e.
/// that a Poisson(log1p(theta (d_0/d_x)^alpha)) clock stays silent. The
/// nearest interferers are summed through one uniform; for the rest a
/// Poisson number of candidates is drawn at the larger rate
/// theta (d_0/d_x)^alpha and thinned back to the kill rate.
class SlotEngine {
public:
    static constexpr int kNearInterferers = 48;

    SlotEngine(const NetworkRealization& net, const SimConfig& cfg, std::uint32_t realization);

    /// Departures, then arrivals, for slot `slot`. `out` is resized to one
    /// entry per cell.
    void step(QueueState& q, std::int64_t slot, std::vector<SlotOutcome>& out);

    int cells() const noexcept { return n_; }

private:
    bool transmit_ok(int y, double u_service, std::int64_t slot) const;
    bool far_clear(int y, double u, std::int64_t slot) const;

    SimConfig cfg_;
    int n_;
    int near_count_ = 0;
    Stream traffic_;
    Stream fading_;
    std::vector<char> on_;
    // marginal model
    std::vector<int> near_index_;       // n x near_count_, row per link
    std::vector<double> near_weight_;   // log1p(theta (d0/d)^alpha)
    Eigen::MatrixXd far_cumulative_;    // column y: running sum over far x of theta (d0/d)^alpha
    Eigen::VectorXd far_total_;
    // explicit model
    Eigen::MatrixXd path_gain_;         // d_yx^{-alpha}
};

/// One slot from scratch (engine rebuilt per call); for small fixtures.
std::vector<SlotOutcome> step_slot(const NetworkRealization& net, QueueState& q, const SimConfig& cfg,
                                   std::uint32_t realization, std::int64_t slot);

RealizationStats run_realization(const SimConfig& cfg, std::uint32_t realization);
RealizationStats run_realization(const SimConfig& cfg, const NetworkRealization& net,
                                 std::uint32_t realization);

/// All realizations, spread over cfg.threads workers; output does not depend
/// on the thread count.
SimulationResult run_simulation(const SimConfig& cfg);

} // namespace sirmeta::sim

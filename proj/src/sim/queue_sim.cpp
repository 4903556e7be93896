#include "sirmeta/sim/queue_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace sirmeta::sim {

std::vector<LinkStats> SimulationResult::links() const {
    std::vector<LinkStats> all;
    for (const auto& r : realizations) all.insert(all.end(), r.links.begin(), r.links.end());
    return all;
}

std::vector<double> link_sir(const NetworkRealization& net, double alpha, const std::vector<char>& active,
                             const std::function<double(int, int)>& gain) {
    const Torus torus = net.torus();
    const int n = net.cells();
    std::vector<double> sir(n, 0.0);
    for (int y = 0; y < n; ++y) {
        if (!active[y]) continue;
        const double signal = gain(y, y) * std::pow(net.tagged[y].distance, -alpha);
        double interference = 0;
        for (int x = 0; x < n; ++x) {
            if (x == y || !active[x]) continue;
            interference += gain(y, x) * std::pow(torus.dist(net.tagged[y].ue, net.bs_points[x]), -alpha);
        }
        sir[y] = interference > 0 ? signal / interference : std::numeric_limits<double>::infinity();
    }
    return sir;
}

SlotEngine::SlotEngine(const NetworkRealization& net, const SimConfig& cfg, std::uint32_t realization)
    : cfg_(cfg),
      n_(net.cells()),
      traffic_(cfg.seed, realization, Purpose::traffic),
      fading_(cfg.seed, realization, Purpose::fading),
      on_(n_, 0) {
    const Torus torus = net.torus();
    const double half_alpha = 0.5 * cfg.alpha;
    if (cfg.fading == FadingModel::explicit_draws) {
        path_gain_.resize(n_, n_);
        for (int x = 0; x < n_; ++x) {
            for (int y = 0; y < n_; ++y) {
                path_gain_(y, x) = std::pow(torus.dist2(net.tagged[y].ue, net.bs_points[x]), -half_alpha);
            }
        }
        return;
    }

    near_count_ = std::min(kNearInterferers, n_ - 1);
    near_index_.resize(static_cast<std::size_t>(n_) * near_count_);
    near_weight_.resize(near_index_.size());
    far_cumulative_.resize(n_, n_);
    far_total_.resize(n_);
    Eigen::ArrayXd bx(n_), by(n_);
    for (int x = 0; x < n_; ++x) {
        bx[x] = net.bs_points[x].x;
        by[x] = net.bs_points[x].y;
    }
    const double side = net.side;
    const double half_side = 0.5 * side;
    Eigen::ArrayXd dx(n_), dy(n_), w(n_);
    std::vector<int> order;
    order.reserve(n_);
    // Weight of a BS at the radius holding about 3 near_count_ BSs on average.
    const double r2 = 3.0 * near_count_ * side * side / (n_ * 3.141592653589793);
    auto w_cut = [&](const Eigen::ArrayXd&, int y) {
        const double d0sq = net.tagged[y].distance * net.tagged[y].distance;
        return cfg.theta * std::pow(d0sq / r2, half_alpha);
    };
    for (int y = 0; y < n_; ++y) {
        const Point& ue = net.tagged[y].ue;
        const double d0sq = net.tagged[y].distance * net.tagged[y].distance;
        dx = bx - ue.x;
        dx = (dx > half_side).select(dx - side, (dx < -half_side).select(dx + side, dx));
        dy = by - ue.y;
        dy = (dy > half_side).select(dy - side, (dy < -half_side).select(dy + side, dy));
        // theta (d0/d)^alpha, an upper bound on the kill rate log1p of it
        w = cfg.theta * (half_alpha * (d0sq / (dx.square() + dy.square())).log()).exp();
        w[y] = 0.0;
        // Strongest interferers first; ties go to the lower index. Preselect
        // by weight so the selection runs over a few times near_count_ entries.
        const double cut = w_cut(w, y);
        order.clear();
        for (int x = 0; x < n_; ++x) {
            if (x != y && w[x] >= cut) order.push_back(x);
        }
        if (static_cast<int>(order.size()) < near_count_) {
            order.clear();
            for (int x = 0; x < n_; ++x) order.push_back(x);
            std::swap(order[y], order.back());
            order.pop_back();
        }
        auto stronger = [&](int a, int b) { return w[a] > w[b] || (w[a] == w[b] && a < b); };
        std::nth_element(order.begin(), order.begin() + near_count_, order.end(), stronger);
        std::sort(order.begin(), order.begin() + near_count_);
        for (int i = 0; i < near_count_; ++i) {
            const int x = order[i];
            near_index_[static_cast<std::size_t>(y) * near_count_ + i] = x;
            near_weight_[static_cast<std::size_t>(y) * near_count_ + i] = std::log1p(w[x]);
            w[x] = 0.0;
        }
        double run = 0;
        double* col = far_cumulative_.col(y).data();
        for (int x = 0; x < n_; ++x) {
            run += w[x];
            col[x] = run;
        }
        far_total_[y] = run;
    }
}

bool SlotEngine::far_clear(int y, double u, std::int64_t slot) const {
    const double total = far_total_[y];
    // Number of candidate killers ~ Poisson(total), by inversion of u.
    double p = std::exp(-total);
    double cdf = p;
    int candidates = 0;
    while (u >= cdf && candidates < 4096) {
        ++candidates;
        p *= total / candidates;
        cdf += p;
    }
    const double* col = far_cumulative_.col(y).data();
    for (int c = 0; c < candidates; ++c) {
        const auto v = fading_.uniforms(static_cast<std::uint32_t>(y), (static_cast<std::uint64_t>(slot) << 16) | c);
        const auto x = static_cast<int>(std::upper_bound(col, col + n_, v[0] * total) - col);
        if (x >= n_ || !on_[x]) continue;
        // Candidates come at rate t; a kill needs rate log1p(t).
        const double t = col[x] - (x > 0 ? col[x - 1] : 0.0);
        if (v[1] * t < std::log1p(t)) return false;
    }
    return true;
}

bool SlotEngine::transmit_ok(int y, double u_service, std::int64_t slot) const {
    if (cfg_.fading == FadingModel::marginal) {
        const std::size_t row = static_cast<std::size_t>(y) * near_count_;
        double load = 0;
        for (int i = 0; i < near_count_; ++i) {
            load += near_weight_[row + i] * on_[near_index_[row + i]];
        }
        // Given u_service < e^-load, u_service e^load is again uniform and
        // drives the far-field candidate count.
        const double near_ok = std::exp(-load);
        return u_service < near_ok && far_clear(y, u_service / near_ok, slot);
    }
    auto gain = [&](int x) {
        const double u = fading_.uniforms(static_cast<std::uint32_t>(y),
                                          static_cast<std::uint64_t>(slot) * n_ + x)[0];
        return -std::log1p(-u);
    };
    const double signal = gain(y) * path_gain_(y, y);
    double interference = 0;
    for (int x = 0; x < n_; ++x) {
        if (x != y && on_[x]) interference += gain(x) * path_gain_(y, x);
    }
    return signal >= cfg_.theta * interference;
}

void SlotEngine::step(QueueState& q, std::int64_t slot, std::vector<SlotOutcome>& out) {
    for (int x = 0; x < n_; ++x) on_[x] = q.active(x) ? 1 : 0;
    out.assign(n_, SlotOutcome{});
    for (int y = 0; y < n_; ++y) {
        const auto u = traffic_.uniforms(static_cast<std::uint32_t>(y), static_cast<std::uint64_t>(slot));
        SlotOutcome& o = out[y];
        o.active = on_[y] != 0;
        if (o.active && transmit_ok(y, u[1], slot)) {
            o.success = true;
            o.delivered_arrival = q.pop(y);
            o.sojourn = slot - o.delivered_arrival;
        }
        if (u[0] < cfg_.xi) {
            o.arrival = true;
            q.push(y, slot);
        }
    }
}

std::vector<SlotOutcome> step_slot(const NetworkRealization& net, QueueState& q, const SimConfig& cfg,
                                   std::uint32_t realization, std::int64_t slot) {
    SlotEngine engine(net, cfg, realization);
    std::vector<SlotOutcome> out;
    engine.step(q, slot, out);
    return out;
}

RealizationStats run_realization(const SimConfig& cfg, const NetworkRealization& net,
                                 std::uint32_t realization) {
    const int n = net.cells();
    RealizationStats stats;
    stats.index = realization;
    stats.links.resize(n);
    for (int b : net.association) ++stats.links[b].cell_users;
    QueueState q(n);
    SlotEngine engine(net, cfg, realization);
    std::vector<SlotOutcome> out;

    const std::int64_t warmup = cfg.warmup_slots;
    const std::int64_t horizon = warmup + cfg.measure_slots;
    for (std::int64_t slot = 0; slot < horizon; ++slot) {
        if (slot == warmup) {
            for (int y = 0; y < n; ++y) stats.links[y].initial_backlog = q.buffer_len(y);
        }
        engine.step(q, slot, out);
        if (slot < warmup) continue;
        for (int y = 0; y < n; ++y) {
            const SlotOutcome& o = out[y];
            LinkStats& s = stats.links[y];
            if (o.active) {
                ++s.attempts;
                ++s.active_slots;
            }
            if (o.success) {
                ++s.successes;
                if (o.delivered_arrival >= warmup) {
                    ++s.delivered;
                    s.sojourn_sum += o.sojourn;
                    if (cfg.keep_sojourns) s.sojourns.push_back(static_cast<std::int32_t>(o.sojourn));
                }
            }
            if (o.arrival) ++s.arrivals;
        }
    }
    for (int y = 0; y < n; ++y) {
        LinkStats& s = stats.links[y];
        s.final_buffer = q.buffer_len(y);
        for (std::int64_t a : q.queue(y)) {
            if (a >= warmup) ++s.censored;
        }
    }
    return stats;
}

RealizationStats run_realization(const SimConfig& cfg, std::uint32_t realization) {
    const NetworkRealization net = build_realization(cfg, realization);
    return run_realization(cfg, net, realization);
}

SimulationResult run_simulation(const SimConfig& cfg) {
    cfg.validate();
    SimulationResult result;
    result.config = cfg;
    result.realizations.resize(static_cast<std::size_t>(cfg.realizations));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int r = next++; r < cfg.realizations; r = next++) {
            try {
                result.realizations[r] = run_realization(cfg, static_cast<std::uint32_t>(r));
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::min(cfg.threads, cfg.realizations);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return result;
}

} // namespace sirmeta::sim

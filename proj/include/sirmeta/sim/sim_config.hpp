#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "sirmeta/errors.hpp"

namespace sirmeta::sim {

enum class FadingModel {
    marginal,  // success drawn with its exact conditional probability given the active set
    explicit_draws,  // fresh Exp(1) power gain per link and slot
};

/// Scenario and run parameters of the slotted network simulation.
struct SimConfig {
    double lambda_b = 1.0;
    double lambda_u = 10.0;
    double region_side = std::sqrt(2000.0);  // 2,000 expected BSs at lambda_b = 1
    double alpha = 3.8;
    double theta = 1.0;  // linear
    double xi = 0.3;
    int warmup_slots = 500;
    int measure_slots = 2000;
    int realizations = 1;
    std::uint64_t seed = 1;

    double min_expected_bs = 100;  // statistical floor on lambda_b * side^2
    FadingModel fading = FadingModel::marginal;
    bool keep_sojourns = false;  // store every delivered sojourn, not just sum and count
    int threads = 1;

    double expected_bs() const { return lambda_b * region_side * region_side; }

    void validate() const {
        if (!(lambda_b > 0) || !std::isfinite(lambda_b)) throw ConfigError("lambda_b", "must be > 0");
        if (!(lambda_u > 0) || !std::isfinite(lambda_u)) throw ConfigError("lambda_u", "must be > 0");
        if (!(region_side > 0) || !std::isfinite(region_side)) throw ConfigError("region_side", "must be > 0");
        if (!(alpha > 2) || !std::isfinite(alpha)) throw ConfigError("alpha", "must be finite and > 2");
        if (!(theta >= 0) || !std::isfinite(theta)) throw ConfigError("theta", "must be finite and >= 0");
        if (!(xi >= 0 && xi <= 1)) throw ConfigError("xi", "must lie in [0, 1]");
        if (warmup_slots < 0) throw ConfigError("warmup_slots", "must be >= 0");
        if (measure_slots < 1) throw ConfigError("measure_slots", "must be >= 1");
        if (realizations < 1) throw ConfigError("realizations", "must be >= 1");
        if (realizations > 0xFFFFFF) throw ConfigError("realizations", "must be < 2^24");
        if (threads < 1) throw ConfigError("threads", "must be >= 1");
        if (expected_bs() < min_expected_bs) {
            throw ConfigError("region_side", "expected BS count lambda_b * side^2 = " +
                                                 std::to_string(expected_bs()) + " is below the floor " +
                                                 std::to_string(min_expected_bs));
        }
    }
};

} // namespace sirmeta::sim

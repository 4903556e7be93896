#pragma once

#include <cmath>

#include "sirmeta/errors.hpp"

namespace sirmeta {

/// Scenario parameters and numerical controls for the analytical model.
///
/// theta is linear; dB conversion happens at the harness boundary only.
/// Transmit power cancels in the SIR and is not a parameter.
struct AnalysisConfig {
    double theta = 1.0;   // SIR threshold (linear)
    double xi = 0.3;      // Bernoulli arrival probability per slot
    double alpha = 3.8;   // path-loss exponent, > 2

    int k_max = 64;             // truncation of the binomial series
    double omega_max = 1e3;     // upper limit of the Gil-Pelaez integral
    double omega_min = 1e-6;    // lower cutoff at the removable singularity
    int grid_size = 201;        // u-points of the CDF grid
    double fp_tol = 1e-4;       // sup-norm stopping tolerance
    int fp_max_iter = 100;

    // Composite rule behind the Gil-Pelaez sweeps: panel width on
    // [1, omega_max] and Gauss points per panel.
    double omega_panel_width = 1.0;
    int omega_panel_points = 8;

    double delta() const noexcept { return 2.0 / alpha; }

    void validate() const {
        if (!(theta >= 0) || !std::isfinite(theta)) throw ConfigError("theta", "must be finite and >= 0");
        if (!(xi >= 0 && xi <= 1)) throw ConfigError("xi", "must lie in [0, 1]");
        if (!(alpha > 2) || !std::isfinite(alpha)) throw ConfigError("alpha", "must be finite and > 2");
        if (k_max < 1) throw ConfigError("k_max", "must be >= 1");
        if (!(omega_min > 0)) throw ConfigError("omega_min", "must be > 0");
        if (!(omega_min < omega_max)) throw ConfigError("omega_max", "must exceed omega_min");
        if (!(omega_max > 1)) throw ConfigError("omega_max", "must exceed 1");
        if (grid_size < 2) throw ConfigError("grid_size", "must be >= 2");
        if (!(fp_tol > 0)) throw ConfigError("fp_tol", "must be > 0");
        if (fp_max_iter < 1) throw ConfigError("fp_max_iter", "must be >= 1");
        if (!(omega_panel_width > 0)) throw ConfigError("omega_panel_width", "must be > 0");
        if (omega_panel_points < 2) throw ConfigError("omega_panel_points", "must be >= 2");
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace sirmeta

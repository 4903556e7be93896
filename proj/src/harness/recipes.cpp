#include "sirmeta/harness/experiment.hpp"

#include <cmath>

namespace sirmeta::harness {

namespace {

std::vector<double> range(double start, double stop, double step) {
    std::vector<double> v;
    const auto n = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int i = 0; i <= n; ++i) v.push_back(std::round((start + i * step) * 1e12) / 1e12);
    return v;
}

} // namespace

std::vector<std::string> figure_names() {
    return {"fig3", "fig4", "fig5a", "fig5b", "fig6", "fig7", "fig8", "fig9"};
}

ExperimentSpec figure_recipe(const std::string& name) {
    ExperimentSpec s;
    s.name = name;
    s.alpha = 3.8;
    if (name == "fig3") {
        // Average active probability over the arrival rate, one curve per threshold.
        s.mode = Mode::analyze;
        s.metric = Metric::active_prob;
        s.sweep = {{"theta_db", {-10, -5, 0, 5, 10}}, {"xi", range(0, 1, 0.05)}};
    } else if (name == "fig4") {
        s.mode = Mode::analyze;
        s.metric = Metric::beta;
        s.theta_db = 0;
        s.xi = 0.3;
        s.sweep = {{"alpha", {3.5, 3.8, 4.0}}};
    } else if (name == "fig5a") {
        s.mode = Mode::compare;
        s.metric = Metric::meta_cdf;
        s.xi = 0.3;
        s.sweep = {{"theta_db", {-10, -5, 0, 5, 10, 15}}};
        s.sim.realizations = 200;
        s.sim_target_attempts = 400;
    } else if (name == "fig5b") {
        s.mode = Mode::compare;
        s.metric = Metric::meta_cdf;
        s.theta_db = 0;
        s.sweep = {{"xi", {0.05, 0.1, 0.3, 0.5, 0.8}}};
        s.sim.realizations = 200;
        // 2,000 slots give a link about 100 attempts at xi = 0.05, too coarse for u near 1.
        s.sim_target_attempts = 400;
    } else if (name == "fig6") {
        s.mode = Mode::analyze;
        s.metric = Metric::stability;
        s.theta_db = 0;
        s.epsilons = range(0.05, 0.5, 0.05);
    } else if (name == "fig7") {
        s.mode = Mode::compare;
        s.metric = Metric::coverage;
        s.sweep = {{"theta_db", range(-10, 20, 2.5)}, {"xi", {0.05, 0.1, 0.3, 0.5}}};
        s.sim.realizations = 10;
        s.note = "theta range -10..20 dB assumed, the figure axis is not legible";
    } else if (name == "fig8") {
        s.mode = Mode::analyze;
        s.metric = Metric::edge_coverage;
        s.edge_u = 0.95;
        s.sweep = {{"theta_db", {-10, -5, 0, 5, 10}}, {"xi", range(0.05, 1, 0.05)}};
    } else if (name == "fig9") {
        s.mode = Mode::compare;
        s.metric = Metric::delay;
        s.theta_db = 0;
        s.sweep = {{"xi", {0.2, 0.3, 0.4}}};
        s.sim.realizations = 50;
    } else {
        std::string known;
        for (const auto& n : figure_names()) known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("figure", "unknown figure '" + name + "', expected one of " + known);
    }
    return s;
}

} // namespace sirmeta::harness

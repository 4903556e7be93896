#pragma once
// Experiment orchestration: scenario specs, sweeps, comparison metrics and
// figure-ready tables for the analysis and the simulator.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "sirmeta/analysis_config.hpp"
#include "sirmeta/cdf_grid.hpp"
#include "sirmeta/sim/sim_config.hpp"

namespace sirmeta::harness {

enum class Mode { analyze, simulate, compare };
enum class Metric {
    meta_cdf,       // F(u) on the u-grid
    active_prob,    // eta(xi)
    beta,           // Beta approximation next to the fixed point
    stability,      // largest stable xi per epsilon, three criteria
    coverage,       // mean success probability M_1 and its bounds
    edge_coverage,  // 1 - F(edge_u)
    delay,          // P(D <= T) of the mean delay
};
enum class OutputFormat { csv, json };

const char* to_string(Mode m);
const char* to_string(Metric m);
const char* to_string(OutputFormat f);
Mode mode_from_string(const std::string& s);
Metric metric_from_string(const std::string& s);
OutputFormat format_from_string(const std::string& s);

/// Values of one swept parameter: "theta_db", "xi" or "alpha".
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepPoint {
    double theta_db = 0;
    double xi = 0;
    double alpha = 0;
};

struct ExperimentSpec {
    std::string name = "custom";
    Mode mode = Mode::analyze;
    Metric metric = Metric::meta_cdf;
    // Base point; theta is in dB here and nowhere else.
    double theta_db = 0;
    double xi = 0.3;
    double alpha = 3.8;
    std::vector<SweepAxis> sweep;  // cartesian product, in this order
    AnalysisConfig analysis;       // theta / xi / alpha are taken from the point
    sim::SimConfig sim;            // likewise
    // Lengthens the measurement window to ceil(target / xi) slots when that is
    // longer, so light-load links still make enough attempts. 0 turns it off.
    int sim_target_attempts = 0;
    int min_attempts = 20;
    std::vector<double> epsilons{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};
    std::vector<double> t_points;  // delay grid; empty means the default grid
    double edge_u = 0.95;
    std::string note;

    // Not part of the resolved config: they do not change the output.
    std::string output_path;
    OutputFormat output_format = OutputFormat::csv;
    int threads = 1;

    /// Throws ConfigError naming the offending key.
    void validate() const;
    std::vector<SweepPoint> points() const;
    AnalysisConfig analysis_at(const SweepPoint& p) const;
    sim::SimConfig sim_at(const SweepPoint& p) const;
    std::vector<double> delay_points() const;
};

/// key = value text. Blank lines and '#' comments are skipped except lines
/// starting with "#@ ", which carry the config embedded in emitted CSV
/// files. Text starting with '{' is read as an emitted JSON file.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec parse_config_file(const std::string& path);
/// Applies one "key = value" (or key=value) assignment.
void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Canonical key = value lines of the resolved config, one per line.
std::string resolved_config(const ExperimentSpec& spec);
/// FNV-1a 64 of resolved_config.
std::uint64_t config_hash(const ExperimentSpec& spec);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double v);

/// Figure recipes: fig3, fig4, fig5a, fig5b, fig6, fig7, fig8, fig9.
ExperimentSpec figure_recipe(const std::string& name);
std::vector<std::string> figure_names();

struct ComparisonReport {
    double ks_distance = 0;
    double sup_norm = 0;
    double mean_abs_err = 0;
    std::vector<double> residuals;  // a - b per u-point of a
};

/// Metrics between two CDF grids; b is resampled onto a's u-points when
/// the grids differ.
ComparisonReport compare_cdfs(const CdfGrid& a, const CdfGrid& b);

struct PointReport {
    SweepPoint point;
    ComparisonReport report;
};

struct PointFailure {
    SweepPoint point;
    std::string message;
};

struct ExperimentResult {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::vector<PointReport> reports;
    std::vector<PointFailure> failures;
    std::string config_text;
    std::uint64_t hash = 0;
    std::uint64_t seed = 0;

    bool partial() const { return !failures.empty(); }
};

/// Runs every sweep point, isolating failures per point. Writes nothing.
/// `progress`, if set, is called after each point (serialized).
ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const SweepPoint&, const std::string&)>& progress = {});

void write_csv(std::ostream& os, const ExperimentResult& r);
void write_reports_csv(std::ostream& os, const ExperimentResult& r);
void write_json(std::ostream& os, const ExperimentResult& r);

/// Writes the result to spec.output_path in spec.output_format (stdout when
/// the path is empty). CSV comparison reports go to "<path>.reports.csv".
void write_result(const ExperimentSpec& spec, const ExperimentResult& r);

} // namespace sirmeta::harness

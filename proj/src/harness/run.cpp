#include "sirmeta/harness/experiment.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include "json.hpp"
#include "sirmeta/metadist.hpp"
#include "sirmeta/sim/empirical.hpp"

namespace sirmeta::harness {

ComparisonReport compare_cdfs(const CdfGrid& a, const CdfGrid& b) {
    const bool same = a.size() == b.size() && a.u_points() == b.u_points();
    const CdfGrid bb = same ? b : b.resampled(a.u_points());
    ComparisonReport r;
    const Eigen::VectorXd diff = a.values() - bb.values();
    r.residuals.assign(diff.data(), diff.data() + diff.size());
    r.ks_distance = std::min(1.0, diff.cwiseAbs().maxCoeff());
    r.sup_norm = r.ks_distance;
    r.mean_abs_err = diff.cwiseAbs().mean();
    return r;
}

namespace {

struct PointOutput {
    std::vector<std::vector<double>> rows;  // without the point columns
    std::optional<ComparisonReport> report;
};

std::vector<std::string> metric_columns(Mode mode, Metric metric) {
    const bool cmp = mode == Mode::compare;
    switch (metric) {
    case Metric::meta_cdf:
        return cmp ? std::vector<std::string>{"u", "analysis", "simulation", "residual"}
                   : std::vector<std::string>{"u", "cdf"};
    case Metric::active_prob:
        return cmp ? std::vector<std::string>{"analysis", "simulation", "abs_error"}
                   : std::vector<std::string>{"active_prob"};
    case Metric::beta: return {"u", "analysis", "beta"};
    case Metric::stability: return {"epsilon", "sufficient", "approximate", "necessary"};
    case Metric::coverage:
        if (cmp) return {"analysis", "simulation", "lower", "upper", "abs_error"};
        if (mode == Mode::simulate) return {"coverage"};
        return {"coverage", "lower", "upper", "light_traffic"};
    case Metric::edge_coverage:
        return cmp ? std::vector<std::string>{"analysis", "simulation", "abs_error"}
                   : std::vector<std::string>{"edge_coverage"};
    case Metric::delay:
        return cmp ? std::vector<std::string>{"T", "analysis", "simulation", "residual"}
                   : std::vector<std::string>{"T", "cdf"};
    }
    return {};
}

class PointRunner {
public:
    PointRunner(const ExperimentSpec& spec, const SweepPoint& p, int sim_threads)
        : spec_(spec), cfg_(spec.analysis_at(p)), sim_cfg_(spec.sim_at(p)) {
        sim_cfg_.threads = sim_threads;
    }

    PointOutput run() {
        switch (spec_.metric) {
        case Metric::meta_cdf: return meta_cdf();
        case Metric::active_prob: return scalar([&] { return avg_active_prob(analysis(), cfg_.xi); },
                                                [&] { return sim::empirical_active_prob(links(), sim_cfg_.measure_slots); });
        case Metric::beta: return beta();
        case Metric::stability: return stability();
        case Metric::coverage: return coverage();
        case Metric::edge_coverage:
            return scalar([&] { return 1.0 - analysis()(spec_.edge_u); },
                          [&] { return 1.0 - empirical()(spec_.edge_u); });
        case Metric::delay: return delay();
        }
        return {};
    }

private:
    bool want_analysis() const { return spec_.mode != Mode::simulate; }
    bool want_simulation() const { return spec_.mode != Mode::analyze; }

    const CdfGrid& analysis() {
        if (!fp_) fp_ = fixed_point_cdf(cfg_).cdf;
        return *fp_;
    }
    const std::vector<sim::LinkStats>& links() {
        if (!links_) links_ = sim::run_simulation(sim_cfg_).links();
        return *links_;
    }
    CdfGrid empirical() {
        return sim::empirical_meta_cdf(links(), spec_.min_attempts, CdfGrid::uniform_points(cfg_.grid_size));
    }

    PointOutput meta_cdf() {
        PointOutput out;
        const Eigen::VectorXd u = CdfGrid::uniform_points(cfg_.grid_size);
        if (spec_.mode == Mode::compare) {
            const CdfGrid a = analysis();
            const CdfGrid e = empirical();
            out.report = compare_cdfs(a, e);
            for (Eigen::Index i = 0; i < u.size(); ++i) {
                out.rows.push_back({u[i], a.values()[i], e.values()[i], out.report->residuals[i]});
            }
            return out;
        }
        const CdfGrid f = spec_.mode == Mode::analyze ? analysis() : empirical();
        for (Eigen::Index i = 0; i < u.size(); ++i) out.rows.push_back({u[i], f.values()[i]});
        return out;
    }

    template <typename A, typename S>
    PointOutput scalar(A&& a, S&& s) {
        PointOutput out;
        if (spec_.mode == Mode::compare) {
            const double va = a(), vs = s();
            out.rows.push_back({va, vs, std::abs(va - vs)});
        } else {
            out.rows.push_back({spec_.mode == Mode::analyze ? a() : s()});
        }
        return out;
    }

    PointOutput beta() {
        PointOutput out;
        const CdfGrid& a = analysis();
        const BetaApproxResult b = beta_approx(cfg_);
        const CdfGrid g = b.params.grid(a.u_points());
        out.report = compare_cdfs(a, g);
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out.rows.push_back({a.u_points()[i], a.values()[i], g.values()[i]});
        }
        return out;
    }

    PointOutput stability() {
        PointOutput out;
        StabilitySolver solver(cfg_);
        for (double eps : spec_.epsilons) {
            out.rows.push_back({eps, solver.threshold(eps, StabilityMode::sufficient),
                                solver.threshold(eps, StabilityMode::approximate),
                                solver.threshold(eps, StabilityMode::necessary)});
        }
        return out;
    }

    PointOutput coverage() {
        PointOutput out;
        if (spec_.mode == Mode::simulate) {
            out.rows.push_back({sim::empirical_mean_coverage(links())});
            return out;
        }
        const double m1 = moment(cfg_, 1, analysis());
        const CoverageEnvelope env = coverage_envelope(cfg_);
        if (spec_.mode == Mode::analyze) {
            out.rows.push_back({m1, env.lower, env.upper, env.light_traffic});
        } else {
            const double s = sim::empirical_mean_coverage(links());
            out.rows.push_back({m1, s, env.lower, env.upper, std::abs(m1 - s)});
        }
        return out;
    }

    PointOutput delay() {
        PointOutput out;
        const std::vector<double> ts = spec_.delay_points();
        std::optional<sim::EmpiricalDelay> emp;
        if (want_simulation()) emp.emplace(links());
        ComparisonReport rep;
        for (double t : ts) {
            if (spec_.mode == Mode::compare) {
                const double a = delay_cdf(cfg_, analysis(), t);
                const double s = emp->cdf(t);
                out.rows.push_back({t, a, s, a - s});
                rep.residuals.push_back(a - s);
                rep.ks_distance = std::max(rep.ks_distance, std::abs(a - s));
                rep.mean_abs_err += std::abs(a - s) / static_cast<double>(ts.size());
            } else {
                out.rows.push_back({t, want_analysis() ? delay_cdf(cfg_, analysis(), t) : emp->cdf(t)});
            }
        }
        if (spec_.mode == Mode::compare) {
            rep.sup_norm = rep.ks_distance;
            out.report = rep;
        }
        return out;
    }

    const ExperimentSpec& spec_;
    AnalysisConfig cfg_;
    sim::SimConfig sim_cfg_;
    std::optional<CdfGrid> fp_;
    std::optional<std::vector<sim::LinkStats>> links_;
};

std::string point_label(const SweepPoint& p) {
    return "theta_db=" + format_double(p.theta_db) + " xi=" + format_double(p.xi) + " alpha=" + format_double(p.alpha);
}

std::string hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

} // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::function<void(const SweepPoint&, const std::string&)>& progress) {
    spec.validate();
    const std::vector<SweepPoint> pts = spec.points();
    ExperimentResult out;
    out.columns = {"theta_db", "xi", "alpha"};
    for (auto& c : metric_columns(spec.mode, spec.metric)) out.columns.push_back(c);
    out.config_text = resolved_config(spec);
    out.hash = config_hash(spec);
    out.seed = spec.sim.seed;

    std::vector<std::optional<PointOutput>> results(pts.size());
    std::vector<std::string> errors(pts.size());
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(spec.threads), pts.size()));
    const int sim_threads = workers <= 1 ? spec.threads : 1;
    std::atomic<std::size_t> next{0};
    std::mutex report_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < pts.size(); i = next++) {
            try {
                results[i] = PointRunner(spec, pts[i], sim_threads).run();
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            if (progress) {
                const std::lock_guard lock(report_mutex);
                progress(pts[i], results[i] ? std::string("ok") : "failed: " + errors[i]);
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < pts.size(); ++i) {
        const SweepPoint& p = pts[i];
        if (!results[i]) {
            out.failures.push_back({p, errors[i]});
            continue;
        }
        for (const auto& r : results[i]->rows) {
            std::vector<double> row{p.theta_db, p.xi, p.alpha};
            row.insert(row.end(), r.begin(), r.end());
            out.rows.push_back(std::move(row));
        }
        if (results[i]->report) out.reports.push_back({p, *results[i]->report});
    }
    return out;
}

void write_csv(std::ostream& os, const ExperimentResult& r) {
    os << "# config_hash = " << hex(r.hash) << '\n';
    os << "# seed = " << r.seed << '\n';
    std::size_t start = 0;
    while (start < r.config_text.size()) {
        const auto end = r.config_text.find('\n', start);
        os << "#@ " << r.config_text.substr(start, end - start) << '\n';
        start = end == std::string::npos ? r.config_text.size() : end + 1;
    }
    for (const auto& f : r.failures) os << "# failed " << point_label(f.point) << ": " << f.message << '\n';
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
        os << '\n';
    }
}

void write_reports_csv(std::ostream& os, const ExperimentResult& r) {
    os << "# config_hash = " << hex(r.hash) << '\n';
    os << "# seed = " << r.seed << '\n';
    os << "theta_db,xi,alpha,ks_distance,sup_norm,mean_abs_err\n";
    for (const auto& pr : r.reports) {
        os << format_double(pr.point.theta_db) << ',' << format_double(pr.point.xi) << ','
           << format_double(pr.point.alpha) << ',' << format_double(pr.report.ks_distance) << ','
           << format_double(pr.report.sup_norm) << ',' << format_double(pr.report.mean_abs_err) << '\n';
    }
}

void write_json(std::ostream& os, const ExperimentResult& r) {
    using json = nlohmann::ordered_json;
    json j;
    j["config_hash"] = hex(r.hash);
    j["seed"] = r.seed;
    json cfg = json::object();
    std::size_t start = 0;
    while (start < r.config_text.size()) {
        const auto end = r.config_text.find('\n', start);
        const std::string line = r.config_text.substr(start, end - start);
        const auto eq = line.find(" = ");
        cfg[line.substr(0, eq)] = eq == std::string::npos ? "" : line.substr(eq + 3);
        start = end == std::string::npos ? r.config_text.size() : end + 1;
    }
    j["config"] = cfg;
    j["columns"] = r.columns;
    json records = json::array();
    for (const auto& row : r.rows) {
        json rec = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            // JSON has no infinity; keep the CSV spelling.
            if (std::isinf(row[i])) rec[r.columns[i]] = format_double(row[i]);
            else rec[r.columns[i]] = row[i];
        }
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    json reports = json::array();
    for (const auto& pr : r.reports) {
        reports.push_back({{"theta_db", pr.point.theta_db},
                           {"xi", pr.point.xi},
                           {"alpha", pr.point.alpha},
                           {"ks_distance", pr.report.ks_distance},
                           {"sup_norm", pr.report.sup_norm},
                           {"mean_abs_err", pr.report.mean_abs_err},
                           {"residuals", pr.report.residuals}});
    }
    j["reports"] = std::move(reports);
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"theta_db", f.point.theta_db},
                            {"xi", f.point.xi},
                            {"alpha", f.point.alpha},
                            {"message", f.message}});
    }
    j["failures"] = std::move(failures);
    os << j.dump(2) << '\n';
}

void write_result(const ExperimentSpec& spec, const ExperimentResult& r) {
    auto emit = [&](std::ostream& os) {
        if (spec.output_format == OutputFormat::json) write_json(os, r);
        else write_csv(os, r);
    };
    if (spec.output_path.empty()) {
        emit(std::cout);
        return;
    }
    std::ofstream out(spec.output_path, std::ios::binary);
    if (!out) throw ConfigError("output.path", "cannot write '" + spec.output_path + "'");
    emit(out);
    if (spec.output_format == OutputFormat::csv && !r.reports.empty()) {
        std::ofstream rep(spec.output_path + ".reports.csv", std::ios::binary);
        if (!rep) throw ConfigError("output.path", "cannot write '" + spec.output_path + ".reports.csv'");
        write_reports_csv(rep, r);
    }
}

} // namespace sirmeta::harness

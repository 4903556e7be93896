#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"
#include "sirmeta/harness/experiment.hpp"

using namespace sirmeta;
using namespace sirmeta::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string csv_of(const ExperimentResult& r) {
    std::ostringstream os;
    write_csv(os, r);
    return os.str();
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / "sirmeta_harness_test";
    fs::create_directories(d);
    return d / name;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SIRMETA_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Small simulated scenario, about 800 cells.
ExperimentSpec small_sim_spec() {
    ExperimentSpec s;
    s.mode = Mode::compare;
    s.metric = Metric::meta_cdf;
    apply_setting(s, "sim.region_side", "28.3");
    apply_setting(s, "sim.warmup_slots", "50");
    apply_setting(s, "sim.measure_slots", "200");
    return s;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

} // namespace

TEST(Config, ParsesKeysListsAndRanges) {
    const ExperimentSpec s = parse_config(
        "# a comment\n"
        "mode = compare\n"
        "metric=delay\n"
        "theta_db = 3\n"
        "sweep.xi = 0.1:0.3:0.1\n"
        "sweep.alpha = 3.5, 4\n"
        "sim.realizations = 7\n"
        "sim.fading = explicit\n"
        "analysis.grid_size = 101\n");
    EXPECT_EQ(s.mode, Mode::compare);
    EXPECT_EQ(s.metric, Metric::delay);
    EXPECT_EQ(s.theta_db, 3);
    EXPECT_EQ(s.sim.realizations, 7);
    EXPECT_EQ(s.sim.fading, sim::FadingModel::explicit_draws);
    EXPECT_EQ(s.analysis.grid_size, 101);
    const auto pts = s.points();
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_DOUBLE_EQ(pts[0].xi, 0.1);
    EXPECT_DOUBLE_EQ(pts[0].alpha, 3.5);
    EXPECT_DOUBLE_EQ(pts[1].alpha, 4.0);
    EXPECT_NEAR(pts[5].xi, 0.3, 1e-12);
    for (const auto& p : pts) EXPECT_EQ(p.theta_db, 3);
}

TEST(Config, ErrorsNameTheField) {
    auto field_of = [](const std::string& text) {
        try {
            parse_config(text).validate();
        } catch (const ConfigError& e) {
            return e.field();
        }
        return std::string("<none>");
    };
    EXPECT_EQ(field_of("bogus = 1\n"), "bogus");
    EXPECT_EQ(field_of("xi = nope\n"), "xi");
    EXPECT_EQ(field_of("mode = sideways\n"), "mode");
    EXPECT_NE(field_of("alpha = 1.5\n").find("alpha"), std::string::npos);
    EXPECT_EQ(field_of("mode = simulate\nmetric = beta\n"), "metric");
    EXPECT_EQ(field_of("sim.region_side = 3\n"), "<none>");  // analyze mode never builds a network
    EXPECT_EQ(field_of("mode = simulate\nsim.region_side = 3\n"), "sim.region_side");
    EXPECT_EQ(field_of("xi = 0.3\n"), "<none>");
}

TEST(Config, DbConversionHappensOnce) {
    ExperimentSpec s;
    s.theta_db = 10;
    const SweepPoint p = s.points().front();
    EXPECT_NEAR(s.analysis_at(p).theta, 10.0, 1e-12);
    EXPECT_NEAR(s.sim_at(p).theta, 10.0, 1e-12);
}

TEST(Config, ResolvedTextRoundTrips) {
    ExperimentSpec s = figure_recipe("fig7");
    s.sim.seed = 99;
    const std::string text = resolved_config(s);
    const ExperimentSpec back = parse_config(text);
    EXPECT_EQ(resolved_config(back), text);
    EXPECT_EQ(config_hash(back), config_hash(s));
    s.output_path = "/somewhere";
    s.threads = 4;
    EXPECT_EQ(config_hash(s), config_hash(back));
    s.xi = 0.31;
    EXPECT_NE(config_hash(s), config_hash(back));
}

TEST(Config, FormatDoubleIsShortestRoundTrip) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(format_double(1234567.0).find(','), std::string::npos);
}

TEST(Recipes, Fig5b) {
    const ExperimentSpec s = figure_recipe("fig5b");
    EXPECT_EQ(s.mode, Mode::compare);
    EXPECT_EQ(s.alpha, 3.8);
    const auto pts = s.points();
    ASSERT_EQ(pts.size(), 5u);
    const double want[] = {0.05, 0.1, 0.3, 0.5, 0.8};
    for (int i = 0; i < 5; ++i) {
        EXPECT_EQ(pts[i].theta_db, 0);
        EXPECT_DOUBLE_EQ(pts[i].xi, want[i]);
    }
}

TEST(Recipes, Fig8AndFig3) {
    const ExperimentSpec s = figure_recipe("fig8");
    EXPECT_EQ(s.metric, Metric::edge_coverage);
    EXPECT_EQ(s.edge_u, 0.95);
    std::set<double> th;
    for (const auto& p : s.points()) th.insert(p.theta_db);
    EXPECT_EQ(th, (std::set<double>{-10, -5, 0, 5, 10}));
    const ExperimentSpec f3 = figure_recipe("fig3");
    EXPECT_EQ(f3.metric, Metric::active_prob);
    EXPECT_EQ(f3.points().front().xi, 0.0);
    EXPECT_EQ(f3.points().back().xi, 1.0);
}

TEST(Recipes, AllValidateAndUnknownThrows) {
    for (const auto& n : figure_names()) EXPECT_NO_THROW(figure_recipe(n).validate()) << n;
    EXPECT_THROW(figure_recipe("fig10"), ConfigError);
}

TEST(CompareCdfs, EqualAndExtreme) {
    const auto u = CdfGrid::uniform_points(201);
    const CdfGrid a(u, u);
    const ComparisonReport same = compare_cdfs(a, a);
    EXPECT_EQ(same.ks_distance, 0);
    EXPECT_EQ(same.mean_abs_err, 0);
    const CdfGrid zero = CdfGrid::point_mass_at_one(201);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(201);
    ones[0] = 1;
    const CdfGrid one(u, ones);
    const ComparisonReport far = compare_cdfs(zero, one);
    EXPECT_EQ(far.ks_distance, 1.0);
    EXPECT_EQ(far.sup_norm, far.ks_distance);
    EXPECT_NEAR(far.mean_abs_err, 200.0 / 201, 1e-12);
}

TEST(CompareCdfs, StaircaseResampling) {
    // A fine staircase against its 201-point resampling.
    const int n = 2001;
    const auto uf = CdfGrid::uniform_points(n);
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f[i] = std::floor(uf[i] * 10) / 10;
    f[n - 1] = 1;
    const CdfGrid fine(uf, f);
    const CdfGrid coarse = fine.resampled(CdfGrid::uniform_points(201));
    const ComparisonReport r = compare_cdfs(coarse, fine);
    EXPECT_LE(r.ks_distance, 1.0 / 201);
    // Brute force on the common points.
    double ks = 0;
    for (int i = 0; i < 201; ++i) ks = std::max(ks, std::abs(coarse.values()[i] - fine(coarse.u_points()[i])));
    EXPECT_NEAR(r.ks_distance, ks, 1e-15);
}

TEST(CompareCdfs, Symmetric) {
    const auto u = CdfGrid::uniform_points(201);
    Eigen::VectorXd b(201);
    for (int i = 0; i < 201; ++i) b[i] = std::pow(u[i], 3);
    const CdfGrid A(u, u), B(u, b);
    const ComparisonReport ab = compare_cdfs(A, B), ba = compare_cdfs(B, A);
    EXPECT_EQ(ab.ks_distance, ba.ks_distance);
    EXPECT_EQ(ab.sup_norm, ba.sup_norm);
    EXPECT_EQ(ab.mean_abs_err, ba.mean_abs_err);
    EXPECT_GE(ab.ks_distance, 0);
    EXPECT_LE(ab.ks_distance, 1);
}

TEST(RunExperiment, AnalyzeSinglePointHas201Rows) {
    ExperimentSpec s;
    const ExperimentResult r = run_experiment(s);
    EXPECT_FALSE(r.partial());
    EXPECT_EQ(r.rows.size(), 201u);
    EXPECT_EQ(r.columns, (std::vector<std::string>{"theta_db", "xi", "alpha", "u", "cdf"}));
    const auto lines = data_lines(csv_of(r));
    ASSERT_EQ(lines.size(), 202u);
    EXPECT_EQ(lines[0], "theta_db,xi,alpha,u,cdf");
    const std::regex number(R"(-?(\d+(\.\d+)?([eE][-+]?\d+)?|inf))");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::istringstream cells(lines[i]);
        std::string cell;
        int count = 0;
        while (std::getline(cells, cell, ',')) {
            EXPECT_TRUE(std::regex_match(cell, number)) << cell;
            ++count;
        }
        EXPECT_EQ(count, 5);
    }
}

TEST(RunExperiment, EmbedsConfigAndReproduces) {
    ExperimentSpec s = small_sim_spec();
    s.sim.seed = 31;
    const ExperimentResult r = run_experiment(s);
    ASSERT_FALSE(r.partial()) << r.failures.front().message;
    ASSERT_EQ(r.reports.size(), 1u);
    const std::string csv = csv_of(r);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(s)));
    EXPECT_NE(csv.find(std::string("# config_hash = ") + hash), std::string::npos);
    EXPECT_NE(csv.find("# seed = 31"), std::string::npos);

    // Same experiment twice, and again from the config carried by the file.
    EXPECT_EQ(csv_of(run_experiment(s)), csv);
    const ExperimentSpec back = parse_config(csv);
    EXPECT_EQ(config_hash(back), config_hash(s));
    EXPECT_EQ(csv_of(run_experiment(back)), csv);

    std::ostringstream js;
    write_json(js, r);
    const auto j = nlohmann::json::parse(js.str());
    EXPECT_EQ(j["seed"], 31);
    EXPECT_EQ(j["records"].size(), r.rows.size());
    EXPECT_EQ(config_hash(parse_config(js.str())), config_hash(s));
}

TEST(RunExperiment, ThreadCountDoesNotChangeOutput) {
    ExperimentSpec s;
    s.metric = Metric::active_prob;
    s.sweep = {{"xi", {0.1, 0.4, 0.7}}};
    const std::string one = csv_of(run_experiment(s));
    s.threads = 3;
    EXPECT_EQ(csv_of(run_experiment(s)), one);
}

TEST(RunExperiment, FailuresStayWithTheirPoint) {
    ExperimentSpec s;
    s.metric = Metric::active_prob;
    s.analysis.fp_max_iter = 1;
    // xi = 1 converges after one update; xi = 0.3 does not.
    s.sweep = {{"xi", {1.0, 0.3}}};
    const ExperimentResult r = run_experiment(s);
    ASSERT_TRUE(r.partial());
    ASSERT_EQ(r.failures.size(), 1u);
    EXPECT_DOUBLE_EQ(r.failures[0].point.xi, 0.3);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_DOUBLE_EQ(r.rows[0][1], 1.0);
    EXPECT_NE(csv_of(r).find("# failed"), std::string::npos);
}

TEST(RunExperiment, DelayRowsEndAtInfinity) {
    ExperimentSpec s;
    s.metric = Metric::delay;
    s.t_points = {1, 10, std::numeric_limits<double>::infinity()};
    const ExperimentResult r = run_experiment(s);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.rows[0].back(), 0.0);
    EXPECT_TRUE(std::isinf(r.rows[2][3]));
    EXPECT_NE(csv_of(r).find(",inf,"), std::string::npos);
}

TEST(Cli, ExitCodesAndFiles) {
    const fs::path out = scratch("a.csv"), again = scratch("b.csv");
    EXPECT_EQ(run_cli("analyze --set xi=0.2 --out " + out.string()), 0);
    EXPECT_EQ(run_cli("analyze --set xi=0.2 --out " + again.string()), 0);
    EXPECT_EQ(slurp(out), slurp(again));
    EXPECT_EQ(data_lines(slurp(out)).size(), 202u);

    // Rerun from the file itself.
    EXPECT_EQ(run_cli("analyze --config " + out.string() + " --out " + again.string()), 0);
    EXPECT_EQ(slurp(out), slurp(again));

    const fs::path js = scratch("a.json");
    EXPECT_EQ(run_cli("analyze --set xi=0.2 --format json --out " + js.string()), 0);
    EXPECT_NO_THROW(nlohmann::json::parse(slurp(js)));

    EXPECT_EQ(run_cli("analyze --set xi=2"), 1);
    EXPECT_EQ(run_cli("analyze --set nokey=1"), 1);
    EXPECT_EQ(run_cli("figure fig99"), 1);
    EXPECT_EQ(run_cli("analyze --config /nonexistent/file.cfg"), 1);
    EXPECT_EQ(run_cli("analyze --set metric=active_prob --set analysis.fp_max_iter=1 --set sweep.xi=1,0.3 --out " +
                      scratch("p.csv").string()),
              2);
}

TEST(Config, TargetAttemptsLengthensLightLoadWindows) {
    const ExperimentSpec s = figure_recipe("fig5b");
    const auto pts = s.points();
    EXPECT_EQ(s.sim_at(pts[0]).measure_slots, 8000);  // xi = 0.05
    EXPECT_EQ(s.sim_at(pts[1]).measure_slots, 4000);
    EXPECT_EQ(s.sim_at(pts[2]).measure_slots, s.sim.measure_slots);
    ExperimentSpec off = s;
    apply_setting(off, "sim.target_attempts", "0");
    EXPECT_EQ(off.sim_at(pts[0]).measure_slots, s.sim.measure_slots);
    EXPECT_THROW(parse_config("sim.target_attempts = -1\n").validate(), ConfigError);
}

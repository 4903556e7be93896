// Command-line front end: analyze, simulate, compare, figure <name>.
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sirmeta/harness/experiment.hpp"

using namespace sirmeta;
using namespace sirmeta::harness;

namespace {

struct Options {
    std::string config;
    std::vector<std::string> sets;
    std::string seed;
    std::string out;
    std::string format;
    int threads = 0;
    bool quiet = false;
    std::string figure;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config, "key = value config file (emitted CSV/JSON files work too)");
    cmd->add_option("--set", o.sets, "override, key=value (repeatable)");
    cmd->add_option("--seed", o.seed, "root seed of the simulator");
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("-q,--quiet", o.quiet, "no progress on stderr");
}

ExperimentSpec resolve(const std::string& command, const Options& o) {
    ExperimentSpec spec = command == "figure" ? figure_recipe(o.figure) : ExperimentSpec{};
    if (!o.config.empty()) {
        const ExperimentSpec from_file = parse_config_file(o.config);
        // Apply the file on top of the recipe key by key.
        const std::string text = resolved_config(from_file);
        std::size_t start = 0;
        while (start < text.size()) {
            const auto end = text.find('\n', start);
            const std::string line = text.substr(start, end - start);
            const auto eq = line.find(" = ");
            apply_setting(spec, line.substr(0, eq), line.substr(eq + 3));
            start = end + 1;
        }
        spec.output_path = from_file.output_path;
        spec.output_format = from_file.output_format;
        spec.threads = from_file.threads;
    }
    if (command != "figure") spec.mode = mode_from_string(command);
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(s, "--set expects key=value");
        apply_setting(spec, s.substr(0, eq), s.substr(eq + 1));
    }
    if (!o.seed.empty()) apply_setting(spec, "sim.seed", o.seed);
    if (!o.out.empty()) spec.output_path = o.out;
    if (!o.format.empty()) spec.output_format = format_from_string(o.format);
    if (o.threads > 0) spec.threads = o.threads;
    spec.validate();
    return spec;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIR meta distribution of Poisson cellular networks with queued traffic"};
    app.require_subcommand(1);
    Options o;
    std::vector<std::pair<std::string, CLI::App*>> commands;
    for (const char* name : {"analyze", "simulate", "compare"}) {
        CLI::App* cmd = app.add_subcommand(name, std::string("run the sweep in ") + name + " mode");
        add_common(cmd, o);
        commands.emplace_back(name, cmd);
    }
    CLI::App* fig = app.add_subcommand("figure", "run a figure recipe (fig3 ... fig9)");
    fig->add_option("name", o.figure, "figure name")->required();
    add_common(fig, o);
    commands.emplace_back("figure", fig);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    std::string command;
    for (const auto& [name, cmd] : commands) {
        if (cmd->parsed()) command = name;
    }

    ExperimentSpec spec;
    try {
        spec = resolve(command, o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    }

    try {
        auto progress = [&](const SweepPoint& p, const std::string& status) {
            if (o.quiet) return;
            std::cerr << "[" << spec.name << "] theta_db=" << format_double(p.theta_db)
                      << " xi=" << format_double(p.xi) << " alpha=" << format_double(p.alpha) << ": " << status
                      << '\n';
        };
        const ExperimentResult r = run_experiment(spec, progress);
        write_result(spec, r);
        if (!o.quiet) {
            for (const auto& pr : r.reports) {
                std::cerr << "report theta_db=" << format_double(pr.point.theta_db)
                          << " xi=" << format_double(pr.point.xi) << " alpha=" << format_double(pr.point.alpha)
                          << " ks=" << format_double(pr.report.ks_distance)
                          << " mae=" << format_double(pr.report.mean_abs_err) << '\n';
            }
        }
        if (r.partial()) {
            std::cerr << r.failures.size() << " of " << spec.points().size() << " sweep points failed\n";
            return 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#include "sirmeta/harness/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace sirmeta::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0;
    const char* first = t.data();
    if (!t.empty() && t[0] == '+') ++first;
    const auto r = std::from_chars(first, t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
        throw ConfigError(key, "not a number: '" + t + "'");
    }
    return v;
}

long long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    long long v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
        throw ConfigError(key, "not an integer: '" + t + "'");
    }
    return v;
}

int parse_int32(const std::string& key, const std::string& text) {
    const long long v = parse_int(key, text);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
        throw ConfigError(key, "out of range");
    }
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
        throw ConfigError(key, "not an unsigned 64-bit integer: '" + t + "'");
    }
    return v;
}

// "a, b, c" or "start:stop:step" (stop included up to rounding).
std::vector<double> parse_list(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::vector<double> out;
    if (t.empty()) return out;
    if (t.find(':') != std::string::npos && t.find(',') == std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(t);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(parse_double(key, item));
        if (parts.size() != 3) throw ConfigError(key, "range must be start:stop:step");
        const double start = parts[0], stop = parts[1], step = parts[2];
        if (!(step > 0) || !(stop >= start)) throw ConfigError(key, "range needs step > 0 and stop >= start");
        const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
        if (n > 100000) throw ConfigError(key, "range too long");
        for (long long i = 0; i <= n; ++i) {
            // Round away the drift of start + i * step so 0.1-steps print as 0.1.
            const double v = start + static_cast<double>(i) * step;
            out.push_back(std::round(v * 1e12) / 1e12);
        }
        return out;
    }
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

const std::vector<double>* axis(const ExperimentSpec& spec, const std::string& name) {
    for (const auto& a : spec.sweep) {
        if (a.name == name) return &a.values;
    }
    return nullptr;
}

void set_axis(ExperimentSpec& spec, const std::string& name, std::vector<double> values) {
    static const std::vector<std::string> order{"theta_db", "xi", "alpha"};
    auto it = std::find_if(spec.sweep.begin(), spec.sweep.end(), [&](const SweepAxis& a) { return a.name == name; });
    if (it != spec.sweep.end()) spec.sweep.erase(it);
    if (values.empty()) return;
    const auto rank = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
    auto pos = std::find_if(spec.sweep.begin(), spec.sweep.end(),
                            [&](const SweepAxis& a) { return rank(a.name) > rank(name); });
    spec.sweep.insert(pos, SweepAxis{name, std::move(values)});
}

struct Field {
    const char* key;
    std::function<std::string(const ExperimentSpec&)> get;
    std::function<void(ExperimentSpec&, const std::string&)> set;
};

#define SIRMETA_DOUBLE(key, member)                                                         \
    Field{key, [](const ExperimentSpec& s) { return format_double(s.member); },            \
          [](ExperimentSpec& s, const std::string& v) { s.member = parse_double(key, v); }}
#define SIRMETA_INT(key, member)                                                            \
    Field{key, [](const ExperimentSpec& s) { return std::to_string(s.member); },           \
          [](ExperimentSpec& s, const std::string& v) { s.member = parse_int32(key, v); }}
#define SIRMETA_AXIS(name)                                                                  \
    Field{"sweep." name,                                                                    \
          [](const ExperimentSpec& s) {                                                     \
              const auto* v = axis(s, name);                                                \
              return v ? join(*v) : std::string();                                          \
          },                                                                                \
          [](ExperimentSpec& s, const std::string& v) { set_axis(s, name, parse_list("sweep." name, v)); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table{
        Field{"name", [](const ExperimentSpec& s) { return s.name; },
              [](ExperimentSpec& s, const std::string& v) { s.name = trim(v); }},
        Field{"mode", [](const ExperimentSpec& s) { return std::string(to_string(s.mode)); },
              [](ExperimentSpec& s, const std::string& v) { s.mode = mode_from_string(trim(v)); }},
        Field{"metric", [](const ExperimentSpec& s) { return std::string(to_string(s.metric)); },
              [](ExperimentSpec& s, const std::string& v) { s.metric = metric_from_string(trim(v)); }},
        SIRMETA_DOUBLE("theta_db", theta_db),
        SIRMETA_DOUBLE("xi", xi),
        SIRMETA_DOUBLE("alpha", alpha),
        SIRMETA_AXIS("theta_db"),
        SIRMETA_AXIS("xi"),
        SIRMETA_AXIS("alpha"),
        SIRMETA_INT("analysis.k_max", analysis.k_max),
        SIRMETA_DOUBLE("analysis.omega_max", analysis.omega_max),
        SIRMETA_DOUBLE("analysis.omega_min", analysis.omega_min),
        SIRMETA_INT("analysis.grid_size", analysis.grid_size),
        SIRMETA_DOUBLE("analysis.fp_tol", analysis.fp_tol),
        SIRMETA_INT("analysis.fp_max_iter", analysis.fp_max_iter),
        SIRMETA_DOUBLE("analysis.omega_panel_width", analysis.omega_panel_width),
        SIRMETA_INT("analysis.omega_panel_points", analysis.omega_panel_points),
        SIRMETA_DOUBLE("sim.lambda_b", sim.lambda_b),
        SIRMETA_DOUBLE("sim.lambda_u", sim.lambda_u),
        SIRMETA_DOUBLE("sim.region_side", sim.region_side),
        SIRMETA_INT("sim.warmup_slots", sim.warmup_slots),
        SIRMETA_INT("sim.measure_slots", sim.measure_slots),
        SIRMETA_INT("sim.realizations", sim.realizations),
        Field{"sim.seed", [](const ExperimentSpec& s) { return std::to_string(s.sim.seed); },
              [](ExperimentSpec& s, const std::string& v) { s.sim.seed = parse_u64("sim.seed", v); }},
        Field{"sim.fading",
              [](const ExperimentSpec& s) {
                  return std::string(s.sim.fading == sim::FadingModel::marginal ? "marginal" : "explicit");
              },
              [](ExperimentSpec& s, const std::string& v) {
                  const std::string t = trim(v);
                  if (t == "marginal") s.sim.fading = sim::FadingModel::marginal;
                  else if (t == "explicit") s.sim.fading = sim::FadingModel::explicit_draws;
                  else throw ConfigError("sim.fading", "expected marginal or explicit, got '" + t + "'");
              }},
        SIRMETA_DOUBLE("sim.min_expected_bs", sim.min_expected_bs),
        SIRMETA_INT("sim.target_attempts", sim_target_attempts),
        SIRMETA_INT("min_attempts", min_attempts),
        Field{"stability.epsilons", [](const ExperimentSpec& s) { return join(s.epsilons); },
              [](ExperimentSpec& s, const std::string& v) { s.epsilons = parse_list("stability.epsilons", v); }},
        Field{"delay.t_points", [](const ExperimentSpec& s) { return join(s.t_points); },
              [](ExperimentSpec& s, const std::string& v) { s.t_points = parse_list("delay.t_points", v); }},
        SIRMETA_DOUBLE("edge_u", edge_u),
        Field{"note", [](const ExperimentSpec& s) { return s.note; },
              [](ExperimentSpec& s, const std::string& v) { s.note = trim(v); }},
    };
    return table;
}

#undef SIRMETA_DOUBLE
#undef SIRMETA_INT
#undef SIRMETA_AXIS

ConfigError prefixed(const std::string& prefix, const ConfigError& e) {
    const std::string what = e.what();
    return ConfigError(prefix + e.field(), what.substr(std::min(what.size(), e.field().size() + 2)));
}

} // namespace

const char* to_string(Mode m) {
    switch (m) {
    case Mode::analyze: return "analyze";
    case Mode::simulate: return "simulate";
    case Mode::compare: return "compare";
    }
    return "?";
}

const char* to_string(Metric m) {
    switch (m) {
    case Metric::meta_cdf: return "meta_cdf";
    case Metric::active_prob: return "active_prob";
    case Metric::beta: return "beta";
    case Metric::stability: return "stability";
    case Metric::coverage: return "coverage";
    case Metric::edge_coverage: return "edge_coverage";
    case Metric::delay: return "delay";
    }
    return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

Mode mode_from_string(const std::string& s) {
    for (Mode m : {Mode::analyze, Mode::simulate, Mode::compare}) {
        if (s == to_string(m)) return m;
    }
    throw ConfigError("mode", "expected analyze, simulate or compare, got '" + s + "'");
}

Metric metric_from_string(const std::string& s) {
    for (Metric m : {Metric::meta_cdf, Metric::active_prob, Metric::beta, Metric::stability, Metric::coverage,
                     Metric::edge_coverage, Metric::delay}) {
        if (s == to_string(m)) return m;
    }
    throw ConfigError("metric", "unknown metric '" + s + "'");
}

OutputFormat format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("output.format", "expected csv or json, got '" + s + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void apply_setting(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    const std::string k = trim(key);
    if (k == "output.path") {
        spec.output_path = trim(value);
        return;
    }
    if (k == "output.format") {
        spec.output_format = format_from_string(trim(value));
        return;
    }
    if (k == "threads") {
        spec.threads = parse_int32(k, value);
        return;
    }
    for (const auto& f : fields()) {
        if (k == f.key) {
            f.set(spec, value);
            return;
        }
    }
    throw ConfigError(k, "unknown key");
}

ExperimentSpec parse_config(const std::string& text) {
    ExperimentSpec spec;
    const auto start = text.find_first_not_of(" \t\r\n");
    if (start != std::string::npos && text[start] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config", std::string("invalid JSON: ") + e.what());
        }
        if (!j.contains("config") || !j["config"].is_object()) throw ConfigError("config", "JSON has no config object");
        for (const auto& [k, v] : j["config"].items()) {
            if (!v.is_string()) throw ConfigError(k, "embedded values must be strings");
            apply_setting(spec, k, v.get<std::string>());
        }
        return spec;
    }
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string body = trim(line);
        if (body.rfind("#@ ", 0) == 0) {
            body = trim(body.substr(3));
        } else if (body.empty() || body[0] == '#') {
            continue;
        } else if (body.find('=') == std::string::npos && body.find(',') != std::string::npos) {
            // Data rows of an emitted CSV file.
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno), "expected key = value, got '" + body + "'");
        }
        apply_setting(spec, body.substr(0, eq), body.substr(eq + 1));
    }
    return spec;
}

ExperimentSpec parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string resolved_config(const ExperimentSpec& spec) {
    std::string out;
    for (const auto& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(spec);
        out += '\n';
    }
    return out;
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : resolved_config(spec)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

void ExperimentSpec::validate() const {
    if (name.empty()) throw ConfigError("name", "must not be empty");
    if (!std::isfinite(theta_db)) throw ConfigError("theta_db", "must be finite");
    for (const auto& a : sweep) {
        if (a.name != "theta_db" && a.name != "xi" && a.name != "alpha") {
            throw ConfigError("sweep." + a.name, "only theta_db, xi and alpha can be swept");
        }
        for (double v : a.values) {
            if (!std::isfinite(v)) throw ConfigError("sweep." + a.name, "values must be finite");
        }
    }
    if ((metric == Metric::beta || metric == Metric::stability) && mode != Mode::analyze) {
        throw ConfigError("metric", std::string(to_string(metric)) + " is analysis-only");
    }
    if (min_attempts < 1) throw ConfigError("min_attempts", "must be >= 1");
    if (!(edge_u > 0 && edge_u <= 1)) throw ConfigError("edge_u", "must lie in (0, 1]");
    for (double e : epsilons) {
        if (!(e > 0 && e < 1)) throw ConfigError("stability.epsilons", "values must lie in (0, 1)");
    }
    if (metric == Metric::stability && epsilons.empty()) throw ConfigError("stability.epsilons", "must not be empty");
    for (double t : t_points) {
        if (!(t >= 1)) throw ConfigError("delay.t_points", "values must be >= 1");
    }
    if (threads < 1) throw ConfigError("threads", "must be >= 1");
    if (sim_target_attempts < 0) throw ConfigError("sim.target_attempts", "must be >= 0");
    for (const SweepPoint& p : points()) {
        try {
            analysis_at(p).validate();
        } catch (const ConfigError& e) {
            throw prefixed(e.field() == "theta" || e.field() == "xi" || e.field() == "alpha" ? "" : "analysis.", e);
        }
        if (mode != Mode::analyze) {
            try {
                sim_at(p).validate();
            } catch (const ConfigError& e) {
                throw prefixed(e.field() == "theta" || e.field() == "xi" || e.field() == "alpha" ? "" : "sim.", e);
            }
        }
    }
}

std::vector<SweepPoint> ExperimentSpec::points() const {
    std::vector<SweepPoint> out{SweepPoint{theta_db, xi, alpha}};
    for (const auto& a : sweep) {
        std::vector<SweepPoint> next;
        for (const auto& p : out) {
            for (double v : a.values) {
                SweepPoint q = p;
                if (a.name == "theta_db") q.theta_db = v;
                else if (a.name == "xi") q.xi = v;
                else if (a.name == "alpha") q.alpha = v;
                next.push_back(q);
            }
        }
        out = std::move(next);
    }
    return out;
}

AnalysisConfig ExperimentSpec::analysis_at(const SweepPoint& p) const {
    AnalysisConfig c = analysis;
    c.theta = db_to_linear(p.theta_db);
    c.xi = p.xi;
    c.alpha = p.alpha;
    return c;
}

sim::SimConfig ExperimentSpec::sim_at(const SweepPoint& p) const {
    sim::SimConfig c = sim;
    c.theta = db_to_linear(p.theta_db);
    c.xi = p.xi;
    c.alpha = p.alpha;
    if (sim_target_attempts > 0 && p.xi > 0) {
        const double want = std::ceil(sim_target_attempts / p.xi);
        if (want > c.measure_slots) c.measure_slots = static_cast<int>(std::min(want, 1e9));
    }
    return c;
}

std::vector<double> ExperimentSpec::delay_points() const {
    if (!t_points.empty()) return t_points;
    std::vector<double> t;
    for (int i = 0; i <= 40; ++i) t.push_back(std::pow(10.0, 3.0 * i / 40.0));
    t.front() = 1.0;
    t.back() = 1000.0;
    t.push_back(std::numeric_limits<double>::infinity());
    return t;
}

} // namespace sirmeta::harness

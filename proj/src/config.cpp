#include "mvdiv/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>

#include "mvdiv/error.hpp"

namespace mvdiv {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::Config, msg); }

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) config_error("config key '" + key + "': not a number: '" + text + "'");
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        config_error("config key '" + key + "': not a non-negative integer: '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    config_error("config key '" + key + "': expected true or false, got '" + text + "'");
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string fmt(std::uint64_t v) { return std::to_string(v); }

std::string fmt_bool(bool v) { return v ? "true" : "false"; }

struct KeySpec {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;  // empty string: unset
};

template <class T>
KeySpec number(const char* name, T RunConfig::*field) {
    return {name,
            [name, field](RunConfig& c, const std::string& v) {
                if constexpr (std::is_same_v<T, double>) {
                    c.*field = parse_double(name, v);
                } else {
                    const auto u = parse_unsigned(name, v);
                    if (u > std::numeric_limits<T>::max()) config_error(std::string("config key '") + name + "': out of range");
                    c.*field = static_cast<T>(u);
                }
            },
            [field](const RunConfig& c) {
                if constexpr (std::is_same_v<T, double>) {
                    return fmt(c.*field);
                } else {
                    return fmt(static_cast<std::uint64_t>(c.*field));
                }
            }};
}

KeySpec optional_number(const char* name, std::optional<double> RunConfig::*field) {
    return {name, [name, field](RunConfig& c, const std::string& v) { c.*field = parse_double(name, v); },
            [field](const RunConfig& c) { return (c.*field) ? fmt(*(c.*field)) : std::string(); }};
}

KeySpec choice(const char* name, std::string RunConfig::*field, std::vector<std::string> allowed) {
    return {name,
            [name, field, allowed](RunConfig& c, const std::string& v) {
                for (const auto& a : allowed)
                    if (v == a) {
                        c.*field = v;
                        return;
                    }
                std::string list;
                for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
                config_error(std::string("config key '") + name + "': expected one of " + list + ", got '" + v + "'");
            },
            [field](const RunConfig& c) { return c.*field; }};
}

const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = [] {
        std::vector<KeySpec> s;
        s.push_back(number("a", &RunConfig::a));
        s.push_back(number("b", &RunConfig::b));
        s.push_back(number("rho", &RunConfig::rho));
        s.push_back(number("gamma", &RunConfig::gamma));
        s.push_back(number("tol", &RunConfig::tol));
        s.push_back(optional_number("x_max", &RunConfig::x_max));
        s.push_back(number("n_scan", &RunConfig::n_scan));
        s.push_back(number("n_grid", &RunConfig::n_grid));
        s.push_back(number("tol_res", &RunConfig::tol_res));
        s.push_back(number("tol_ineq", &RunConfig::tol_ineq));
        s.push_back(number("verify_grid", &RunConfig::verify_grid));
        s.push_back(optional_number("verify_x_max", &RunConfig::verify_x_max));
        s.push_back(number("dt", &RunConfig::dt));
        s.push_back(number("n_paths", &RunConfig::n_paths));
        s.push_back(optional_number("t_max", &RunConfig::t_max));
        s.push_back(number("seed", &RunConfig::seed));
        s.push_back(optional_number("x0", &RunConfig::x0));
        s.push_back({"ruin",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "grid") c.ruin = RuinMonitoring::Grid;
                         else if (v == "bridge") c.ruin = RuinMonitoring::BrownianBridge;
                         else config_error("config key 'ruin': expected grid or bridge, got '" + v + "'");
                     },
                     [](const RunConfig& c) {
                         return std::string(c.ruin == RuinMonitoring::Grid ? "grid" : "bridge");
                     }});
        s.push_back(number("tail_tolerance", &RunConfig::tail_tolerance));
        s.push_back(choice("mode", &RunConfig::mode, {"moments", "frontier"}));
        s.push_back(number("frontier_points", &RunConfig::frontier_points));
        s.push_back(number("frontier_lo", &RunConfig::frontier_lo));
        s.push_back(number("frontier_hi", &RunConfig::frontier_hi));
        s.push_back({"vary",
                     [](RunConfig& c, const std::string& v) {
                         auto p = parse_sweep_parameter(v);
                         if (!p) config_error("config key 'vary': expected gamma, rho, a or b, got '" + v + "'");
                         c.vary = *p;
                     },
                     [](const RunConfig& c) { return c.vary ? std::string(to_string(*c.vary)) : std::string(); }});
        s.push_back(optional_number("grid_min", &RunConfig::grid_min));
        s.push_back(optional_number("grid_max", &RunConfig::grid_max));
        s.push_back(number("grid_n", &RunConfig::grid_n));
        s.push_back(choice("table", &RunConfig::table, {"barrier", "value-curve", "f-curve"}));
        s.push_back({"gamma_bar", [](RunConfig& c, const std::string& v) { c.gamma_bar = parse_bool("gamma_bar", v); },
                     [](const RunConfig& c) { return fmt_bool(c.gamma_bar); }});
        s.push_back(number("gamma_bar_tol", &RunConfig::gamma_bar_tol));
        s.push_back(optional_number("curve_x_max", &RunConfig::curve_x_max));
        s.push_back(number("curve_points", &RunConfig::curve_points));
        s.push_back(number("threads", &RunConfig::threads));
        s.push_back({"format",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "csv") c.format = OutputFormat::Csv;
                         else if (v == "json") c.format = OutputFormat::Json;
                         else config_error("config key 'format': expected csv or json, got '" + v + "'");
                     },
                     [](const RunConfig& c) { return std::string(c.format == OutputFormat::Csv ? "csv" : "json"); }});
        s.push_back({"output", [](RunConfig& c, const std::string& v) { c.output = v; },
                     [](const RunConfig& c) { return c.output.value_or(""); }});
        s.push_back({"timestamp", [](RunConfig& c, const std::string& v) { c.timestamp = parse_bool("timestamp", v); },
                     [](const RunConfig& c) { return fmt_bool(c.timestamp); }});
        return s;
    }();
    return specs;
}

}  // namespace

ModelParams RunConfig::model() const {
    try {
        return ModelParams(a, b, rho, gamma);
    } catch (const Error& e) {
        config_error(e.what());
    }
}

ScanOptions RunConfig::scan() const {
    ScanOptions s;
    s.tol = tol;
    s.x_max = x_max;
    s.n_scan = n_scan;
    return s;
}

SolveOptions RunConfig::solve() const {
    SolveOptions s;
    s.scan = scan();
    s.concavity_grid = n_grid;
    return s;
}

VerifyOptions RunConfig::verify() const {
    VerifyOptions v;
    v.n_grid = verify_grid;
    v.x_max = verify_x_max;
    v.tol_res = tol_res;
    v.tol_ineq = tol_ineq;
    return v;
}

SimConfig RunConfig::sim(double default_x0) const {
    SimConfig s;
    s.dt = dt;
    s.n_paths = n_paths;
    s.t_max = t_max;
    s.seed = seed;
    s.x0 = x0.value_or(default_x0);
    s.threads = threads;
    s.ruin = ruin;
    s.tail_tolerance = tail_tolerance;
    return s;
}

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& s : key_specs()) k.push_back(s.name);
        return k;
    }();
    return keys;
}

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            config_error("config line " + std::to_string(line_no) + ": expected 'key = value'");
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) config_error("config line " + std::to_string(line_no) + ": missing key");
        if (out.contains(key)) config_error("config key '" + key + "' given twice");
        out.emplace(std::move(key), std::move(value));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_key_values(ss.str());
}

RunConfig make_run_config(const std::map<std::string, std::string>& values) {
    RunConfig cfg;
    for (const auto& [key, value] : values) {
        const KeySpec* spec = nullptr;
        for (const auto& s : key_specs())
            if (s.name == key) spec = &s;
        if (!spec) config_error("unknown config key '" + key + "'");
        spec->set(cfg, value);
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : key_specs()) {
        if (s.name == "output") continue;
        std::string v = s.get(cfg);
        if (!v.empty()) out.emplace_back(s.name, std::move(v));
    }
    return out;
}

}  // namespace mvdiv

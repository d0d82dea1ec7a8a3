#include "mvdiv/table.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace mvdiv {

Cell cell(std::optional<double> v) {
    if (!v) return Missing{};
    return *v;
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw std::logic_error("table row width does not match the header");
    }
    rows.push_back(std::move(row));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

namespace {

std::string csv_field(const Cell& c) {
    struct Visitor {
        std::string operator()(Missing) const { return {}; }
        std::string operator()(double v) const { return format_number(v); }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& s) const {
            if (s.find_first_of(",\"\n") == std::string::npos) return s;
            std::string quoted = "\"";
            for (char ch : s) {
                if (ch == '"') quoted += '"';
                quoted += ch;
            }
            return quoted + "\"";
        }
    };
    return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_value(const Cell& c) {
    struct Visitor {
        nlohmann::ordered_json operator()(Missing) const { return nullptr; }
        nlohmann::ordered_json operator()(double v) const {
            if (!std::isfinite(v)) return nullptr;
            return std::stod(format_number(v));
        }
        nlohmann::ordered_json operator()(std::int64_t v) const { return v; }
        nlohmann::ordered_json operator()(bool v) const { return v; }
        nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

void write_csv(std::ostream& out, const Table& table, const std::string& timestamp) {
    for (const auto& [key, value] : table.metadata) out << "# " << key << " = " << value << '\n';
    if (!timestamp.empty()) out << "# generated = " << timestamp << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        out << (i ? "," : "") << table.columns[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(row[i]);
        out << '\n';
    }
}

nlohmann::ordered_json to_json(const Table& table) {
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    for (const auto& [key, value] : table.metadata) meta[key] = value;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = json_value(row[i]);
        rows.push_back(std::move(obj));
    }
    return nlohmann::ordered_json{{"metadata", meta}, {"columns", table.columns}, {"rows", rows}};
}

Table verification_table(const VerificationReport& report) {
    Table t;
    t.columns = {"condition", "region", "worst_residual", "worst_location", "tolerance", "pass"};
    for (const auto& c : report.conditions) {
        t.add_row({c.name, c.region, c.worst_residual, c.worst_location, c.tolerance, c.pass});
    }
    return t;
}

Table estimate_table(const SimEstimate& est, std::optional<double> g_exact, std::optional<double> h_exact) {
    auto z = [](double hat, std::optional<double> exact, double se) -> Cell {
        if (!exact || !(se > 0.0)) return Missing{};
        return (hat - *exact) / se;
    };
    Table t;
    t.columns = {"g_hat", "se_g", "g_exact", "z_g", "h_hat", "se_h", "h_exact", "z_h",
                 "v_hat", "n_paths", "truncated_fraction", "ruined_fraction"};
    t.add_row({est.g_hat, est.se_g, cell(g_exact), z(est.g_hat, g_exact, est.se_g), est.h_hat, est.se_h,
               cell(h_exact), z(est.h_hat, h_exact, est.se_h), est.v_hat,
               static_cast<std::int64_t>(est.n_paths), est.truncated_fraction, est.ruined_fraction});
    return t;
}

Table frontier_table(const std::vector<FrontierRow>& rows) {
    Table t;
    t.columns = {"barrier", "g_hat", "var_hat", "j_hat", "se_g"};
    for (const auto& r : rows) t.add_row({r.barrier, r.g_hat, r.var_hat, r.j_hat, r.se_g});
    return t;
}

Table sweep_table(SweepParameter varied, const std::vector<SweepRow>& rows) {
    Table t;
    t.columns = {std::string(to_string(varied)), "status", "x_tilde", "concave", "c1", "c3", "gamma_bar"};
    for (const auto& r : rows) {
        t.add_row({r.value, std::string(to_string(r.status)), cell(r.x_tilde),
                   r.concave ? Cell(*r.concave) : Cell(Missing{}), cell(r.c1), cell(r.c3), cell(r.gamma_bar)});
    }
    return t;
}

Table value_curve_table(const std::vector<ValuePoint>& points) {
    Table t;
    t.columns = {"x", "V", "V_prime", "V_second", "G", "H"};
    for (const auto& p : points) t.add_row({p.x, p.v, p.v_slope, p.v_curvature, p.g, p.h});
    return t;
}

Table f_curve_table(const std::vector<BarrierFunctionPoint>& points) {
    Table t;
    t.columns = {"x", "f"};
    for (const auto& p : points) t.add_row({p.x, p.f});
    return t;
}

}  // namespace mvdiv

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "mvdiv/simulate.hpp"
#include "mvdiv/sweep.hpp"
#include "mvdiv/value.hpp"

namespace mvdiv {

/// Empty cell (CSV: empty field, JSON: null).
struct Missing {
    friend bool operator==(Missing, Missing) = default;
};

using Cell = std::variant<Missing, double, std::int64_t, bool, std::string>;

Cell cell(std::optional<double> v);

/// Column-oriented result table with provenance metadata.
struct Table {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// Ten significant digits, '.' decimal separator, "nan"/"inf" for non-finite values.
std::string format_number(double v);

/// '#'-prefixed `key = value` metadata lines, a header row, then comma-separated rows.
/// A non-empty `timestamp` adds a `# generated = ...` line.
void write_csv(std::ostream& out, const Table& table, const std::string& timestamp = {});

/// {"metadata": {...}, "columns": [...], "rows": [{column: value, ...}, ...]}
/// Numbers are rounded to ten significant digits so output is stable across reruns.
nlohmann::ordered_json to_json(const Table& table);

Table verification_table(const VerificationReport& report);
Table estimate_table(const SimEstimate& est, std::optional<double> g_exact, std::optional<double> h_exact);
Table frontier_table(const std::vector<FrontierRow>& rows);
Table sweep_table(SweepParameter varied, const std::vector<SweepRow>& rows);
Table value_curve_table(const std::vector<ValuePoint>& points);
Table f_curve_table(const std::vector<BarrierFunctionPoint>& points);

}  // namespace mvdiv

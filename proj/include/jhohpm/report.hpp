#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jhohpm/fit.hpp"
#include "jhohpm/model.hpp"
#include "jhohpm/oracle.hpp"
#include "jhohpm/paper_data.hpp"

namespace jhohpm {

struct ComparisonRow {
    double eta;
    double numeric;
    double ohpm;
    std::optional<double> paper_numeric;
    std::optional<double> paper_ohpm;
    std::optional<double> paper_hpm;

    double abs_error() const { return std::fabs(numeric - ohpm); }
};

enum class OutputFormat { Csv, Json };

struct RunCaseOptions {
    bool paper_params = false;  // plug-in mode instead of fitting
    bool thermal = true;
    double h = 1e-4;
    FitOptions fit;
    OutputFormat format = OutputFormat::Csv;
};

struct RunCaseResult {
    CaseDefinition definition;
    OracleSolution velocity_oracle;
    OracleSolution thermal_oracle;
    LaurentPoly F;
    LaurentPoly theta;
    std::string velocity_source;  // "fit", "paper-parameters" or "paper-polynomial"
    std::string thermal_source;
    std::optional<FitResult> velocity_fit;
    std::optional<FitResult> thermal_fit;
    std::vector<ComparisonRow> velocity_rows;  // eta = 0, 0.1, ..., 1
    std::vector<ComparisonRow> thermal_rows;
    double max_velocity_error = 0.0;
    double max_thermal_error = 0.0;
};

// Oracle, then fit (or plug-in of the printed parameters), then comparison against the bundled tables.
RunCaseResult run_case(const CaseDefinition& c, const RunCaseOptions& opt);
// Writes fit records, solution JSON, comparison and plot-data files into `dir`.
void write_case_outputs(const RunCaseResult& r, const RunCaseOptions& opt, const std::filesystem::path& dir);

nlohmann::json fit_record_json(const std::string& case_id, Problem problem, const FitResult& fit,
                               double max_grid_error_vs_oracle);
nlohmann::json solution_json(const RunCaseResult& r);

void write_comparison_csv(std::ostream& os, const std::vector<ComparisonRow>& rows);
nlohmann::json comparison_json(const std::vector<ComparisonRow>& rows);

// eta, approximate, numeric at 101 uniform points.
void write_plot_csv(std::ostream& os, const char* quantity, const LaurentPoly& approx, const OracleSolution& numeric);

struct TableReproduction {
    int number = 0;
    std::string case_id;
    TableQuantity quantity = TableQuantity::Velocity;
    std::vector<double> eta;
    std::vector<double> oracle;        // regenerated numeric column
    std::vector<double> polynomial;    // bundled OHPM polynomial
    std::vector<double> paper_numeric;
    std::vector<double> paper_ohpm;
    std::vector<double> paper_error;
    std::vector<std::optional<double>> paper_hpm;
    double max_dev_numeric = 0.0;
    double max_dev_ohpm = 0.0;
    bool numeric_flagged = false;  // some cell differs from the converged oracle by more than 1e-7
};

TableReproduction reproduce_table(int number, double h);
// Tables in [first, last]; first > last is an empty range. Writes per-table CSVs, summary.csv
// and findings.md into `dir`.
std::vector<TableReproduction> reproduce_tables(int first, int last, double h, const std::filesystem::path& dir);

// The documented discrepancies between the printed equations and the published results.
std::string findings_markdown(double h);

struct SweepPoint {
    double alpha;
    double H;
};

struct SweepOptions {
    double Re = 50.0, Pr = 1.0, beta = 3.492161428e-13;
    RunCaseOptions run;
    unsigned threads = 0;  // 0 = hardware concurrency
};

// One row per case per eta in {0, 0.1, ..., 1}, ordered by (alpha, H, eta). Per-case errors become
// rows with a status field; the run continues. With `case_dir`, each case also writes its own files there.
void sweep(const std::vector<SweepPoint>& grid, const SweepOptions& opt, std::ostream& aggregated_csv,
           const std::optional<std::filesystem::path>& case_dir = std::nullopt);

// CSV cells: 12 significant digits; deviations: scientific with 12 significant digits.
// JSON numbers are written by the json library in shortest round-trip form (<= 17 digits).
std::string csv_number(double v);
std::string sci_number(double v);

}  // namespace jhohpm

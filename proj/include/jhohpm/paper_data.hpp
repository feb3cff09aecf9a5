#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jhohpm/model.hpp"

namespace jhohpm {

enum class TableQuantity { Velocity, Temperature };

struct TableRow {
    double eta;
    double numeric;
    double ohpm;
    double printed_error;  // the paper's |numeric - OHPM| column
    std::optional<double> hpm;
};

struct PaperTable {
    int number;
    std::string case_id;
    TableQuantity quantity;
    std::vector<TableRow> rows;  // eta = 0, 0.1, ..., 1
};

struct CommonParams {
    double Re, Pr, beta;
};

CommonParams paper_common_params();
const std::vector<CaseDefinition>& bundled_cases();
// Throws MissingCase.
const CaseDefinition& bundled_case(const std::string& id);
const std::vector<PaperTable>& bundled_tables();
// Throws MissingTableData.
const PaperTable& bundled_table(int number);

// Thermal solution as printed: sum_k c_k (eta^k - 1) * scale, as (k, c_k) pairs.
struct ShiftedThetaPoly {
    double scale;
    std::vector<std::pair<int, double>> terms;
    LaurentPoly to_poly() const;
};
const ShiftedThetaPoly& bundled_theta_shifted(const std::string& case_id);

// The raw embedded JSON document.
const nlohmann::json& paper_data_json();

}  // namespace jhohpm

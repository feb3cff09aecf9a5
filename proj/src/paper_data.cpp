#include "jhohpm/paper_data.hpp"

#include <map>
#include <numbers>
#include <string_view>

#include "jhohpm/errors.hpp"

namespace jhohpm {

namespace detail {
extern const std::string_view kPaperDataJson;
}

const nlohmann::json& paper_data_json() {
    static const nlohmann::json doc = nlohmann::json::parse(detail::kPaperDataJson);
    return doc;
}

CommonParams paper_common_params() {
    const auto& c = paper_data_json().at("common");
    return {c.at("Re").get<double>(), c.at("Pr").get<double>(), c.at("beta").get<double>()};
}

LaurentPoly ShiftedThetaPoly::to_poly() const {
    std::vector<LaurentPoly::Term> t;
    double constant = 0.0;
    for (auto [k, c] : terms) {
        t.push_back({k, c * scale});
        constant -= c * scale;
    }
    t.push_back({0, constant});
    return LaurentPoly(std::move(t));
}

namespace {

struct Bundle {
    std::vector<CaseDefinition> cases;
    std::map<std::string, ShiftedThetaPoly> theta;
    std::vector<PaperTable> tables;
};

ParamMap to_params(const nlohmann::json& j) {
    ParamMap m;
    for (const auto& [k, v] : j.items()) m[k] = v.get<double>();
    return m;
}

const Bundle& bundle() {
    static const Bundle b = [] {
        Bundle out;
        const auto& doc = paper_data_json();
        const CommonParams common = paper_common_params();
        for (const auto& jc : doc.at("cases")) {
            CaseDefinition c;
            c.id = jc.at("id").get<std::string>();
            c.params.alpha = std::numbers::pi / jc.at("alphaDenominator").get<double>();
            c.params.Re = common.Re;
            c.params.H = jc.at("H").get<double>();
            c.params.Pr = common.Pr;
            c.params.beta = common.beta;
            c.velocity_table = jc.at("velocityTable").get<int>();
            c.thermal_table = jc.at("thermalTable").get<int>();
            c.paper_solution_f = LaurentPoly::from_pairs(jc.at("paperSolutionF"));
            ShiftedThetaPoly st;
            st.scale = jc.at("paperSolutionThetaShifted").at("scale").get<double>();
            for (const auto& t : jc.at("paperSolutionThetaShifted").at("terms"))
                st.terms.emplace_back(t[0].get<int>(), t[1].get<double>());
            c.paper_solution_theta = st.to_poly();
            if (jc.contains("paperParametersVelocity")) c.paper_params_velocity = to_params(jc.at("paperParametersVelocity"));
            if (jc.contains("paperParametersThermal")) c.paper_params_thermal = to_params(jc.at("paperParametersThermal"));
            out.theta[c.id] = std::move(st);
            out.cases.push_back(std::move(c));
        }
        for (const auto& jt : doc.at("tables")) {
            PaperTable t;
            t.number = jt.at("number").get<int>();
            t.case_id = jt.at("case").get<std::string>();
            t.quantity = jt.at("quantity").get<std::string>() == "F" ? TableQuantity::Velocity : TableQuantity::Temperature;
            for (const auto& r : jt.at("rows")) {
                TableRow row{r.at("eta").get<double>(), r.at("numeric").get<double>(), r.at("ohpm").get<double>(),
                             r.at("error").get<double>(), std::nullopt};
                if (r.contains("hpm")) row.hpm = r.at("hpm").get<double>();
                t.rows.push_back(row);
            }
            out.tables.push_back(std::move(t));
        }
        return out;
    }();
    return b;
}

}  // namespace

const std::vector<CaseDefinition>& bundled_cases() { return bundle().cases; }

const CaseDefinition& bundled_case(const std::string& id) {
    for (const auto& c : bundle().cases)
        if (c.id == id) return c;
    throw Error(ErrorCode::MissingCase, "no bundled case '" + id + "' (expected 5.1 .. 5.8)");
}

const std::vector<PaperTable>& bundled_tables() { return bundle().tables; }

const PaperTable& bundled_table(int number) {
    for (const auto& t : bundle().tables)
        if (t.number == number) return t;
    throw Error(ErrorCode::MissingTableData, "no bundled data for table " + std::to_string(number));
}

const ShiftedThetaPoly& bundled_theta_shifted(const std::string& case_id) {
    auto it = bundle().theta.find(case_id);
    if (it == bundle().theta.end()) throw Error(ErrorCode::MissingCase, "no bundled case '" + case_id + "'");
    return it->second;
}

}  // namespace jhohpm

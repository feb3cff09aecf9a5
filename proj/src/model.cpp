#include "jhohpm/model.hpp"

#include <cmath>
#include <numbers>

#include "jhohpm/errors.hpp"
#include "jhohpm/simd/kernels.hpp"

namespace jhohpm {

void FlowParams::validate() const {
    auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
    if (!std::isfinite(alpha) || !(alpha > 0.0 && alpha < std::numbers::pi / 2)) bad("alpha must lie in (0, pi/2)");
    if (!std::isfinite(Re) || !(Re > 0.0)) bad("Re must be > 0");
    if (!std::isfinite(H) || !(H >= 0.0)) bad("H must be >= 0");
    if (!std::isfinite(Pr) || !(Pr > 0.0)) bad("Pr must be > 0");
    if (!std::isfinite(beta) || !(beta >= 0.0)) bad("beta must be >= 0");
}

std::string_view to_string(ThermalMode m) noexcept {
    return m == ThermalMode::PaperFidelity ? "paper" : "scale-consistent";
}

ThermalMode thermal_mode_from_string(std::string_view s) {
    if (s == "paper" || s == "paperFidelity") return ThermalMode::PaperFidelity;
    if (s == "scale-consistent" || s == "scaleConsistent") return ThermalMode::ScaleConsistent;
    throw Error(ErrorCode::InvalidParams, "unknown thermal mode '" + std::string(s) + "'");
}

std::string_view to_string(VelocitySeedForcing f) noexcept {
    return f == VelocitySeedForcing::AsPrinted ? "as-printed" : "expanded";
}

std::string_view to_string(VelocityAuxVariant v) noexcept {
    return v == VelocityAuxVariant::AsComputed ? "as-computed" : "as-printed";
}

ThermalConstants ThermalConstants::paper_formula(const FlowParams& p) {
    const double a = p.alpha, a2 = a * a, RePr = p.Re * p.Pr, bPr = p.beta * p.Pr;
    ThermalConstants t;
    t.C = 1.0 + 2.0 * a2 + a * RePr + 4.0 * bPr * a2 + bPr * p.H;
    t.D = a2 + 2.0 * a * RePr + 2.0 * bPr * (2.0 * a2 - 1.0) + bPr * p.H;
    t.E = a * RePr + 4.0 * bPr * a2 + bPr * p.H;
    t.L = 4.0 * a2 + 2.0 * a * RePr;
    t.K = -2.0 * a * RePr;
    t.provenance = ConstantsProvenance::PaperFormula;
    return t;
}

ThermalConstants ThermalConstants::derived(const FlowParams& p) {
    const NonlinearTerms nl = thermal_nonlinear(p, velocity_seed(), theta_seed_as_printed(), ThermalMode::PaperFidelity);
    ThermalConstants t;
    t.C = nl.n0.coefficient(0);
    t.D = -0.5 * nl.n0.coefficient(2);
    t.E = nl.n0.coefficient(4);
    t.L = nl.partials[0].coefficient(0);
    t.K = nl.partials[0].coefficient(2);
    t.provenance = ConstantsProvenance::Derived;
    return t;
}

LaurentPoly velocity_seed() { return LaurentPoly({{0, 1.0}, {2, -1.0}}); }

LaurentPoly theta_seed_as_printed() { return LaurentPoly({{0, 0.5}, {2, -0.5}}); }

NonlinearTerms velocity_nonlinear(const FlowParams& p, const LaurentPoly& F0) {
    const double A = p.A(), B = p.B();
    const LaurentPoly dF = F0.derivative();
    NonlinearTerms t;
    t.n0 = A * (F0 * dF) + B * dF;
    t.partials = {A * dF, A * F0 + LaurentPoly::constant(B)};
    return t;
}

NonlinearTerms velocity_stage_terms(const FlowParams& p, const LaurentPoly& F0, VelocitySeedForcing f) {
    NonlinearTerms t = velocity_nonlinear(p, F0);
    if (f == VelocitySeedForcing::AsPrinted) {
        if (!(F0 == velocity_seed()))
            throw Error(ErrorCode::InvalidSpec, "the printed first-stage forcing is defined for F0 = 1 - eta^2 only");
        t.n0 = LaurentPoly({{1, -2.0 * (p.A() + p.B())}, {2, 2.0 * p.A()}});
    }
    return t;
}

NonlinearTerms thermal_nonlinear(const FlowParams& p, const LaurentPoly& F0, const LaurentPoly& theta0,
                                 ThermalMode mode) {
    const double a = p.alpha;
    const LaurentPoly dF = F0.derivative();
    const LaurentPoly n_theta = LaurentPoly::constant(4.0 * a * a) + (2.0 * a * p.Re * p.Pr) * F0;
    const LaurentPoly dissipation = (p.beta * p.Pr) * ((p.H + 4.0 * a * a) * (F0 * F0) + dF * dF);
    NonlinearTerms t;
    t.n0 = n_theta * theta0 + dissipation;
    if (mode == ThermalMode::PaperFidelity) t.n0 = LaurentPoly::constant(1.0) + t.n0;
    t.partials = {n_theta, LaurentPoly{}};
    return t;
}

std::vector<std::string> velocity_parameter_names(const VelocityAuxOptions& opt) {
    std::vector<std::string> n{"C1", "C2", "C3", "C4", "C5", "C6", "C7"};
    for (int d = 3; d <= opt.extra_h1_degree; ++d) n.push_back("X" + std::to_string(d));
    return n;
}

std::vector<std::string> thermal_parameter_names() { return {"C8", "C9", "C10", "C11", "C12", "C13"}; }

std::vector<AuxFunction> build_velocity_aux_set(double A, const VelocityAuxOptions& opt) {
    if (opt.extra_h1_degree < 2 || opt.extra_h1_degree > 4)
        throw Error(ErrorCode::InvalidParams, "extra H1 degree must be 2 (off), 3 or 4");
    const double s = 1.0 / (2.0 * A);
    AuxFunction h0{{{"C1", LaurentPoly::constant(-60.0)}}, {}, std::nullopt};

    AuxFunction h1;
    h1.basis = {{"C2", LaurentPoly::monomial(2, s)},
                {"C3", LaurentPoly::monomial(1, s)},
                {"C4", LaurentPoly::monomial(0, s)},
                {"C5", LaurentPoly::monomial(-1, s)}};
    for (int d = 3; d <= opt.extra_h1_degree; ++d) h1.basis.push_back({"X" + std::to_string(d), LaurentPoly::monomial(d, s)});

    AuxFunction h2;
    h2.basis = {{"C6", LaurentPoly::constant(0.5)}};
    if (opt.variant == VelocityAuxVariant::AsComputed)
        h1.basis.push_back({"C7", LaurentPoly::monomial(-2, s)});
    else
        h2.basis.push_back({"C7", LaurentPoly::monomial(-1, 1.0)});
    return {h0, h1, h2};
}

std::vector<AuxFunction> build_thermal_aux_set() {
    AuxFunction h0{{{"C8", LaurentPoly::constant(-30.0)}}, {}, std::nullopt};
    AuxFunction h1;
    h1.basis = {{"C9", LaurentPoly::monomial(0)},
                {"C10", LaurentPoly::monomial(1)},
                {"C11", LaurentPoly::monomial(2)},
                {"C12", LaurentPoly::monomial(3)},
                {"C13", LaurentPoly::monomial(4)}};
    h1.divisor = "C8";
    return {h0, h1};
}

LinearProblemSpec velocity_problem_spec() {
    return {3, {{0.0, 0, 1.0}, {0.0, 1, 0.0}, {1.0, 0, 0.0}}, {}};
}

LinearProblemSpec thermal_problem_spec(ThermalMode mode) {
    LinearProblemSpec s{2, {{1.0, 0, 0.0}, {0.0, 1, 0.0}}, {}};
    if (mode == ThermalMode::PaperFidelity) s.forcing = LaurentPoly::constant(-1.0);
    return s;
}

StageSolution run_velocity_stages(const FlowParams& p, const ParamMap& params, const VelocityAuxOptions& opt) {
    const NonlinearModel model = [&p, f = opt.seed_forcing](const LaurentPoly& u0) { return velocity_stage_terms(p, u0, f); };
    return run_stages(velocity_problem_spec(), model, build_velocity_aux_set(p.A(), opt), params);
}

StageSolution run_thermal_stages(const FlowParams& p, const ParamMap& params, ThermalMode mode, const LaurentPoly& seed) {
    auto c8 = params.find("C8");
    if (c8 != params.end() && c8->second == 0.0) {
        for (const char* n : {"C9", "C10", "C11", "C12", "C13"}) {
            auto it = params.find(n);
            if (it != params.end() && it->second != 0.0)
                throw Error(ErrorCode::ZeroC8WithStageTwo, "C8 = 0 while stage-two parameter " + std::string(n) + " is nonzero");
        }
    }
    const NonlinearModel model = [&p, &seed, mode](const LaurentPoly& u0) { return thermal_nonlinear(p, seed, u0, mode); };
    return run_stages(thermal_problem_spec(mode), model, build_thermal_aux_set(), params);
}

LaurentPoly residual_velocity(const LaurentPoly& F, const FlowParams& p) {
    const LaurentPoly dF = F.derivative();
    return F.derivative(3) + p.A() * (F * dF) + p.B() * dF;
}

LaurentPoly residual_thermal(const LaurentPoly& theta, const LaurentPoly& F, const FlowParams& p) {
    const double a = p.alpha;
    const LaurentPoly dF = F.derivative();
    return theta.derivative(2) + (LaurentPoly::constant(4.0 * a * a) + (2.0 * a * p.Re * p.Pr) * F) * theta +
           (p.beta * p.Pr) * ((p.H + 4.0 * a * a) * (F * F) + dF * dF);
}

void residual_velocity_at(const LaurentPoly& F, const FlowParams& p, std::span<const double> eta, std::span<double> out) {
    const std::size_t n = eta.size();
    std::vector<double> f(n), f1(n), f3(n);
    F.evaluate_many(eta, f);
    F.derivative().evaluate_many(eta, f1);
    F.derivative(3).evaluate_many(eta, f3);
    simd::active().velocity_residual(f.data(), f1.data(), f3.data(), p.A(), p.B(), out.data(), n);
}

void residual_thermal_at(const LaurentPoly& theta, const LaurentPoly& F, const FlowParams& p,
                         std::span<const double> eta, std::span<double> out) {
    const std::size_t n = eta.size();
    std::vector<double> t(n), t2(n), f(n), f1(n);
    theta.evaluate_many(eta, t);
    theta.derivative(2).evaluate_many(eta, t2);
    F.evaluate_many(eta, f);
    F.derivative().evaluate_many(eta, f1);
    const double a = p.alpha;
    const simd::ThermalCoefficients k{4.0 * a * a, 2.0 * a * p.Re * p.Pr, p.beta * p.Pr * (p.H + 4.0 * a * a),
                                      p.beta * p.Pr};
    simd::active().thermal_residual(t.data(), t2.data(), f.data(), f1.data(), k, out.data(), n);
}

double thermal_forcing_scale(const FlowParams& p) noexcept {
    return p.beta * p.Pr * (p.H + 4.0 * p.alpha * p.alpha);
}

namespace {

nlohmann::json params_to_json(const ParamMap& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : m) j[k] = v;
    return j;
}

ParamMap params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "parameter set must be a JSON object");
    ParamMap m;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) throw Error(ErrorCode::InvalidParams, "parameter " + k + " is not a number");
        m[k] = v.get<double>();
    }
    return m;
}

double required_number(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw Error(ErrorCode::InvalidParams, std::string("case file: missing or non-numeric '") + key + "'");
    return j.at(key).get<double>();
}

}  // namespace

nlohmann::json case_to_json(const CaseDefinition& c) {
    nlohmann::json j;
    j["id"] = c.id;
    j["alpha"] = c.params.alpha;
    j["Re"] = c.params.Re;
    j["H"] = c.params.H;
    j["Pr"] = c.params.Pr;
    j["beta"] = c.params.beta;
    j["mode"] = std::string(to_string(c.mode));
    if (c.paper_params_velocity) j["paperParametersVelocity"] = params_to_json(*c.paper_params_velocity);
    if (c.paper_params_thermal) j["paperParametersThermal"] = params_to_json(*c.paper_params_thermal);
    if (c.paper_solution_f) j["paperSolutionF"] = c.paper_solution_f->to_pairs();
    if (c.paper_solution_theta) j["paperSolutionTheta"] = c.paper_solution_theta->to_pairs();
    return j;
}

CaseDefinition case_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidParams, "case file must be a JSON object");
    CaseDefinition c;
    if (!j.contains("id") || !j.at("id").is_string()) throw Error(ErrorCode::InvalidParams, "case file: missing 'id'");
    c.id = j.at("id").get<std::string>();
    c.params.alpha = required_number(j, "alpha");
    c.params.Re = required_number(j, "Re");
    c.params.H = required_number(j, "H");
    c.params.Pr = required_number(j, "Pr");
    c.params.beta = required_number(j, "beta");
    c.params.validate();
    if (j.contains("mode")) c.mode = thermal_mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("paperParametersVelocity")) c.paper_params_velocity = params_from_json(j.at("paperParametersVelocity"));
    if (j.contains("paperParametersThermal")) c.paper_params_thermal = params_from_json(j.at("paperParametersThermal"));
    if (j.contains("paperSolutionF")) c.paper_solution_f = LaurentPoly::from_json(j.at("paperSolutionF"));
    if (j.contains("paperSolutionTheta")) c.paper_solution_theta = LaurentPoly::from_json(j.at("paperSolutionTheta"));
    return c;
}

}  // namespace jhohpm

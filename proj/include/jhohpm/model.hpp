#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jhohpm/engine.hpp"
#include "jhohpm/laurent_poly.hpp"

namespace jhohpm {

struct FlowParams {
    double alpha = 0.0;  // channel half-angle, radians
    double Re = 0.0;
    double H = 0.0;
    double Pr = 0.0;
    double beta = 0.0;

    double A() const noexcept { return 2.0 * alpha * Re; }
    double B() const noexcept { return (4.0 - H) * alpha * alpha; }
    // Throws InvalidParams.
    void validate() const;
};

enum class ThermalMode { PaperFidelity, ScaleConsistent };
enum class ConstantsProvenance { PaperFormula, Derived };

std::string_view to_string(ThermalMode m) noexcept;
ThermalMode thermal_mode_from_string(std::string_view s);

// Groups of N(theta0) = C - 2D eta^2 + E eta^4 and N_theta(theta0) = L + K eta^2.
struct ThermalConstants {
    double C = 0, D = 0, E = 0, L = 0, K = 0;
    ConstantsProvenance provenance = ConstantsProvenance::PaperFormula;

    // As printed alongside the published thermal decomposition.
    static ThermalConstants paper_formula(const FlowParams& p);
    // Read off the expansion of N at theta0 = (1 - eta^2)/2, F0 = 1 - eta^2.
    static ThermalConstants derived(const FlowParams& p);
};

LaurentPoly velocity_seed();  // 1 - eta^2
// Decomposition with L(theta) = theta'' and g = -1 has theta0 = (eta^2 - 1)/2; this is
// the positive-sign variant as printed, kept for the fidelity comparison.
LaurentPoly theta_seed_as_printed();

// N0 = A F0 F0' + B F0', partials {N_F, N_F'} = {A F0', A F0 + B}.
NonlinearTerms velocity_nonlinear(const FlowParams& p, const LaurentPoly& F0);
// partials {N_theta, N_theta'} = {4 alpha^2 + 2 alpha Re Pr F0, 0}. PaperFidelity adds the
// constant 1 to N0; both modes use the (H + 4 alpha^2) dissipation coefficient.
NonlinearTerms thermal_nonlinear(const FlowParams& p, const LaurentPoly& F0, const LaurentPoly& theta0,
                                 ThermalMode mode);

enum class VelocityAuxVariant {
    // C7/(2A eta^2) in H1 and H2 = C6/2; this placement reproduces the printed solution polynomials
    AsComputed,
    // H2 = C6/2 + C7/eta as written in the text
    AsPrinted,
};

std::string_view to_string(VelocityAuxVariant v) noexcept;

// First-stage forcing N(F0) at F0 = 1 - eta^2. The expansion of A F0 F0' + B F0' is
// 2A eta^3 - 2(A+B) eta; the published derivation prints and uses 2A eta^2 - 2(A+B) eta, and every printed
// velocity polynomial and OHPM column follows from that form.
enum class VelocitySeedForcing { AsPrinted, Expanded };

std::string_view to_string(VelocitySeedForcing f) noexcept;

struct VelocityAuxOptions {
    VelocityAuxVariant variant = VelocityAuxVariant::AsComputed;
    VelocitySeedForcing seed_forcing = VelocitySeedForcing::AsPrinted;
    // Extra H1 basis terms eta^3 .. eta^extra_h1_degree (parameters X3, X4); 2 = off.
    int extra_h1_degree = 2;
};

// velocity_nonlinear with n0 replaced by the printed 2A eta^2 - 2(A+B) eta when requested;
// that form is only defined for F0 = 1 - eta^2 (InvalidSpec otherwise).
NonlinearTerms velocity_stage_terms(const FlowParams& p, const LaurentPoly& F0, VelocitySeedForcing f);

std::vector<AuxFunction> build_velocity_aux_set(double A, const VelocityAuxOptions& opt = {});
std::vector<AuxFunction> build_thermal_aux_set();

std::vector<std::string> velocity_parameter_names(const VelocityAuxOptions& opt = {});
std::vector<std::string> thermal_parameter_names();

LinearProblemSpec velocity_problem_spec();
LinearProblemSpec thermal_problem_spec(ThermalMode mode);

StageSolution run_velocity_stages(const FlowParams& p, const ParamMap& params, const VelocityAuxOptions& opt = {});
// Stages use N(theta0) and N_theta built on `seed` (default F0 = 1 - eta^2).
// Throws ZeroC8WithStageTwo if C8 = 0 while any of C9..C13 is nonzero.
StageSolution run_thermal_stages(const FlowParams& p, const ParamMap& params, ThermalMode mode,
                                 const LaurentPoly& seed = velocity_seed());

LaurentPoly residual_velocity(const LaurentPoly& F, const FlowParams& p);
LaurentPoly residual_thermal(const LaurentPoly& theta, const LaurentPoly& F, const FlowParams& p);

// Pointwise residuals at nodes through the SIMD kernels (same values as the polynomial forms).
void residual_velocity_at(const LaurentPoly& F, const FlowParams& p, std::span<const double> eta, std::span<double> out);
void residual_thermal_at(const LaurentPoly& theta, const LaurentPoly& F, const FlowParams& p,
                         std::span<const double> eta, std::span<double> out);

// beta Pr (H + 4 alpha^2): magnitude of the thermal forcing.
double thermal_forcing_scale(const FlowParams& p) noexcept;

struct CaseDefinition {
    std::string id;
    FlowParams params;
    ThermalMode mode = ThermalMode::ScaleConsistent;
    std::optional<ParamMap> paper_params_velocity;
    std::optional<ParamMap> paper_params_thermal;
    std::optional<LaurentPoly> paper_solution_f;
    std::optional<LaurentPoly> paper_solution_theta;
    int velocity_table = 0;  // 0 when there is no bundled table
    int thermal_table = 0;
};

// Case-file JSON: {"id","alpha","Re","H","Pr","beta","mode", optional printed parameters and solutions}.
nlohmann::json case_to_json(const CaseDefinition& c);
CaseDefinition case_from_json(const nlohmann::json& j);

}  // namespace jhohpm

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jhohpm/engine.hpp"
#include "jhohpm/model.hpp"
#include "jhohpm/quadrature.hpp"

namespace jhohpm {

enum class Problem { Velocity, Thermal };
enum class Optimizer { LevenbergMarquardt, NelderMead };

std::string_view to_string(Problem p) noexcept;
std::string_view to_string(Optimizer o) noexcept;

struct ObjectiveSpec {
    Problem problem = Problem::Velocity;
    Quadrature quadrature;
    std::vector<std::string> parameter_names;
    std::optional<std::vector<std::pair<double, double>>> bounds;
    double normalization = 1.0;

    void validate() const;
};

// Optimizer coordinates differing from the named parameters. Both maps act on full vectors
// ordered as spec.parameter_names; objective, bounds and results stay in the named parameters.
struct Coordinates {
    std::function<std::vector<double>(std::span<const double>)> to_internal;
    std::function<std::vector<double>(std::span<const double>)> to_external;
};

// Everything the optimizer needs: the spec plus how to build a solution and its residual.
struct FitProblem {
    ObjectiveSpec spec;
    std::optional<Coordinates> coordinates;
    std::function<LaurentPoly(const ParamMap&)> assemble;
    std::function<void(const LaurentPoly&, std::span<const double>, std::span<double>)> residual_at;
};

struct FitOptions {
    QuadratureKind quadrature = QuadratureKind::GaussLegendre;
    int quadrature_nodes = 30;  // 31 is the usual choice for collocation
    int random_starts = 5;
    std::uint64_t seed = 0;
    Optimizer optimizer = Optimizer::LevenbergMarquardt;
    // fit the first parameter alone, then all jointly
    bool staged = false;
    int max_iterations = 500;
    double jacobian_step = 1e-7;
    VelocityAuxOptions velocity_aux;
    ThermalMode thermal_mode = ThermalMode::ScaleConsistent;
};

FitProblem make_velocity_problem(const FlowParams& p, const FitOptions& opt = {});
// Stages are seeded with F0 = 1 - eta^2; the residual uses `F` (normally the fitted velocity).
FitProblem make_thermal_problem(const FlowParams& p, const LaurentPoly& F, const FitOptions& opt = {});

// sum_q w_q (R(eta_q)/normalization)^2
double objective(const ParamMap& params, const FitProblem& problem);
// sqrt(w_q) R(eta_q)/normalization
void residual_vector(const ParamMap& params, const FitProblem& problem, std::span<double> out);

ParamMap to_param_map(const std::vector<std::string>& names, std::span<const double> x);
std::vector<double> to_vector(const std::vector<std::string>& names, const ParamMap& m);

// zeros, first parameter -0.01 and +0.01, then `random_starts` draws of U[-1,1] * 1e-2.
std::vector<ParamMap> default_starts(const std::vector<std::string>& names, std::uint64_t seed, int random_starts = 5);

enum class FitStatus { Converged, IterationCap, NoProgress };
std::string_view to_string(FitStatus s) noexcept;

struct StartOutcome {
    ParamMap start;
    ParamMap parameters;
    double objective = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string failure;          // non-empty when the start threw
    std::vector<double> history;  // objective at every accepted iterate, starting point first
};

struct FitResult {
    ParamMap parameters;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    FitStatus status = FitStatus::NoProgress;
    Optimizer optimizer = Optimizer::LevenbergMarquardt;
    std::size_t best_start = 0;
    std::vector<double> residual_profile;  // raw residual at eta = i/100
    std::vector<double> history;           // of the best start
    std::vector<StartOutcome> starts;
    LaurentPoly solution;
};

// Runs the chosen optimizer from every start and keeps the lowest objective. Never throws
// for per-start numerical failures; status NoProgress means every start failed.
FitResult fit(const FitProblem& problem, const std::vector<ParamMap>& starts, const FitOptions& opt = {});

// Single local run (exposed for the optimizer comparison tests).
StartOutcome run_levenberg_marquardt(const FitProblem& problem, const ParamMap& start, const FitOptions& opt,
                                     const std::vector<std::string>& free_names);
StartOutcome run_nelder_mead(const FitProblem& problem, const ParamMap& start, const FitOptions& opt);

}  // namespace jhohpm

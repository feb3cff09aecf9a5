#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "jhohpm/laurent_poly.hpp"

namespace jhohpm {

using ParamMap = std::map<std::string, double>;

struct BoundaryCondition {
    double location;       // 0 or 1
    int derivative_order;  // < order of L
    double value;
};

// L = d^k/deta^k with k boundary conditions and forcing g: L(u) + g = 0.
struct LinearProblemSpec {
    int derivative_order = 0;
    std::vector<BoundaryCondition> conditions;
    LaurentPoly forcing;

    // Throws InvalidSpec or SingularBoundarySystem.
    void validate() const;
};

struct AuxTerm {
    std::string parameter;
    LaurentPoly shape;
};

// H(eta; C) = (constant_part + sum_k C_k shape_k) / C_divisor (divisor optional).
struct AuxFunction {
    std::vector<AuxTerm> basis;
    LaurentPoly constant_part;
    std::optional<std::string> divisor;

    std::vector<std::string> parameter_names() const;
    // Throws MissingParameter; ZeroDivisor when the divisor is zero and the numerator is not.
    LaurentPoly resolve(const ParamMap& params) const;
};

// N(u0) and the Frechet partials: partials[j] multiplies the j-th derivative of u1.
struct NonlinearTerms {
    LaurentPoly n0;
    std::vector<LaurentPoly> partials;
};

using NonlinearModel = std::function<NonlinearTerms(const LaurentPoly& u0)>;

struct StageSolution {
    LaurentPoly u0, u1, u2;
    LaurentPoly assembled;
    // right-hand sides fed to the first and second correction stages
    LaurentPoly rhs1, rhs2;
};

// Solves d^k u/deta^k + g + rhs = 0 with the spec's conditions. With `homogeneous`
// the condition values are zero and g is dropped (correction stages carry no g).
LaurentPoly solve_linear_stage(const LinearProblemSpec& spec, const LaurentPoly& rhs, bool homogeneous);

// (H resolved at params) * carrier; throws PoleNotCancelled if a negative power survives.
LaurentPoly apply_aux_function(const AuxFunction& aux, const ParamMap& params, const LaurentPoly& carrier);

// aux[0] is H0; aux[1 + j] pairs with partials[j] in the second stage. Slots past the
// model's partial count (third-stage functions) are accepted and ignored.
StageSolution run_stages(const LinearProblemSpec& spec, const NonlinearModel& model,
                         const std::vector<AuxFunction>& aux, const ParamMap& params);

// Value of d^order/deta^order of p at eta.
double derivative_at(const LaurentPoly& p, int order, double eta);

}  // namespace jhohpm

#include "jhohpm/engine.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "jhohpm/errors.hpp"

namespace jhohpm {

namespace {

constexpr double kMaxCondition = 1e12;

// d^d/deta^d of eta^j at x
double monomial_derivative(int j, int d, double x) {
    if (j < d) return 0.0;
    double f = 1.0;
    for (int i = 0; i < d; ++i) f *= static_cast<double>(j - i);
    const int e = j - d;
    return e == 0 ? f : f * std::pow(x, e);
}

Eigen::MatrixXd bc_matrix(const LinearProblemSpec& spec) {
    const int k = spec.derivative_order;
    Eigen::MatrixXd M(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            M(i, j) = monomial_derivative(j, spec.conditions[i].derivative_order, spec.conditions[i].location);
    return M;
}

void check_conditioning(const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& s = svd.singularValues();
    const double smax = s(0), smin = s(s.size() - 1);
    if (!(smin > 0.0) || smax / smin > kMaxCondition)
        throw Error(ErrorCode::SingularBoundarySystem, "boundary-condition system is singular (condition number > 1e12)");
}

}  // namespace

double derivative_at(const LaurentPoly& p, int order, double eta) {
    return p.derivative(order).evaluate(eta);
}

void LinearProblemSpec::validate() const {
    if (derivative_order < 1) throw Error(ErrorCode::InvalidSpec, "linear operator order must be >= 1");
    if (static_cast<int>(conditions.size()) != derivative_order)
        throw Error(ErrorCode::InvalidSpec, "need exactly " + std::to_string(derivative_order) +
                                                " boundary conditions, got " + std::to_string(conditions.size()));
    for (const auto& bc : conditions) {
        if (bc.location != 0.0 && bc.location != 1.0)
            throw Error(ErrorCode::InvalidSpec, "boundary condition location must be 0 or 1");
        if (bc.derivative_order < 0 || bc.derivative_order >= derivative_order)
            throw Error(ErrorCode::InvalidSpec, "boundary condition derivative order out of range");
        if (!std::isfinite(bc.value)) throw Error(ErrorCode::InvalidSpec, "boundary condition value is not finite");
    }
    check_conditioning(bc_matrix(*this));
}

LaurentPoly solve_linear_stage(const LinearProblemSpec& spec, const LaurentPoly& rhs, bool homogeneous) {
    spec.validate();
    const int k = spec.derivative_order;
    const LaurentPoly source = homogeneous ? rhs : spec.forcing + rhs;
    if (source.min_exponent() < 0)
        throw Error(ErrorCode::NonPolynomialAntiderivative,
                    "stage right-hand side has a negative power of eta; cannot integrate to a polynomial");
    const LaurentPoly particular = (-source).antiderivative(k);

    const Eigen::MatrixXd M = bc_matrix(spec);
    Eigen::VectorXd b(k);
    for (int i = 0; i < k; ++i) {
        const auto& bc = spec.conditions[i];
        const double target = homogeneous ? 0.0 : bc.value;
        b(i) = target - derivative_at(particular, bc.derivative_order, bc.location);
    }
    const Eigen::VectorXd c = M.partialPivLu().solve(b);

    std::vector<LaurentPoly::Term> correction;
    for (int j = 0; j < k; ++j) correction.push_back({j, c(j)});
    return particular + LaurentPoly(std::move(correction));
}

std::vector<std::string> AuxFunction::parameter_names() const {
    std::vector<std::string> names;
    for (const auto& t : basis) names.push_back(t.parameter);
    if (divisor) names.push_back(*divisor);
    return names;
}

LaurentPoly AuxFunction::resolve(const ParamMap& params) const {
    auto lookup = [&](const std::string& name) {
        auto it = params.find(name);
        if (it == params.end()) throw Error(ErrorCode::MissingParameter, "missing auxiliary parameter " + name);
        return it->second;
    };
    LaurentPoly h = constant_part;
    for (const auto& t : basis) h = h + lookup(t.parameter) * t.shape;
    if (divisor) {
        const double d = lookup(*divisor);
        if (d == 0.0) {
            if (h.is_zero()) return h;
            throw Error(ErrorCode::ZeroDivisor, "auxiliary divisor parameter " + *divisor + " is zero");
        }
        h = (1.0 / d) * h;
    }
    return h;
}

LaurentPoly apply_aux_function(const AuxFunction& aux, const ParamMap& params, const LaurentPoly& carrier) {
    const LaurentPoly out = aux.resolve(params) * carrier;
    if (out.min_exponent() < 0)
        throw Error(ErrorCode::PoleNotCancelled,
                    "auxiliary function pole not cancelled by carrier (result has eta^" +
                        std::to_string(out.min_exponent()) + ")");
    return out;
}

StageSolution run_stages(const LinearProblemSpec& spec, const NonlinearModel& model,
                         const std::vector<AuxFunction>& aux, const ParamMap& params) {
    if (aux.empty()) throw Error(ErrorCode::InvalidSpec, "run_stages needs at least the H0 auxiliary function");
    StageSolution s;
    s.u0 = solve_linear_stage(spec, {}, false);
    const NonlinearTerms nl = model(s.u0);

    s.rhs1 = apply_aux_function(aux[0], params, nl.n0);
    s.u1 = solve_linear_stage(spec, s.rhs1, true);

    for (std::size_t j = 0; j < nl.partials.size() && j + 1 < aux.size(); ++j) {
        const LaurentPoly carrier = s.u1.derivative(static_cast<int>(j)) * nl.partials[j];
        s.rhs2 = s.rhs2 + apply_aux_function(aux[j + 1], params, carrier);
    }
    s.u2 = solve_linear_stage(spec, s.rhs2, true);
    s.assembled = s.u0 + s.u1 + s.u2;
    return s;
}

}  // namespace jhohpm

#include "jhohpm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "jhohpm/errors.hpp"
#include "jhohpm/simd/kernels.hpp"

namespace jhohpm {

std::string_view to_string(Problem p) noexcept { return p == Problem::Velocity ? "velocity" : "thermal"; }

std::string_view to_string(Optimizer o) noexcept {
    return o == Optimizer::LevenbergMarquardt ? "levenberg-marquardt" : "nelder-mead";
}

std::string_view to_string(FitStatus s) noexcept {
    switch (s) {
        case FitStatus::Converged: return "converged";
        case FitStatus::IterationCap: return "iteration-cap";
        case FitStatus::NoProgress: return "no-progress";
    }
    return "unknown";
}

void ObjectiveSpec::validate() const {
    quadrature.validate();
    if (parameter_names.empty()) throw Error(ErrorCode::InvalidSpec, "objective has no parameters");
    if (!(normalization > 0.0) || !std::isfinite(normalization))
        throw Error(ErrorCode::InvalidSpec, "normalization must be positive and finite");
    if (bounds) {
        if (bounds->size() != parameter_names.size())
            throw Error(ErrorCode::InvalidSpec, "bounds must list one interval per parameter");
        for (auto [lo, hi] : *bounds)
            if (!(lo <= hi)) throw Error(ErrorCode::InvalidSpec, "bound interval has lo > hi");
    }
}

FitProblem make_velocity_problem(const FlowParams& p, const FitOptions& opt) {
    p.validate();
    FitProblem fp;
    fp.spec.problem = Problem::Velocity;
    fp.spec.quadrature = make_quadrature(opt.quadrature, opt.quadrature_nodes);
    fp.spec.parameter_names = velocity_parameter_names(opt.velocity_aux);
    fp.spec.normalization = 1.0;
    fp.spec.validate();
    auto aux = std::make_shared<const std::vector<AuxFunction>>(build_velocity_aux_set(p.A(), opt.velocity_aux));
    fp.assemble = [p, aux, f = opt.velocity_aux.seed_forcing](const ParamMap& m) {
        const NonlinearModel model = [&p, f](const LaurentPoly& u0) { return velocity_stage_terms(p, u0, f); };
        return run_stages(velocity_problem_spec(), model, *aux, m).assembled;
    };
    fp.residual_at = [p](const LaurentPoly& F, std::span<const double> eta, std::span<double> out) {
        residual_velocity_at(F, p, eta, out);
    };
    // u1 is proportional to C1 and u2 to the products C1*Ck, so F is linear in (C1, C1*C2, ...);
    // searching there removes the curved valley along C1 -> s C1, Ck -> Ck / s.
    fp.coordinates = Coordinates{
        [](std::span<const double> c) {
            std::vector<double> d(c.begin(), c.end());
            for (std::size_t k = 1; k < d.size(); ++k) d[k] = c[0] * c[k];
            return d;
        },
        [](std::span<const double> d) {
            std::vector<double> c(d.begin(), d.end());
            for (std::size_t k = 1; k < c.size(); ++k) c[k] = d[0] != 0.0 ? d[k] / d[0] : 0.0;
            return c;
        }};
    return fp;
}

FitProblem make_thermal_problem(const FlowParams& p, const LaurentPoly& F, const FitOptions& opt) {
    p.validate();
    FitProblem fp;
    fp.spec.problem = Problem::Thermal;
    fp.spec.quadrature = make_quadrature(opt.quadrature, opt.quadrature_nodes);
    fp.spec.parameter_names = thermal_parameter_names();
    fp.spec.normalization = thermal_forcing_scale(p) + 1e-300;
    fp.spec.validate();
    const ThermalMode mode = opt.thermal_mode;
    fp.assemble = [p, mode](const ParamMap& m) { return run_thermal_stages(p, m, mode).assembled; };
    fp.residual_at = [p, F](const LaurentPoly& theta, std::span<const double> eta, std::span<double> out) {
        residual_thermal_at(theta, F, p, eta, out);
    };
    return fp;
}

ParamMap to_param_map(const std::vector<std::string>& names, std::span<const double> x) {
    ParamMap m;
    for (std::size_t i = 0; i < names.size(); ++i) m[names[i]] = x[i];
    return m;
}

std::vector<double> to_vector(const std::vector<std::string>& names, const ParamMap& m) {
    std::vector<double> x;
    x.reserve(names.size());
    for (const auto& n : names) {
        auto it = m.find(n);
        if (it == m.end()) throw Error(ErrorCode::MissingParameter, "missing parameter " + n);
        x.push_back(it->second);
    }
    return x;
}

namespace {

void raw_residual(const ParamMap& params, const FitProblem& problem, std::vector<double>& r) {
    const auto& q = problem.spec.quadrature;
    for (const auto& n : problem.spec.parameter_names)
        if (!params.count(n)) throw Error(ErrorCode::MissingParameter, "missing parameter " + n);
    const LaurentPoly sol = problem.assemble(params);
    r.resize(q.nodes.size());
    problem.residual_at(sol, q.nodes, r);
}

}  // namespace

double objective(const ParamMap& params, const FitProblem& problem) {
    std::vector<double> r;
    raw_residual(params, problem, r);
    const auto& w = problem.spec.quadrature.weights;
    return simd::active().weighted_sum_squares(w.data(), r.data(), 1.0 / problem.spec.normalization, r.size());
}

void residual_vector(const ParamMap& params, const FitProblem& problem, std::span<double> out) {
    std::vector<double> r;
    raw_residual(params, problem, r);
    std::vector<double> sw(r.size());
    const auto& w = problem.spec.quadrature.weights;
    for (std::size_t i = 0; i < r.size(); ++i) sw[i] = std::sqrt(w[i]);
    simd::active().scaled_product(sw.data(), r.data(), 1.0 / problem.spec.normalization, out.data(), r.size());
}

std::vector<ParamMap> default_starts(const std::vector<std::string>& names, std::uint64_t seed, int random_starts) {
    std::vector<ParamMap> starts;
    const std::vector<double> zeros(names.size(), 0.0);
    starts.push_back(to_param_map(names, zeros));
    for (double s : {-0.01, 0.01}) {
        auto x = zeros;
        x[0] = s;
        starts.push_back(to_param_map(names, x));
    }
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < random_starts; ++k) {
        std::vector<double> x(names.size());
        for (auto& v : x) v = u(gen) * 1e-2;
        starts.push_back(to_param_map(names, x));
    }
    return starts;
}

namespace {

// Maps the optimizer's free coordinates onto a full parameter map, clamping to bounds.
class Evaluator {
public:
    Evaluator(const FitProblem& p, ParamMap base, const std::vector<std::string>& free)
        : problem_(p), base_(std::move(base)) {
        const auto& w = p.spec.quadrature.weights;
        sqrt_w_.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) sqrt_w_[i] = std::sqrt(w[i]);
        const auto& names = p.spec.parameter_names;
        if (p.spec.bounds)
            for (std::size_t i = 0; i < names.size(); ++i) bounds_[names[i]] = (*p.spec.bounds)[i];
        base_internal_ = to_vector(names, base_);
        if (p.coordinates) base_internal_ = p.coordinates->to_internal(base_internal_);
        for (const auto& f : free) {
            auto it = std::find(names.begin(), names.end(), f);
            if (it == names.end()) throw Error(ErrorCode::MissingParameter, "unknown parameter " + f);
            free_.push_back(static_cast<std::size_t>(it - names.begin()));
        }
    }

    std::size_t inputs() const { return free_.size(); }
    std::size_t values() const { return sqrt_w_.size(); }

    // Starting point in optimizer coordinates.
    std::vector<double> initial() const {
        std::vector<double> x;
        for (std::size_t i : free_) x.push_back(base_internal_[i]);
        return x;
    }

    ParamMap params(const double* x) const {
        std::vector<double> full = base_internal_;
        for (std::size_t i = 0; i < free_.size(); ++i) full[free_[i]] = x[i];
        if (problem_.coordinates) full = problem_.coordinates->to_external(full);
        const auto& names = problem_.spec.parameter_names;
        ParamMap m = base_;
        for (std::size_t i = 0; i < names.size(); ++i) {
            double v = full[i];
            if (auto it = bounds_.find(names[i]); it != bounds_.end()) v = std::clamp(v, it->second.first, it->second.second);
            m[names[i]] = v;
        }
        return m;
    }

    void residuals(const double* x, double* out) {
        ++evaluations;
        raw_residual(params(x), problem_, raw_);
        simd::active().scaled_product(sqrt_w_.data(), raw_.data(), 1.0 / problem_.spec.normalization, out, raw_.size());
    }

    double objective(const double* x) {
        ++evaluations;
        raw_residual(params(x), problem_, raw_);
        const auto& w = problem_.spec.quadrature.weights;
        return simd::active().weighted_sum_squares(w.data(), raw_.data(), 1.0 / problem_.spec.normalization, raw_.size());
    }

    int evaluations = 0;

private:
    const FitProblem& problem_;
    ParamMap base_;
    std::vector<std::size_t> free_;
    std::vector<double> base_internal_;
    std::vector<double> sqrt_w_;
    std::vector<double> raw_;
    std::map<std::string, std::pair<double, double>> bounds_;
};

// Functor in the form Eigen's MINPACK port expects; the Jacobian is our forward difference.
struct LmFunctor {
    using Scalar = double;
    using VectorType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    Evaluator& ev;
    double rel_step;
    Eigen::VectorXd last_x, last_f;
    double grad_inf = std::numeric_limits<double>::infinity();

    Eigen::Index values() const { return static_cast<Eigen::Index>(ev.values()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) {
        f.resize(values());
        ev.residuals(x.data(), f.data());
        last_x = x;
        last_f = f;
        return 0;
    }

    int df(const Eigen::VectorXd& x, Eigen::MatrixXd& J) {
        int count = 0;
        Eigen::VectorXd f0;
        if (last_x.size() == x.size() && last_x == x) {
            f0 = last_f;
        } else {
            f0.resize(values());
            ev.residuals(x.data(), f0.data());
            ++count;
        }
        J.resize(values(), x.size());
        Eigen::VectorXd xp = x, fp(values());
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            const double h = rel_step * (x[j] != 0.0 ? std::fabs(x[j]) : 1.0);
            xp[j] = x[j] + h;
            ev.residuals(xp.data(), fp.data());
            ++count;
            J.col(j) = (fp - f0) / (xp[j] - x[j]);
            xp[j] = x[j];
        }
        grad_inf = (2.0 * J.transpose() * f0).cwiseAbs().maxCoeff();
        last_x = x;
        last_f = f0;
        return std::max(count, 1);
    }
};

bool stalled(const std::vector<double>& h) {
    if (h.size() < 4) return false;
    const double a = h[h.size() - 4], b = h.back();
    return a - b <= 1e-12 * a;
}

}  // namespace

StartOutcome run_levenberg_marquardt(const FitProblem& problem, const ParamMap& start, const FitOptions& opt,
                                     const std::vector<std::string>& free_names) {
    StartOutcome out;
    out.start = start;
    Evaluator ev(problem, start, free_names);
    LmFunctor fn{ev, opt.jacobian_step, {}, {}};
    Eigen::LevenbergMarquardt<LmFunctor> lm(fn);
    lm.parameters.ftol = 0.0;
    lm.parameters.xtol = 0.0;
    lm.parameters.gtol = 0.0;
    lm.parameters.maxfev = std::numeric_limits<int>::max() / 2;

    const std::vector<double> x0 = ev.initial();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), static_cast<Eigen::Index>(x0.size()));
    auto status = lm.minimizeInit(x);
    if (status == Eigen::LevenbergMarquardtSpace::ImproperInputParameters)
        throw Error(ErrorCode::InvalidSpec, "fewer residuals than free parameters");
    out.history.push_back(lm.fnorm * lm.fnorm);

    using S = Eigen::LevenbergMarquardtSpace::Status;
    auto accepted = lm.iter;
    int it = 0;
    bool converged = false;
    while (it < opt.max_iterations) {
        ++it;
        status = lm.minimizeOneStep(x);
        if (lm.iter != accepted) {
            accepted = lm.iter;
            out.history.push_back(lm.fnorm * lm.fnorm);
        }
        if (fn.grad_inf < 1e-10 || stalled(out.history)) {
            converged = true;
            break;
        }
        if (status != S::Running) {
            converged = status != S::TooManyFunctionEvaluation && status != S::UserAsked;
            break;
        }
    }
    out.parameters = ev.params(x.data());
    out.iterations = it;
    out.evaluations = ev.evaluations;
    out.converged = converged;
    out.objective = objective(out.parameters, problem);
    return out;
}

namespace {

struct NmContext {
    Evaluator* ev;
    bool failed = false;
    std::string failure;
};

double nm_objective(const gsl_vector* v, void* params) {
    auto* ctx = static_cast<NmContext*>(params);
    try {
        const double f = ctx->ev->objective(v->data);
        return std::isfinite(f) ? f : GSL_POSINF;
    } catch (const std::exception& e) {
        ctx->failed = true;
        ctx->failure = e.what();
        return GSL_POSINF;
    }
}

}  // namespace

// GSL simplex with restarts; each restart rebuilds the simplex around the incumbent.
StartOutcome run_nelder_mead(const FitProblem& problem, const ParamMap& start, const FitOptions& opt) {
    StartOutcome out;
    out.start = start;
    const auto& names = problem.spec.parameter_names;
    const std::size_t n = names.size();
    Evaluator ev(problem, start, names);
    NmContext ctx{&ev, false, {}};
    gsl_set_error_handler_off();

    std::vector<double> x = ev.initial();
    double fx = ev.objective(x.data());
    out.history.push_back(fx);

    gsl_multimin_function func{nm_objective, n, &ctx};
    gsl_vector* xv = gsl_vector_alloc(n);
    gsl_vector* step = gsl_vector_alloc(n);
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);

    const int max_restarts = std::min(50, opt.max_iterations);
    const int iters_per_restart = 2000 * static_cast<int>(n);
    int total = 0;
    bool converged = false;
    for (int r = 0; r < max_restarts; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            gsl_vector_set(xv, i, x[i]);
            gsl_vector_set(step, i, x[i] != 0.0 ? 0.1 * std::fabs(x[i]) : 1e-2);
        }
        gsl_multimin_fminimizer_set(s, &func, xv, step);
        for (int k = 0; k < iters_per_restart; ++k) {
            ++total;
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            const double size = gsl_multimin_fminimizer_size(s);
            if (size < 1e-13 * (1.0 + gsl_blas_dnrm2(s->x))) break;
        }
        const double f_new = s->fval;
        const bool improved = f_new < fx;
        const double rel = improved ? (fx - f_new) / std::max(fx, std::numeric_limits<double>::min()) : 0.0;
        if (improved) {
            for (std::size_t i = 0; i < n; ++i) x[i] = gsl_vector_get(s->x, i);
            fx = f_new;
            out.history.push_back(fx);
        }
        if (rel < 1e-12) {
            converged = true;
            break;
        }
    }
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(xv);

    out.parameters = ev.params(x.data());
    out.iterations = total;
    out.evaluations = ev.evaluations;
    out.converged = converged;
    out.objective = objective(out.parameters, problem);
    return out;
}

FitResult fit(const FitProblem& problem, const std::vector<ParamMap>& starts, const FitOptions& opt) {
    if (starts.empty()) throw Error(ErrorCode::InvalidSpec, "fit needs at least one start");
    problem.spec.validate();
    FitResult res;
    res.optimizer = opt.optimizer;
    const auto& names = problem.spec.parameter_names;
    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        StartOutcome o;
        try {
            if (opt.optimizer == Optimizer::NelderMead) {
                o = run_nelder_mead(problem, starts[k], opt);
            } else if (opt.staged && names.size() > 1) {
                StartOutcome first = run_levenberg_marquardt(problem, starts[k], opt, {names.front()});
                o = run_levenberg_marquardt(problem, first.parameters, opt, names);
                o.start = starts[k];
                o.iterations += first.iterations;
                o.evaluations += first.evaluations;
                first.history.insert(first.history.end(), o.history.begin() + 1, o.history.end());
                o.history = std::move(first.history);
            } else {
                o = run_levenberg_marquardt(problem, starts[k], opt, names);
            }
        } catch (const Error& e) {
            o = StartOutcome{};
            o.start = starts[k];
            o.failure = std::string(to_string(e.code())) + ": " + e.what();
            o.objective = std::numeric_limits<double>::quiet_NaN();
        }
        if (o.failure.empty() && std::isfinite(o.objective) && o.objective < best) {
            best = o.objective;
            res.best_start = k;
            any = true;
        }
        res.starts.push_back(std::move(o));
    }
    if (!any) {
        res.status = FitStatus::NoProgress;
        res.converged = false;
        res.objective = std::numeric_limits<double>::quiet_NaN();
        return res;
    }
    const StartOutcome& b = res.starts[res.best_start];
    res.parameters = b.parameters;
    res.objective = b.objective;
    res.iterations = b.iterations;
    res.converged = b.converged;
    res.status = b.converged ? FitStatus::Converged : FitStatus::IterationCap;
    res.history = b.history;
    res.solution = problem.assemble(res.parameters);
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i) grid[i] = i / 100.0;
    res.residual_profile.resize(grid.size());
    problem.residual_at(res.solution, grid, res.residual_profile);
    return res;
}

}  // namespace jhohpm

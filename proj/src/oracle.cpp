#include "jhohpm/oracle.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace jhohpm {

namespace {

using V3 = std::array<double, 3>;
using V5 = std::array<double, 5>;

struct VelocityRhs {
    double A, B;
    V3 operator()(double, const V3& y) const { return {y[1], y[2], -A * y[0] * y[1] - B * y[1]}; }
};

// velocity and temperature together, so theta sees F at the RK4 half steps
struct CoupledRhs {
    double A, B, a0, a1, c0, c1;
    V5 operator()(double, const V5& y) const {
        const double F = y[0], dF = y[1];
        return {dF, y[2], -A * F * dF - B * dF, y[4], -(a0 + a1 * F) * y[3] - (c0 * F * F + c1 * dF * dF)};
    }
};

CoupledRhs coupled_rhs(const FlowParams& p) {
    const double a = p.alpha;
    return {p.A(), p.B(), 4.0 * a * a, 2.0 * a * p.Re * p.Pr, p.beta * p.Pr * (p.H + 4.0 * a * a), p.beta * p.Pr};
}

template <std::size_t N, class Rhs, class Visit>
std::array<double, N> integrate(std::array<double, N> y, int n, const Rhs& f, Visit&& visit) {
    const double h = 1.0 / n;
    CompensatedRk4<N> st{y, {}};
    visit(0, st.y);
    for (int i = 0; i < n; ++i) {
        st.step(i * h, h, f);
        visit(i + 1, st.y);
    }
    return st.y;
}

}  // namespace

int steps_for(double h) {
    if (!(h > 0.0) || !(h <= 1.0)) throw Error(ErrorCode::InvalidParams, "step h must lie in (0, 1]");
    const double nf = std::round(1.0 / h);
    if (std::fabs(nf * h - 1.0) > 1e-12) throw Error(ErrorCode::InvalidParams, "step h must be 1/n for an integer n");
    return static_cast<int>(nf);
}

double OracleSolution::value_at(double x) const {
    const int n = static_cast<int>(steps());
    if (n == 0) throw Error(ErrorCode::InvalidSpec, "empty oracle solution");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidParams, "oracle query outside [0, 1]");
    const double t = x * n;
    const double r = std::round(t);
    if (std::fabs(t - r) < 1e-9) return y[static_cast<std::size_t>(r)];
    const int i = std::min(static_cast<int>(std::floor(t)), n - 1);
    const double s = t - i;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1];
}

double velocity_terminal_value(const FlowParams& p, double s, double h) {
    const int n = steps_for(h);
    return integrate<3>({1.0, 0.0, s}, n, VelocityRhs{p.A(), p.B()}, [](int, const V3&) {})[0];
}

OracleSolution shoot_velocity(const FlowParams& p, double h, const ShootingOptions& opt) {
    p.validate();
    const int n = steps_for(h);
    const VelocityRhs rhs{p.A(), p.B()};
    // a trial slope whose IVP blows up counts as an infinite miss in the direction it was heading
    auto miss = [&](double s) {
        CompensatedRk4<3> st{{1.0, 0.0, s}, {}};
        const double step = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            try {
                st.step(i * step, step, rhs);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::NonFiniteState) throw;
                return std::copysign(std::numeric_limits<double>::infinity(), st.y[0]);
            }
        }
        return st.y[0];
    };

    double lo = opt.bracket_lo, hi = opt.bracket_hi;
    double mlo = miss(lo), mhi = miss(hi);
    if (mlo * mhi > 0.0)
        throw Error(ErrorCode::ShootingDiverged, "F(1) does not change sign over the shooting bracket");

    // secant on the two latest iterates, bisection whenever the secant leaves the bracket
    double s0 = lo, m0 = mlo, s1 = hi, m1 = mhi;
    double s = s1, m = m1;
    int it = 0;
    bool done = std::fabs(m) <= opt.tolerance;
    if (std::fabs(mlo) <= opt.tolerance) {
        s = lo;
        m = mlo;
        done = true;
    }
    while (!done) {
        if (++it > opt.max_iterations)
            throw Error(ErrorCode::ShootingDiverged, "shooting did not reach |F(1)| <= tolerance within the iteration cap");
        double cand = (m1 != m0) ? s1 - m1 * (s1 - s0) / (m1 - m0) : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        const double mc = miss(cand);
        if ((mc < 0.0) == (mlo < 0.0)) {
            lo = cand;
            mlo = mc;
        } else {
            hi = cand;
            mhi = mc;
        }
        s0 = s1;
        m0 = m1;
        s1 = cand;
        m1 = mc;
        s = cand;
        m = mc;
        done = std::fabs(m) <= opt.tolerance;
    }

    OracleSolution out;
    out.kind = OracleKind::Velocity;
    out.h = 1.0 / n;
    out.eta.resize(n + 1);
    out.y.resize(n + 1);
    out.dy.resize(n + 1);
    out.d2y.resize(n + 1);
    const V3 last = integrate<3>({1.0, 0.0, s}, n, rhs, [&](int i, const V3& v) {
        out.eta[i] = static_cast<double>(i) / n;
        out.y[i] = v[0];
        out.dy[i] = v[1];
        out.d2y[i] = v[2];
    });
    out.shooting_parameter = s;
    out.terminal_miss = std::fabs(last[0]);
    out.iterations = it;
    return out;
}

OracleSolution shoot_thermal(const FlowParams& p, const OracleSolution& F, double h) {
    p.validate();
    const int n = steps_for(h);
    if (F.kind != OracleKind::Velocity || static_cast<int>(F.steps()) != n)
        throw Error(ErrorCode::InvalidParams, "shoot_thermal needs the velocity oracle on the same grid");
    const CoupledRhs rhs = coupled_rhs(p);
    const double s = F.shooting_parameter;
    auto terminal = [&](double t0) { return integrate<5>({1.0, 0.0, s, t0, 0.0}, n, rhs, [](int, const V5&) {})[3]; };

    const double t_a = terminal(0.0), t_b = terminal(1.0);
    const double slope = t_b - t_a;
    if (slope == 0.0 || std::fabs(slope) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(t_a), std::fabs(t_b)))
        throw Error(ErrorCode::DegenerateHomogeneous, "homogeneous thermal solutions coincide at eta = 1");
    const double theta0 = -t_a / slope;

    OracleSolution out;
    out.kind = OracleKind::Temperature;
    out.h = 1.0 / n;
    out.eta.resize(n + 1);
    out.y.resize(n + 1);
    out.dy.resize(n + 1);
    out.d2y.resize(n + 1);
    const V5 last = integrate<5>({1.0, 0.0, s, theta0, 0.0}, n, rhs, [&](int i, const V5& v) {
        out.eta[i] = static_cast<double>(i) / n;
        out.y[i] = v[3];
        out.dy[i] = v[4];
        out.d2y[i] = rhs(0.0, v)[4];
    });
    out.shooting_parameter = theta0;
    out.terminal_miss = std::fabs(last[3]);
    if (!(out.terminal_miss <= 1e-12))
        throw Error(ErrorCode::ShootingDiverged, "thermal superposition failed the terminal check |theta(1)| <= 1e-12");
    out.iterations = 3;
    return out;
}

void write_oracle_csv(std::ostream& os, const OracleSolution& s) {
    const bool vel = s.kind == OracleKind::Velocity;
    os << (vel ? "eta,F,dF,d2F\n" : "eta,theta,dtheta\n");
    char buf[128];
    for (std::size_t i = 0; i < s.eta.size(); ++i) {
        if (vel)
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.eta[i], s.y[i], s.dy[i], s.d2y[i]);
        else
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.eta[i], s.y[i], s.dy[i]);
        os << buf;
    }
}

}  // namespace jhohpm

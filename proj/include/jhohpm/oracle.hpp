#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "jhohpm/errors.hpp"
#include "jhohpm/model.hpp"

namespace jhohpm {

// Classical RK4 increment (h/6)(k1 + 2k2 + 2k3 + k4).
template <std::size_t N, class Deriv>
std::array<double, N> rk4_increment(const std::array<double, N>& y, double eta, double h, Deriv&& f) {
    auto axpy = [](const std::array<double, N>& a, double s, const std::array<double, N>& b) {
        std::array<double, N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const std::array<double, N> k1 = f(eta, y);
    const std::array<double, N> k2 = f(eta + 0.5 * h, axpy(y, 0.5 * h, k1));
    const std::array<double, N> k3 = f(eta + 0.5 * h, axpy(y, 0.5 * h, k2));
    const std::array<double, N> k4 = f(eta + h, axpy(y, h, k3));
    std::array<double, N> d;
    for (std::size_t i = 0; i < N; ++i) d[i] = (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return d;
}

// Classical RK4 update. Throws NonFiniteState if the result is not finite.
template <std::size_t N, class Deriv>
std::array<double, N> rk4_step(const std::array<double, N>& y, double eta, double h, Deriv&& f) {
    const std::array<double, N> d = rk4_increment(y, eta, h, f);
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + d[i];
        if (!std::isfinite(out[i])) throw Error(ErrorCode::NonFiniteState, "RK4 state became non-finite");
    }
    return out;
}

// RK4 with Kahan-compensated accumulation of the increments; over thousands of steps the
// rounding of y + d otherwise swamps the O(h^4) differences between neighbouring grids.
template <std::size_t N>
struct CompensatedRk4 {
    std::array<double, N> y{};
    std::array<double, N> carry{};

    template <class Deriv>
    void step(double eta, double h, Deriv&& f) {
        const std::array<double, N> d = rk4_increment(y, eta, h, f);
        for (std::size_t i = 0; i < N; ++i) {
            const double adj = d[i] - carry[i];
            const double t = y[i] + adj;
            if (!std::isfinite(t)) throw Error(ErrorCode::NonFiniteState, "RK4 state became non-finite");
            carry[i] = (t - y[i]) - adj;
            y[i] = t;
        }
    }
};

enum class OracleKind { Velocity, Temperature };

struct OracleSolution {
    OracleKind kind = OracleKind::Velocity;
    double h = 0.0;
    std::vector<double> eta;
    std::vector<double> y;    // F or theta
    std::vector<double> dy;   // F' or theta'
    std::vector<double> d2y;  // F'' or theta''
    double shooting_parameter = 0.0;  // F''(0) or theta(0)
    double terminal_miss = 0.0;       // |F(1)| or |theta(1)|
    int iterations = 0;

    std::size_t steps() const noexcept { return eta.empty() ? 0 : eta.size() - 1; }
    // Grid value at a node, cubic Hermite in between.
    double value_at(double x) const;
};

struct ShootingOptions {
    double bracket_lo = -30.0;
    double bracket_hi = 0.0;
    double tolerance = 1e-12;
    int max_iterations = 100;
};

// Number of steps n with h = 1/n; throws InvalidParams otherwise.
int steps_for(double h);

// F(1) for the initial-value problem F(0)=1, F'(0)=0, F''(0)=s.
double velocity_terminal_value(const FlowParams& p, double s, double h);

OracleSolution shoot_velocity(const FlowParams& p, double h, const ShootingOptions& opt = {});
OracleSolution shoot_thermal(const FlowParams& p, const OracleSolution& F, double h);

// eta,F,dF,d2F or eta,theta,dtheta with 17 significant digits.
void write_oracle_csv(std::ostream& os, const OracleSolution& s);

}  // namespace jhohpm

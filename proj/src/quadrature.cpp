#include "jhohpm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include <gsl/gsl_integration.h>

#include "jhohpm/errors.hpp"

namespace jhohpm {

std::string_view to_string(QuadratureKind k) noexcept {
    return k == QuadratureKind::GaussLegendre ? "gauss-legendre" : "collocation";
}

QuadratureKind quadrature_kind_from_string(std::string_view s) {
    if (s == "gauss-legendre" || s == "gl") return QuadratureKind::GaussLegendre;
    if (s == "collocation") return QuadratureKind::Collocation;
    throw Error(ErrorCode::InvalidSpec, "unknown quadrature '" + std::string(s) + "'");
}

void Quadrature::validate() const {
    if (nodes.empty() || nodes.size() != weights.size())
        throw Error(ErrorCode::InvalidSpec, "quadrature needs matching, non-empty node and weight lists");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i] > 0.0 && nodes[i] < 1.0)) throw Error(ErrorCode::InvalidSpec, "quadrature node outside (0, 1)");
        if (!(weights[i] > 0.0)) throw Error(ErrorCode::InvalidSpec, "quadrature weight not positive");
    }
    const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (std::fabs(sum - 1.0) > 1e-12) throw Error(ErrorCode::InvalidSpec, "quadrature weights do not sum to 1");
}

Quadrature gauss_legendre_01(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidSpec, "Gauss-Legendre needs n >= 1");
    std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
        gsl_integration_fixed_alloc(gsl_integration_fixed_legendre, static_cast<std::size_t>(n), 0.0, 1.0, 0.0, 0.0),
        &gsl_integration_fixed_free);
    if (!ws) throw Error(ErrorCode::InvalidSpec, "Gauss-Legendre rule allocation failed");
    const double* x = gsl_integration_fixed_nodes(ws.get());
    const double* w = gsl_integration_fixed_weights(ws.get());
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < n; ++i) pts.emplace_back(x[i], w[i]);
    std::sort(pts.begin(), pts.end());
    Quadrature q;
    q.kind = QuadratureKind::GaussLegendre;
    for (auto [xi, wi] : pts) {
        q.nodes.push_back(xi);
        q.weights.push_back(wi);
    }
    return q;
}

Quadrature uniform_collocation(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidSpec, "collocation needs n >= 1");
    Quadrature q;
    q.kind = QuadratureKind::Collocation;
    for (int i = 0; i < n; ++i) {
        q.nodes.push_back((i + 0.5) / n);
        q.weights.push_back(1.0 / n);
    }
    return q;
}

Quadrature make_quadrature(QuadratureKind kind, int n) {
    return kind == QuadratureKind::GaussLegendre ? gauss_legendre_01(n) : uniform_collocation(n);
}

}  // namespace jhohpm

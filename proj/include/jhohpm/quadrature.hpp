#pragma once

#include <string_view>
#include <vector>

namespace jhohpm {

enum class QuadratureKind { GaussLegendre, Collocation };

std::string_view to_string(QuadratureKind k) noexcept;
QuadratureKind quadrature_kind_from_string(std::string_view s);

// Nodes strictly inside (0, 1), positive weights summing to 1.
struct Quadrature {
    QuadratureKind kind = QuadratureKind::GaussLegendre;
    std::vector<double> nodes;
    std::vector<double> weights;

    // Throws InvalidSpec.
    void validate() const;
};

Quadrature gauss_legendre_01(int n);
// n uniform cells, one node at each midpoint (i + 1/2)/n, equal weights.
Quadrature uniform_collocation(int n);
Quadrature make_quadrature(QuadratureKind kind, int n);

}  // namespace jhohpm

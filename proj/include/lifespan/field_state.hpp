#pragma once

#include <vector>

namespace lifespan {

enum class BoundaryKind { Dirichlet, Neumann };

// Discretized radial solution: k components sampled on the uniform mesh
// r_i = i h, i = 0..m-1, truncated at r_dom = (m-1) h. Entries are
// nonnegative and finite until a blow-up is declared.
struct FieldState {
    double t = 0.0;
    int k = 1;
    int n = 1;
    double h = 1.0 / 512.0;
    BoundaryKind boundary = BoundaryKind::Dirichlet;
    std::vector<std::vector<double>> u;  // k rows of m nodes

    int m() const { return u.empty() ? 0 : static_cast<int>(u[0].size()); }
    double r_dom() const { return (m() - 1) * h; }
    double r(int i) const { return i * h; }
};

}  // namespace lifespan

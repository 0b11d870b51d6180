#pragma once

#include <functional>

#include "hyiga/assembly.hpp"

namespace hyiga {

/// Everything produced by one linear static analysis.
struct Solution {
    Mesh mesh;
    Material material;
    Formulation formulation = Formulation::conventional;
    ElementOptions options;
    GlobalSystem system;  // with loads and constraint flags applied
    VectorXd u;           // full control-point displacement vector
    SolveReport report;

    int active_dof() const noexcept { return system.n_free(); }
};

inline Solution analyze(const NurbsPatch& patch, const Material& mat, Formulation form, const BoundaryConditions& bcs,
                        const ElementOptions& opt = {}) {
    Solution s{build_mesh(patch), mat, form, opt, {}, {}, {}};
    s.system = assemble(s.mesh, mat, form, opt);
    apply_boundary_conditions(s.system, s.mesh, bcs);
    s.u = solve(apply_dirichlet(s.system), &s.report);
    return s;
}

/// Displacement field at a parametric point.
inline Vec2 displacement_at(const NurbsPatch& patch, const VectorXd& u, double xi, double eta) {
    const RationalBasis rb = nurbs_basis_2d(patch, xi, eta);
    Vec2 out = Vec2::Zero();
    for (std::size_t k = 0; k < rb.size(); ++k) {
        out.x() += rb.values[k] * u(2 * rb.indices[k]);
        out.y() += rb.values[k] * u(2 * rb.indices[k] + 1);
    }
    return out;
}

inline Vec2 displacement_at(const Solution& s, double xi, double eta) {
    return displacement_at(s.mesh.patch, s.u, xi, eta);
}

/// Reference displacement given the parametric and the physical point.
using ReferenceField = std::function<Vec2(double xi, double eta, const Vec2& x)>;

/// sqrt(int |u_h - u_ref|^2 / int |u_ref|^2) with element Gauss quadrature
/// (the stiffness rule unless `quadrature_points` > 0).
inline double relative_L2_error(const NurbsPatch& patch, const VectorXd& u, const ReferenceField& ref,
                                int quadrature_points = 0) {
    const Mesh mesh = build_mesh(patch);
    const int nx = quadrature_points > 0 ? quadrature_points : patch.degree_u() + 1;
    const int ny = quadrature_points > 0 ? quadrature_points : patch.degree_v() + 1;
    const auto rule = tensor_rule(nx, ny);
    double num = 0.0, den = 0.0;
    for (const Element& e : mesh.elements) {
        for (const QuadPoint2& qp : rule) {
            const Jacobians jac = jacobians(patch, e, qp.xi, qp.eta);
            const double xi = e.xi_at(qp.xi), eta = e.eta_at(qp.eta);
            Vec2 uh = Vec2::Zero();
            for (std::size_t k = 0; k < jac.basis.size(); ++k) {
                uh.x() += jac.basis.values[k] * u(2 * jac.basis.indices[k]);
                uh.y() += jac.basis.values[k] * u(2 * jac.basis.indices[k] + 1);
            }
            const Vec2 ur = ref(xi, eta, jac.x);
            const double w = qp.weight * jac.detJ;
            num += w * (uh - ur).squaredNorm();
            den += w * ur.squaredNorm();
        }
    }
    if (!(den > 0.0)) {
        throw DomainError("relative_L2_error: reference field has zero norm");
    }
    return std::sqrt(num / den);
}

inline double relative_L2_error(const Solution& s, const ReferenceField& ref, int quadrature_points = 0) {
    return relative_L2_error(s.mesh.patch, s.u, ref, quadrature_points);
}

}  // namespace hyiga

#pragma once

#include <vector>

#include "hyiga/nurbs_patch.hpp"

namespace hyiga {

/// One nonzero knot-span product.
struct Element {
    int id = 0;
    int span_u = 0;
    int span_v = 0;
    double xi0 = 0.0, xi1 = 0.0;
    double eta0 = 0.0, eta1 = 0.0;
    std::vector<int> cps;  // global control points, u index fastest

    int n_dof() const noexcept { return 2 * static_cast<int>(cps.size()); }

    // master [-1,1]^2 -> parametric
    double xi_at(double m) const noexcept { return 0.5 * ((xi1 - xi0) * m + (xi1 + xi0)); }
    double eta_at(double m) const noexcept { return 0.5 * ((eta1 - eta0) * m + (eta1 + eta0)); }
    double master_xi(double xi) const noexcept { return (2.0 * xi - (xi1 + xi0)) / (xi1 - xi0); }
    double master_eta(double eta) const noexcept { return (2.0 * eta - (eta1 + eta0)) / (eta1 - eta0); }

    bool contains(double xi, double eta, double tol = 1e-12) const noexcept {
        return xi >= xi0 - tol && xi <= xi1 + tol && eta >= eta0 - tol && eta <= eta1 + tol;
    }
};

/// Elements ordered with the u span fastest. Control points, weights and
/// knot vectors live in the patch copy.
struct Mesh {
    NurbsPatch patch;
    std::vector<Element> elements;
    int n_elements_u = 0;
    int n_elements_v = 0;

    int n_cp() const noexcept { return patch.num_control_points(); }
    int n_dof() const noexcept { return 2 * n_cp(); }

    /// Element owning a parametric point (right/top boundaries belong to the
    /// last span).
    const Element& locate(double xi, double eta) const {
        const int su = find_span(patch.basis_u(), xi);
        const int sv = find_span(patch.basis_v(), eta);
        for (const Element& e : elements) {
            if (e.span_u == su && e.span_v == sv) {
                return e;
            }
        }
        throw DomainError("mesh: no element contains the requested parametric point");
    }
};

inline Mesh build_mesh(const NurbsPatch& patch) {
    Mesh mesh;
    mesh.patch = patch;
    const auto& U = patch.basis_u().knots();
    const auto& V = patch.basis_v().knots();
    const int p = patch.degree_u();
    const int q = patch.degree_v();
    const auto spans_u = patch.basis_u().nonzero_spans();
    const auto spans_v = patch.basis_v().nonzero_spans();
    mesh.n_elements_u = static_cast<int>(spans_u.size());
    mesh.n_elements_v = static_cast<int>(spans_v.size());
    int id = 0;
    for (int sv : spans_v) {
        for (int su : spans_u) {
            Element e;
            e.id = id++;
            e.span_u = su;
            e.span_v = sv;
            e.xi0 = U[su];
            e.xi1 = U[su + 1];
            e.eta0 = V[sv];
            e.eta1 = V[sv + 1];
            e.cps.reserve(static_cast<std::size_t>(p + 1) * (q + 1));
            for (int j = sv - q; j <= sv; ++j) {
                for (int i = su - p; i <= su; ++i) {
                    e.cps.push_back(patch.index(i, j));
                }
            }
            mesh.elements.push_back(std::move(e));
        }
    }
    return mesh;
}

}  // namespace hyiga

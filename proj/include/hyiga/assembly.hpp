#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/SparseExtra>

#include "hyiga/element.hpp"

namespace hyiga {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Formulation { conventional, hybrid };

inline std::string to_string(Formulation f) { return f == Formulation::conventional ? "iga" : "hybrid"; }

inline Formulation parse_formulation(const std::string& s) {
    if (s == "iga" || s == "conventional") {
        return Formulation::conventional;
    }
    if (s == "hybrid" || s == "h-iga") {
        return Formulation::hybrid;
    }
    throw ConfigError("unknown formulation '" + s + "' (expected iga or hybrid)");
}

enum class Edge { xi_min, xi_max, eta_min, eta_max };

/// Control points governing one edge of the control grid. With open knot
/// vectors these are exactly the points that shape that boundary.
inline std::vector<int> edge_control_points(const NurbsPatch& patch, Edge edge) {
    std::vector<int> out;
    const int nu = patch.num_u();
    const int nv = patch.num_v();
    switch (edge) {
        case Edge::xi_min:
        case Edge::xi_max: {
            const int i = edge == Edge::xi_min ? 0 : nu - 1;
            for (int j = 0; j < nv; ++j) {
                out.push_back(patch.index(i, j));
            }
            break;
        }
        case Edge::eta_min:
        case Edge::eta_max: {
            const int j = edge == Edge::eta_min ? 0 : nv - 1;
            for (int i = 0; i < nu; ++i) {
                out.push_back(patch.index(i, j));
            }
            break;
        }
    }
    return out;
}

struct FixedEdge {
    Edge edge;
    bool fix_x = true;
    bool fix_y = true;
};

/// Traction as a function of the physical point and the outward unit normal.
using TractionFn = std::function<Vec2(const Vec2& x, const Vec2& normal)>;

struct TractionEdge {
    Edge edge;
    TractionFn traction;
    int quadrature_points = 0;  // per boundary span; 0 selects degree + 3
};

struct PointLoad {
    int control_point;
    Vec2 force;
};

struct BoundaryConditions {
    std::vector<FixedEdge> fixed;
    std::vector<TractionEdge> tractions;
    std::vector<PointLoad> point_loads;
};

struct GlobalSystem {
    SparseMatrix K;
    VectorXd f;
    std::vector<char> constrained;  // per dof

    int n_dof() const noexcept { return static_cast<int>(f.size()); }
    int n_free() const noexcept {
        return n_dof() - static_cast<int>(std::count(constrained.begin(), constrained.end(), 1));
    }
};

/// Scatter-adds element stiffness matrices into the global sparse matrix.
/// Element order is fixed, so the result is deterministic.
inline GlobalSystem assemble(const Mesh& mesh, const Material& mat, Formulation form, const ElementOptions& opt = {}) {
    const int n = mesh.n_dof();
    GlobalSystem sys;
    sys.f = VectorXd::Zero(n);
    sys.constrained.assign(n, 0);

    std::optional<StressBasis> sb;
    if (form == Formulation::hybrid) {
        if (mesh.patch.degree_u() != mesh.patch.degree_v()) {
            throw ConfigError("hybrid formulation requires equal degrees in both directions");
        }
        sb = stress_basis_for_degree(mesh.patch.degree_u());
    }

    std::vector<Eigen::Triplet<double>> trips;
    for (const Element& e : mesh.elements) {
        MatrixXd Ke;
        VectorXd fe;
        if (form == Formulation::hybrid) {
            ElementSystem es = element_matrices_hybrid(mesh.patch, e, mat, *sb, opt);
            Ke = std::move(es.K);
            fe = std::move(es.f);
        } else {
            ConventionalSystem cs = element_matrices_conventional(mesh.patch, e, mat, opt);
            Ke = std::move(cs.K);
            fe = std::move(cs.f);
        }
        const int nl = static_cast<int>(e.cps.size());
        for (int a = 0; a < nl; ++a) {
            for (int ca = 0; ca < 2; ++ca) {
                const int ga = 2 * e.cps[a] + ca;
                sys.f(ga) += fe(2 * a + ca);
                for (int b = 0; b < nl; ++b) {
                    for (int cb = 0; cb < 2; ++cb) {
                        trips.emplace_back(ga, 2 * e.cps[b] + cb, Ke(2 * a + ca, 2 * b + cb));
                    }
                }
            }
        }
    }
    sys.K.resize(n, n);
    sys.K.setFromTriplets(trips.begin(), trips.end());
    return sys;
}

namespace detail {

struct EdgeParam {
    bool along_u;  // edge parametrized by xi
    double fixed;  // the constant parametric coordinate
    double sign;   // orientation of the outward normal relative to the interior direction
};

inline EdgeParam edge_param(const NurbsPatch& patch, Edge edge) {
    switch (edge) {
        case Edge::xi_min:
            return {false, patch.basis_u().front(), -1.0};
        case Edge::xi_max:
            return {false, patch.basis_u().back(), 1.0};
        case Edge::eta_min:
            return {true, patch.basis_v().front(), -1.0};
        case Edge::eta_max:
        default:
            return {true, patch.basis_v().back(), 1.0};
    }
}

}  // namespace detail

/// Consistent nodal forces of a boundary traction, integrated span by span
/// along the edge.
inline void apply_traction(GlobalSystem& sys, const Mesh& mesh, const TractionEdge& bc) {
    const NurbsPatch& patch = mesh.patch;
    const detail::EdgeParam ep = detail::edge_param(patch, bc.edge);
    const KnotVector& kv = ep.along_u ? patch.basis_u() : patch.basis_v();
    const int n_gauss = bc.quadrature_points > 0 ? bc.quadrature_points : kv.degree() + 3;
    const GaussRule rule = gauss_legendre(n_gauss);
    const auto breaks = kv.unique_knots();
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        for (std::size_t g = 0; g < rule.size(); ++g) {
            const double t = 0.5 * ((b - a) * rule.points[g] + (a + b));
            const double xi = ep.along_u ? t : ep.fixed;
            const double eta = ep.along_u ? ep.fixed : t;
            const RationalBasis rb = nurbs_basis_2d(patch, xi, eta);
            const Mat2 J1 = parametric_jacobian(patch, rb);
            Vec2 x = Vec2::Zero();
            for (std::size_t k = 0; k < rb.size(); ++k) {
                x += rb.values[k] * patch.control_points()[rb.indices[k]];
            }
            const Vec2 tangent = ep.along_u ? Vec2(J1.row(0).transpose()) : Vec2(J1.row(1).transpose());
            const Vec2 across = ep.along_u ? Vec2(J1.row(1).transpose()) : Vec2(J1.row(0).transpose());
            const double len = tangent.norm();
            Vec2 normal(tangent.y(), -tangent.x());
            normal /= len;
            if (normal.dot(across) * ep.sign < 0.0) {
                normal = -normal;
            }
            const Vec2 tr = bc.traction(x, normal);
            if (!std::isfinite(tr.x()) || !std::isfinite(tr.y())) {
                std::ostringstream msg;
                msg << "apply_traction: non-finite traction at (" << x.x() << ", " << x.y() << ")";
                throw InputError(msg.str());
            }
            const double w = rule.weights[g] * 0.5 * (b - a) * len;
            for (std::size_t k = 0; k < rb.size(); ++k) {
                if (rb.values[k] == 0.0) {
                    continue;
                }
                sys.f(2 * rb.indices[k]) += rb.values[k] * tr.x() * w;
                sys.f(2 * rb.indices[k] + 1) += rb.values[k] * tr.y() * w;
            }
        }
    }
}

inline void apply_point_load(GlobalSystem& sys, const PointLoad& load) {
    sys.f(2 * load.control_point) += load.force.x();
    sys.f(2 * load.control_point + 1) += load.force.y();
}

inline void constrain(GlobalSystem& sys, const Mesh& mesh, const FixedEdge& bc) {
    for (int cp : edge_control_points(mesh.patch, bc.edge)) {
        if (bc.fix_x) {
            sys.constrained[2 * cp] = 1;
        }
        if (bc.fix_y) {
            sys.constrained[2 * cp + 1] = 1;
        }
    }
}

/// Adds all loads and marks all homogeneous constraints.
inline void apply_boundary_conditions(GlobalSystem& sys, const Mesh& mesh, const BoundaryConditions& bcs) {
    for (const auto& t : bcs.tractions) {
        apply_traction(sys, mesh, t);
    }
    for (const auto& p : bcs.point_loads) {
        apply_point_load(sys, p);
    }
    for (const auto& c : bcs.fixed) {
        constrain(sys, mesh, c);
    }
}

struct ReducedSystem {
    SparseMatrix K;
    VectorXd f;
    std::vector<int> free_dofs;  // reduced index -> global dof
    int n_total = 0;

    VectorXd expand(const VectorXd& u_free) const {
        VectorXd u = VectorXd::Zero(n_total);
        for (std::size_t k = 0; k < free_dofs.size(); ++k) {
            u(free_dofs[k]) = u_free(static_cast<Eigen::Index>(k));
        }
        return u;
    }
};

/// Eliminates the constrained rows and columns (homogeneous data).
inline ReducedSystem apply_dirichlet(const GlobalSystem& sys) {
    const int n = sys.n_dof();
    std::vector<int> map(n, -1);
    ReducedSystem red;
    red.n_total = n;
    for (int i = 0; i < n; ++i) {
        if (!sys.constrained[i]) {
            map[i] = static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    }
    if (red.free_dofs.empty()) {
        throw ConfigError("apply_dirichlet: every degree of freedom is constrained");
    }
    const int nf = static_cast<int>(red.free_dofs.size());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(sys.K.nonZeros());
    for (int col = 0; col < sys.K.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(sys.K, col); it; ++it) {
            const int r = map[it.row()];
            const int c = map[it.col()];
            if (r >= 0 && c >= 0) {
                trips.emplace_back(r, c, it.value());
            }
        }
    }
    red.K.resize(nf, nf);
    red.K.setFromTriplets(trips.begin(), trips.end());
    red.f.resize(nf);
    for (int k = 0; k < nf; ++k) {
        red.f(k) = sys.f(red.free_dofs[k]);
    }
    return red;
}

struct SolveReport {
    double relative_residual = 0.0;
    int refinement_steps = 0;
};

/// Sparse LDL^T solve with a couple of iterative-refinement sweeps. Returns
/// the full displacement vector (zeros on constrained dofs).
inline VectorXd solve(const ReducedSystem& red, SolveReport* report = nullptr) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    ldlt.compute(red.K);
    const auto fail = [&](const std::string& why) {
        long worst = -1;
        if (ldlt.info() == Eigen::Success || ldlt.vectorD().size() > 0) {
            const VectorXd D = ldlt.vectorD();
            Eigen::Index k = 0;
            D.minCoeff(&k);
            const auto& idx = ldlt.permutationP().indices();
            for (Eigen::Index i = 0; i < idx.size(); ++i) {
                if (idx(i) == k) {
                    worst = red.free_dofs[static_cast<std::size_t>(i)];
                }
            }
        }
        std::ostringstream msg;
        msg << "solve: " << why;
        if (worst >= 0) {
            msg << " (lowest pivot at dof " << worst << ", control point " << worst / 2 << ", component "
                << (worst % 2 == 0 ? "x" : "y") << ")";
        }
        throw SingularSystemError(msg.str(), worst);
    };
    if (ldlt.info() != Eigen::Success) {
        fail("factorization failed");
    }
    if (!(ldlt.vectorD().minCoeff() > 0.0)) {
        fail("stiffness matrix is not positive definite");
    }
    VectorXd u = ldlt.solve(red.f);
    const double fnorm = red.f.norm();
    double rel = fnorm > 0.0 ? (red.K * u - red.f).norm() / fnorm : (red.K * u).norm();
    int steps = 0;
    while (rel > 1e-14 && steps < 3) {
        u += ldlt.solve(red.f - red.K * u);
        rel = fnorm > 0.0 ? (red.K * u - red.f).norm() / fnorm : (red.K * u).norm();
        ++steps;
    }
    if (!std::isfinite(rel)) {
        fail("non-finite solution");
    }
    if (report) {
        report->relative_residual = rel;
        report->refinement_steps = steps;
    }
    return red.expand(u);
}

/// K u - f on every dof; nonzero entries sit on constrained dofs only.
inline VectorXd reactions(const GlobalSystem& sys, const VectorXd& u) {
    VectorXd r = sys.K * u - sys.f;
    for (int i = 0; i < sys.n_dof(); ++i) {
        if (!sys.constrained[i]) {
            r(i) = 0.0;
        }
    }
    return r;
}

inline void export_matrix_market(const SparseMatrix& K, const std::string& path) {
    if (!Eigen::saveMarket(K, path)) {
        throw InputError("cannot write Matrix Market file '" + path + "'");
    }
}

}  // namespace hyiga

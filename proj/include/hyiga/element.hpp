#pragma once

#include <functional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hyiga/material.hpp"
#include "hyiga/mesh.hpp"
#include "hyiga/quadrature.hpp"
#include "hyiga/stress_basis.hpp"

namespace hyiga {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Where the stress transformation T is evaluated. Freezing J at the element
/// centre keeps constant stress states in the stress space of distorted
/// elements; the pointwise variant fails the patch test there.
enum class TEval { per_point, centroid };

inline std::string to_string(TEval t) { return t == TEval::per_point ? "per_point" : "centroid"; }

inline TEval parse_t_eval(const std::string& s) {
    if (s == "per_point" || s == "per-point") {
        return TEval::per_point;
    }
    if (s == "centroid") {
        return TEval::centroid;
    }
    throw ConfigError("unknown t_eval '" + s + "' (expected per_point or centroid)");
}

using BodyForce = std::function<Vec2(const Vec2&)>;

struct ElementOptions {
    TEval t_eval = TEval::centroid;
    int quadrature_points = 0;  // per direction; 0 selects degree + 1
    BodyForce body_force;       // optional
};

inline int quadrature_count(const NurbsPatch& patch, const ElementOptions& opt, Direction d) {
    if (opt.quadrature_points > 0) {
        return opt.quadrature_points;
    }
    return (d == Direction::u ? patch.degree_u() : patch.degree_v()) + 1;
}

struct Jacobians {
    Mat2 J1;  // parametric -> physical
    Mat2 J2;  // master -> parametric (constant per element)
    Mat2 J;   // J2 * J1, master -> physical
    double detJ = 0.0;
    RationalBasis basis;
    Vec2 x;  // physical point
};

/// Jacobians at a master-space point. Rows of each Jacobian are derivatives
/// with respect to the source coordinates.
inline Jacobians jacobians(const NurbsPatch& patch, const Element& e, double xi_m, double eta_m) {
    Jacobians out;
    out.basis = nurbs_basis_2d(patch, e.xi_at(xi_m), e.eta_at(eta_m));
    out.J1 = parametric_jacobian(patch, out.basis);
    out.J2 = Mat2::Zero();
    out.J2(0, 0) = 0.5 * (e.xi1 - e.xi0);
    out.J2(1, 1) = 0.5 * (e.eta1 - e.eta0);
    out.J = out.J2 * out.J1;
    out.detJ = out.J.determinant();
    out.x = Vec2::Zero();
    for (std::size_t a = 0; a < out.basis.size(); ++a) {
        out.x += out.basis.values[a] * patch.control_points()[out.basis.indices[a]];
    }
    if (!(out.detJ > 0.0)) {
        std::ostringstream msg;
        msg << "element " << e.id << ": non-positive Jacobian determinant " << out.detJ << " at master point ("
            << xi_m << ", " << eta_m << ")";
        throw MeshError(msg.str());
    }
    return out;
}

/// Maps master-space stress components (tau_xixi, tau_etaeta, tau_xieta) to
/// physical (xx, yy, xy): sigma = J^T tau J in tensor form.
inline Mat3 transformation_T(const Mat2& J) {
    const double j11 = J(0, 0), j12 = J(0, 1), j21 = J(1, 0), j22 = J(1, 1);
    Mat3 T;
    T << j11 * j11, j21 * j21, 2.0 * j11 * j21,
         j12 * j12, j22 * j22, 2.0 * j12 * j22,
         j11 * j12, j21 * j22, j11 * j22 + j12 * j21;
    return T;
}

/// Strain-displacement matrix for (eps_xx, eps_yy, gamma_xy); dofs are
/// (u_x, u_y) per control point in element order.
inline MatrixXd strain_displacement_B(const Jacobians& jac) {
    const Eigen::FullPivLU<Mat2> lu(jac.J1);
    if (!lu.isInvertible()) {
        throw ElementError("strain_displacement_B: singular parametric Jacobian");
    }
    const Mat2 J1inv = lu.inverse();
    const std::size_t n = jac.basis.size();
    MatrixXd B = MatrixXd::Zero(3, 2 * static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) {
        const Vec2 dpar(jac.basis.d_dxi[a], jac.basis.d_deta[a]);
        const Vec2 dphys = J1inv * dpar;
        const Eigen::Index c = 2 * static_cast<Eigen::Index>(a);
        B(0, c) = dphys.x();
        B(1, c + 1) = dphys.y();
        B(2, c) = dphys.y();
        B(2, c + 1) = dphys.x();
    }
    return B;
}

inline MatrixXd strain_displacement_B(const NurbsPatch& patch, const Element& e, double xi_m, double eta_m) {
    return strain_displacement_B(jacobians(patch, e, xi_m, eta_m));
}

/// Physical stress interpolation T * P at a master point.
inline MatrixXd physical_stress_interpolation(const NurbsPatch& patch, const Element& e, const StressBasis& sb,
                                              TEval t_eval, double xi_m, double eta_m, const Mat2& J_here) {
    const Mat2 J = t_eval == TEval::centroid ? jacobians(patch, e, 0.0, 0.0).J : J_here;
    return transformation_T(J) * sb.evaluate(xi_m, eta_m);
}

struct ElementSystem {
    MatrixXd G;     // n_beta x n_dof
    MatrixXd H;     // n_beta x n_beta, SPD
    MatrixXd K;     // n_dof x n_dof, G^T H^-1 G
    VectorXd f;     // consistent body load
    MatrixXd beta;  // H^-1 G: stress parameters from element displacements
};

inline VectorXd element_body_load(const Jacobians& jac, double w, const BodyForce& bf) {
    VectorXd f = VectorXd::Zero(2 * static_cast<Eigen::Index>(jac.basis.size()));
    if (!bf) {
        return f;
    }
    const Vec2 b = bf(jac.x);
    for (std::size_t a = 0; a < jac.basis.size(); ++a) {
        f(2 * a) += jac.basis.values[a] * b.x() * w;
        f(2 * a + 1) += jac.basis.values[a] * b.y() * w;
    }
    return f;
}

inline ElementSystem element_matrices_hybrid(const NurbsPatch& patch, const Element& e, const Material& mat,
                                             const StressBasis& sb, const ElementOptions& opt = {}) {
    const Mat3 S = compliance_matrix(mat);
    const auto rule = tensor_rule(quadrature_count(patch, opt, Direction::u), quadrature_count(patch, opt, Direction::v));
    const Eigen::Index nb = sb.n_beta();
    const Eigen::Index nd = e.n_dof();

    Mat2 J_centroid = Mat2::Zero();
    if (opt.t_eval == TEval::centroid) {
        J_centroid = jacobians(patch, e, 0.0, 0.0).J;
    }

    ElementSystem sys;
    sys.G = MatrixXd::Zero(nb, nd);
    sys.H = MatrixXd::Zero(nb, nb);
    sys.f = VectorXd::Zero(nd);
    for (const QuadPoint2& qp : rule) {
        const Jacobians jac = jacobians(patch, e, qp.xi, qp.eta);
        const double w = qp.weight * jac.detJ;
        const MatrixXd B = strain_displacement_B(jac);
        const Mat3 T = transformation_T(opt.t_eval == TEval::centroid ? J_centroid : jac.J);
        const MatrixXd Pphys = T * sb.evaluate(qp.xi, qp.eta);
        sys.G.noalias() += w * Pphys.transpose() * B;
        sys.H.noalias() += w * Pphys.transpose() * S * Pphys;
        sys.f += element_body_load(jac, w, opt.body_force);
    }
    sys.H = 0.5 * (sys.H + sys.H.transpose());

    const Eigen::LLT<MatrixXd> llt(sys.H);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "element " << e.id << ": H is not positive definite (stress basis rank-deficient or degenerate geometry)";
        throw FormulationError(msg.str());
    }
    sys.beta = llt.solve(sys.G);
    const MatrixXd X = llt.matrixL().solve(sys.G);
    sys.K = X.transpose() * X;
    sys.K = 0.5 * (sys.K + sys.K.transpose());
    return sys;
}

struct ConventionalSystem {
    MatrixXd K;
    VectorXd f;
};

inline ConventionalSystem element_matrices_conventional(const NurbsPatch& patch, const Element& e,
                                                        const Material& mat, const ElementOptions& opt = {}) {
    const Mat3 C = stiffness_matrix(mat);
    const auto rule = tensor_rule(quadrature_count(patch, opt, Direction::u), quadrature_count(patch, opt, Direction::v));
    ConventionalSystem sys;
    sys.K = MatrixXd::Zero(e.n_dof(), e.n_dof());
    sys.f = VectorXd::Zero(e.n_dof());
    for (const QuadPoint2& qp : rule) {
        const Jacobians jac = jacobians(patch, e, qp.xi, qp.eta);
        const double w = qp.weight * jac.detJ;
        const MatrixXd B = strain_displacement_B(jac);
        sys.K.noalias() += w * B.transpose() * C * B;
        sys.f += element_body_load(jac, w, opt.body_force);
    }
    sys.K = 0.5 * (sys.K + sys.K.transpose());
    return sys;
}

}  // namespace hyiga

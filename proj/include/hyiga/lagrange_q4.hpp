#pragma once

// Textbook four-node quadrilateral elements, written independently of the
// NURBS code as a cross-check: Lagrange shape functions on [-1,1]^2 and a
// hard-coded 2x2 Gauss rule.

#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace hyiga::q4 {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;

// Node order: (-1,-1), (1,-1), (-1,1), (1,1), i.e. the tensor-product order.
inline constexpr std::array<double, 4> kXiNode{-1, 1, -1, 1};
inline constexpr std::array<double, 4> kEtaNode{-1, -1, 1, 1};

struct Q4Point {
    std::array<double, 4> N;
    Matrix2d J;  // rows d/dxi, d/deta of (x, y)
    MatrixXd B;  // 3 x 8
};

inline Q4Point q4_point(const std::array<Vector2d, 4>& xy, double s, double t) {
    Q4Point out;
    std::array<double, 4> dNds{}, dNdt{};
    for (int a = 0; a < 4; ++a) {
        out.N[a] = 0.25 * (1 + kXiNode[a] * s) * (1 + kEtaNode[a] * t);
        dNds[a] = 0.25 * kXiNode[a] * (1 + kEtaNode[a] * t);
        dNdt[a] = 0.25 * kEtaNode[a] * (1 + kXiNode[a] * s);
    }
    out.J.setZero();
    for (int a = 0; a < 4; ++a) {
        out.J(0, 0) += dNds[a] * xy[a].x();
        out.J(0, 1) += dNds[a] * xy[a].y();
        out.J(1, 0) += dNdt[a] * xy[a].x();
        out.J(1, 1) += dNdt[a] * xy[a].y();
    }
    const Matrix2d Jinv = out.J.inverse();
    out.B = MatrixXd::Zero(3, 8);
    for (int a = 0; a < 4; ++a) {
        const double dx = Jinv(0, 0) * dNds[a] + Jinv(0, 1) * dNdt[a];
        const double dy = Jinv(1, 0) * dNds[a] + Jinv(1, 1) * dNdt[a];
        out.B(0, 2 * a) = dx;
        out.B(1, 2 * a + 1) = dy;
        out.B(2, 2 * a) = dy;
        out.B(2, 2 * a + 1) = dx;
    }
    return out;
}

inline MatrixXd q4_stiffness(const std::array<Vector2d, 4>& xy, const Matrix3d& C) {
    const double g = 1.0 / std::sqrt(3.0);
    MatrixXd K = MatrixXd::Zero(8, 8);
    for (double s : {-g, g}) {
        for (double t : {-g, g}) {
            const Q4Point q = q4_point(xy, s, t);
            K += q.B.transpose() * C * q.B * q.J.determinant();
        }
    }
    return K;
}

// Push a symmetric master-space stress tensor to physical space: J^T tau J.
inline Eigen::Vector3d push_stress(const Matrix2d& J, double t11, double t22, double t12) {
    Matrix2d tau;
    tau << t11, t12, t12, t22;
    const Matrix2d sigma = J.transpose() * tau * J;
    return {sigma(0, 0), sigma(1, 1), sigma(0, 1)};
}

// Five-parameter hybrid quadrilateral: tau_11 = b1 + b2 t, tau_22 = b3 + b4 s,
// tau_12 = b5 in master space, pushed forward with J at the point (or at the
// centre when `centroid`).
inline MatrixXd q4_hybrid_stiffness(const std::array<Vector2d, 4>& xy, const Matrix3d& S, bool centroid) {
    const double g = 1.0 / std::sqrt(3.0);
    const Matrix2d J0 = q4_point(xy, 0, 0).J;
    MatrixXd G = MatrixXd::Zero(5, 8);
    MatrixXd H = MatrixXd::Zero(5, 5);
    for (double s : {-g, g}) {
        for (double t : {-g, g}) {
            const Q4Point q = q4_point(xy, s, t);
            const Matrix2d J = centroid ? J0 : q.J;
            MatrixXd P(3, 5);
            P.col(0) = push_stress(J, 1, 0, 0);
            P.col(1) = push_stress(J, t, 0, 0);
            P.col(2) = push_stress(J, 0, 1, 0);
            P.col(3) = push_stress(J, 0, s, 0);
            P.col(4) = push_stress(J, 0, 0, 1);
            const double w = q.J.determinant();
            G += P.transpose() * q.B * w;
            H += P.transpose() * S * P * w;
        }
    }
    return G.transpose() * H.inverse() * G;
}

/// Global stiffness on a structured grid of bilinear elements spanning the
/// quadrilateral with corners c00, c10, c01, c11. Nodes are numbered with
/// the first index fastest.
inline MatrixXd q4_global(const std::array<Vector2d, 4>& corners, int nx, int ny, const Matrix3d& CorS,
                          bool hybrid, bool centroid = false) {
    auto node = [&](int i, int j) {
        const double s = static_cast<double>(i) / nx;
        const double t = static_cast<double>(j) / ny;
        return Vector2d((1 - s) * (1 - t) * corners[0] + s * (1 - t) * corners[1] + (1 - s) * t * corners[2] +
                        s * t * corners[3]);
    };
    const int n_nodes = (nx + 1) * (ny + 1);
    MatrixXd K = MatrixXd::Zero(2 * n_nodes, 2 * n_nodes);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::array<int, 4> ids{j * (nx + 1) + i, j * (nx + 1) + i + 1, (j + 1) * (nx + 1) + i,
                                         (j + 1) * (nx + 1) + i + 1};
            const std::array<Vector2d, 4> xy{node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1)};
            const MatrixXd Ke = hybrid ? q4_hybrid_stiffness(xy, CorS, centroid) : q4_stiffness(xy, CorS);
            for (int a = 0; a < 4; ++a) {
                for (int b = 0; b < 4; ++b) {
                    K.block<2, 2>(2 * ids[a], 2 * ids[b]) += Ke.block<2, 2>(2 * a, 2 * b);
                }
            }
        }
    }
    return K;
}

}  // namespace hyiga::q4

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "hyiga/element.hpp"
#include "hyiga/geometry.hpp"
#include "hyiga/refinement.hpp"
#include "hyiga/lagrange_q4.hpp"
#include "test_util.hpp"

using namespace hyiga;

namespace {

NurbsPatch unit_square() {
    return NurbsPatch(KnotVector(1, {0, 0, 1, 1}), KnotVector(1, {0, 0, 1, 1}), {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
                      {1, 1, 1, 1});
}

NurbsPatch quad(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    return NurbsPatch(KnotVector(1, {0, 0, 1, 1}), KnotVector(1, {0, 0, 1, 1}), {a, b, c, d}, {1, 1, 1, 1});
}

Eigen::VectorXd sorted_abs_eigs(const MatrixXd& K) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
    Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    std::sort(ev.data(), ev.data() + ev.size());
    return ev;
}

int count_zero_modes(const MatrixXd& K, double rel = 1e-9) {
    const Eigen::VectorXd ev = sorted_abs_eigs(K);
    const double scale = ev.maxCoeff();
    int n = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < rel * scale) {
            ++n;
        }
    }
    return n;
}

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// Local displacement vector for a field evaluated at the element's control points.
template <class F>
Eigen::VectorXd nodal_field(const NurbsPatch& patch, const Element& e, F f) {
    Eigen::VectorXd u(e.n_dof());
    for (std::size_t a = 0; a < e.cps.size(); ++a) {
        const Vec2 v = f(patch.control_points()[e.cps[a]]);
        u(2 * a) = v.x();
        u(2 * a + 1) = v.y();
    }
    return u;
}

const Material kSteelish(1000.0, 0.3, Regime::plane_stress);

}  // namespace

TEST(Jacobian, UnitSquareHasQuarterScaling) {
    const NurbsPatch p = unit_square();
    const Mesh m = build_mesh(p);
    const Jacobians j = jacobians(p, m.elements[0], 0.0, 0.0);
    EXPECT_NEAR(j.J1(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(j.J1(1, 1), 1.0, 1e-14);
    EXPECT_NEAR(j.J2(0, 0), 0.5, 1e-14);
    EXPECT_NEAR(j.detJ, 0.25, 1e-14);
    EXPECT_NEAR(j.x.x(), 0.5, 1e-14);
}

TEST(Jacobian, SubdividedElementsShrinkJ2) {
    const NurbsPatch p = subdivide(subdivide(unit_square(), Direction::u, 4), Direction::v, 2);
    const Mesh m = build_mesh(p);
    ASSERT_EQ(m.elements.size(), 8u);
    const Jacobians j = jacobians(p, m.elements[5], 0.3, -0.2);
    EXPECT_NEAR(j.J2(0, 0), 0.125, 1e-14);
    EXPECT_NEAR(j.J2(1, 1), 0.25, 1e-14);
    EXPECT_NEAR(j.detJ, 1.0 / 32.0, 1e-14);
}

TEST(Jacobian, InvertedElementThrows) {
    const NurbsPatch p = quad({0, 0}, {1, 0}, {1, 1}, {0, 1});  // bow-tie ordering
    const Mesh m = build_mesh(p);
    EXPECT_THROW(jacobians(p, m.elements[0], 0.9, 0.9), MeshError);
}

TEST(Transformation, IdentityJacobianGivesIdentity) {
    EXPECT_TRUE(transformation_T(Mat2::Identity()).isApprox(Mat3::Identity(), 1e-15));
}

TEST(Transformation, DiagonalScaling) {
    Mat2 J;
    J << 2, 0, 0, 3;
    const Mat3 T = transformation_T(J);
    EXPECT_DOUBLE_EQ(T(0, 0), 4);
    EXPECT_DOUBLE_EQ(T(1, 1), 9);
    EXPECT_DOUBLE_EQ(T(2, 2), 6);
    EXPECT_DOUBLE_EQ(T(0, 1), 0);
}

TEST(Transformation, MatchesTensorPushForRandomJacobians) {
    for (int trial = 0; trial < 50; ++trial) {
        Mat2 J;
        J << testutil::uniform(-2, 2), testutil::uniform(-2, 2), testutil::uniform(-2, 2), testutil::uniform(-2, 2);
        const Eigen::Vector3d tau(testutil::uniform(-1, 1), testutil::uniform(-1, 1), testutil::uniform(-1, 1));
        const Eigen::Vector3d expect = q4::push_stress(J, tau(0), tau(1), tau(2));
        EXPECT_LT((transformation_T(J) * tau - expect).norm(), 1e-13 * (1 + expect.norm()));
    }
}

TEST(StrainDisplacement, RigidTranslationGivesNoStrain) {
    const NurbsPatch p = testutil::rational_annulus();
    const Mesh m = build_mesh(p);
    const Element& e = m.elements[0];
    const Eigen::VectorXd u = nodal_field(p, e, [](const Vec2&) { return Vec2(0.3, -0.7); });
    for (double s : {-0.8, 0.1, 0.6}) {
        EXPECT_LT((strain_displacement_B(p, e, s, -s) * u).norm(), 1e-12);
    }
}

TEST(StrainDisplacement, LinearFieldIsReproduced) {
    // NURBS reproduce affine fields through their control points
    const NurbsPatch p = testutil::rational_annulus();
    const Mesh m = build_mesh(p);
    const Element& e = m.elements[0];
    const Eigen::VectorXd u =
        nodal_field(p, e, [](const Vec2& x) { return Vec2(0.1 * x.x() + 0.2 * x.y(), -0.3 * x.x() + 0.05 * x.y()); });
    const Eigen::Vector3d expect(0.1, 0.05, 0.2 - 0.3);
    for (double s : {-0.7, 0.0, 0.9}) {
        EXPECT_LT((strain_displacement_B(p, e, s, 0.4) * u - expect).norm(), 1e-12);
    }
}

TEST(StrainDisplacement, MatchesFiniteDifferenceOfSurfaceMap) {
    // perturb a single control point; the displacement gradient is the change
    // in the map's physical gradient, computed by finite differences
    const NurbsPatch p = testutil::rational_annulus();
    const Mesh m = build_mesh(p);
    const Element& e = m.elements[0];
    const double xi = e.xi_at(0.3), eta = e.eta_at(-0.4);
    const Jacobians jac = jacobians(p, e, 0.3, -0.4);
    const MatrixXd B = strain_displacement_B(jac);
    const double h = 1.0;  // the map is linear in control points
    for (std::size_t a = 0; a < e.cps.size(); ++a) {
        for (int comp = 0; comp < 2; ++comp) {
            std::vector<Vec2> cps = p.control_points();
            cps[e.cps[a]](comp) += h;
            const NurbsPatch q(p.basis_u(), p.basis_v(), cps, p.weights());
            auto disp = [&](double s, double t) { return Vec2((surface_point(q, s, t) - surface_point(p, s, t)) / h); };
            const double d = 1e-5;
            const Vec2 du_dxi = (disp(xi + d, eta) - disp(xi - d, eta)) / (2 * d);
            const Vec2 du_deta = (disp(xi, eta + d) - disp(xi, eta - d)) / (2 * d);
            Mat2 G;  // rows: d/dxi, d/deta of (ux, uy)
            G.row(0) = du_dxi.transpose();
            G.row(1) = du_deta.transpose();
            const Mat2 grad = jac.J1.inverse() * G;  // rows d/dx, d/dy
            const Eigen::Vector3d eps(grad(0, 0), grad(1, 1), grad(1, 0) + grad(0, 1));
            EXPECT_LT((B.col(2 * a + comp) - eps).norm(), 1e-8) << "cp " << a << " comp " << comp;
        }
    }
}

TEST(HybridElement, SingleSquareHasThreeRigidModesAndIsSofter) {
    const NurbsPatch p = unit_square();
    const Mesh m = build_mesh(p);
    const auto hyb = element_matrices_hybrid(p, m.elements[0], kSteelish, stress_basis_for_degree(1));
    const auto conv = element_matrices_conventional(p, m.elements[0], kSteelish);
    EXPECT_EQ(count_zero_modes(hyb.K), 3);
    // hybrid strain energy never exceeds the displacement-based one
    const MatrixXd diff = conv.K - hyb.K;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(diff);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10 * max_abs(conv.K));
    EXPECT_LT(hyb.K.trace(), conv.K.trace());
}

TEST(HybridElement, MatchesIndependentQ4Hybrid) {
    const std::array<Vec2, 4> xy{Vec2(0.1, -0.2), Vec2(2.3, 0.4), Vec2(-0.3, 1.7), Vec2(1.9, 2.2)};
    const NurbsPatch p = quad(xy[0], xy[1], xy[2], xy[3]);
    const Mesh m = build_mesh(p);
    const Mat3 S = compliance_matrix(kSteelish);
    for (TEval te : {TEval::per_point, TEval::centroid}) {
        ElementOptions opt;
        opt.t_eval = te;
        const auto hyb = element_matrices_hybrid(p, m.elements[0], kSteelish, stress_basis_for_degree(1), opt);
        const MatrixXd ref = q4::q4_hybrid_stiffness(xy, S, te == TEval::centroid);
        EXPECT_LT(max_abs(hyb.K - ref), 1e-12 * max_abs(ref)) << to_string(te);
    }
}

TEST(ConventionalElement, MatchesIndependentQ4) {
    const std::array<Vec2, 4> xy{Vec2(0.1, -0.2), Vec2(2.3, 0.4), Vec2(-0.3, 1.7), Vec2(1.9, 2.2)};
    const NurbsPatch p = quad(xy[0], xy[1], xy[2], xy[3]);
    const Mesh m = build_mesh(p);
    const auto conv = element_matrices_conventional(p, m.elements[0], kSteelish);
    const MatrixXd ref = q4::q4_stiffness(xy, stiffness_matrix(kSteelish));
    EXPECT_LT(max_abs(conv.K - ref), 1e-12 * max_abs(ref));
}

namespace {

struct RankCase {
    const char* name;
    NurbsPatch patch;
};

std::vector<RankCase> rank_cases() {
    std::vector<RankCase> out;
    const NurbsPatch rect = quad({0, 0}, {3, 0}, {0, 1}, {3, 1});
    const NurbsPatch skew = quad({0, 0}, {2, 0.3}, {0.4, 1.5}, {2.2, 1.9});
    for (int p = 1; p <= 3; ++p) {
        const int t = p - 1;
        NurbsPatch r = t > 0 ? elevate_degree(elevate_degree(rect, Direction::u, t), Direction::v, t) : rect;
        NurbsPatch s = t > 0 ? elevate_degree(elevate_degree(skew, Direction::u, t), Direction::v, t) : skew;
        out.push_back({"rect", r});
        out.push_back({"skew", s});
    }
    const NurbsPatch ann = testutil::rational_annulus();  // degree 2 x 2
    out.push_back({"annulus", ann});
    out.push_back({"annulus3", elevate_degree(elevate_degree(ann, Direction::u, 1), Direction::v, 1)});
    return out;
}

}  // namespace

TEST(ElementRank, ExactlyThreeZeroModesForAllDegrees) {
    for (const RankCase& rc : rank_cases()) {
        const NurbsPatch p = refine_uniform(refine_uniform(rc.patch, Direction::u, 1), Direction::v, 1);
        const Mesh m = build_mesh(p);
        const Element& e = m.elements[3];
        const int deg = p.degree_u();
        const auto hyb = element_matrices_hybrid(p, e, kSteelish, stress_basis_for_degree(deg));
        const auto conv = element_matrices_conventional(p, e, kSteelish);
        EXPECT_EQ(count_zero_modes(hyb.K), 3) << rc.name << " p=" << deg;
        EXPECT_EQ(count_zero_modes(conv.K), 3) << rc.name << " p=" << deg;

        // rigid body modes are in the kernel
        const Eigen::VectorXd rot = nodal_field(p, e, [](const Vec2& x) { return Vec2(-x.y(), x.x()); });
        const Eigen::VectorXd tx = nodal_field(p, e, [](const Vec2&) { return Vec2(1, 0); });
        EXPECT_LT((hyb.K * rot).norm(), 1e-10 * max_abs(hyb.K) * rot.norm()) << rc.name;
        EXPECT_LT((hyb.K * tx).norm(), 1e-10 * max_abs(hyb.K) * tx.norm()) << rc.name;
        EXPECT_LT((conv.K * rot).norm(), 1e-10 * max_abs(conv.K) * rot.norm()) << rc.name;

        // H symmetric positive definite, K symmetric
        Eigen::SelfAdjointEigenSolver<MatrixXd> hs(hyb.H);
        EXPECT_GT(hs.eigenvalues().minCoeff(), 0.0) << rc.name;
        EXPECT_LT(max_abs(hyb.K - hyb.K.transpose()), 1e-14 * max_abs(hyb.K));
    }
}

TEST(HybridElement, ObjectiveUnderRigidRotation) {
    const NurbsPatch base = elevate_degree(elevate_degree(quad({0, 0}, {2, 0.3}, {0.4, 1.5}, {2.2, 1.9}),
                                                          Direction::u, 1),
                                           Direction::v, 1);
    const double th = 0.7;
    Mat2 R;
    R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    std::vector<Vec2> cps = base.control_points();
    for (Vec2& x : cps) {
        x = R * x;
    }
    const NurbsPatch rot(base.basis_u(), base.basis_v(), cps, base.weights());
    const Mesh m0 = build_mesh(base), m1 = build_mesh(rot);
    const auto k0 = element_matrices_hybrid(base, m0.elements[0], kSteelish, stress_basis_for_degree(2)).K;
    const auto k1 = element_matrices_hybrid(rot, m1.elements[0], kSteelish, stress_basis_for_degree(2)).K;
    MatrixXd Q = MatrixXd::Zero(k0.rows(), k0.cols());
    for (Eigen::Index a = 0; a < k0.rows() / 2; ++a) {
        Q.block<2, 2>(2 * a, 2 * a) = R;
    }
    EXPECT_LT(max_abs(Q.transpose() * k1 * Q - k0), 1e-9 * max_abs(k0));
}

TEST(HybridElement, DoubledQuadratureIsExactOnAffineElements) {
    // for affine geometry every integrand is polynomial and (p+1) points suffice
    const NurbsPatch p = elevate_degree(elevate_degree(quad({0, 0}, {2, 0.5}, {0.5, 1}, {2.5, 1.5}), Direction::u, 1),
                                        Direction::v, 1);
    const Mesh m = build_mesh(p);
    ElementOptions twice;
    twice.quadrature_points = 6;
    const auto a = element_matrices_hybrid(p, m.elements[0], kSteelish, stress_basis_for_degree(2));
    const auto b = element_matrices_hybrid(p, m.elements[0], kSteelish, stress_basis_for_degree(2), twice);
    EXPECT_LT(max_abs(a.K - b.K), 1e-10 * max_abs(a.K));
}

TEST(HybridElement, OnePointQuadratureIsRankDeficient) {
    const NurbsPatch p = unit_square();
    const Mesh m = build_mesh(p);
    ElementOptions opt;
    opt.quadrature_points = 1;
    EXPECT_THROW(element_matrices_hybrid(p, m.elements[0], kSteelish, stress_basis_for_degree(1), opt),
                 FormulationError);
}

TEST(HybridElement, BodyLoadSumsToResultant) {
    const NurbsPatch p = testutil::rational_annulus();
    const Mesh m = build_mesh(p);
    ElementOptions opt;
    opt.body_force = [](const Vec2&) { return Vec2(0.0, -2.0); };
    opt.quadrature_points = 16;  // rational integrand
    const auto s = element_matrices_conventional(p, m.elements[0], kSteelish, opt);
    double fy = 0.0;
    for (Eigen::Index i = 1; i < s.f.size(); i += 2) {
        fy += s.f(i);
    }
    const double area = 0.25 * std::numbers::pi * (4.0 - 1.0);
    EXPECT_NEAR(fy, -2.0 * area, 1e-12);
}

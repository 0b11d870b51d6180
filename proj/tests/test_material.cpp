#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "hyiga/material.hpp"
#include "test_util.hpp"

using namespace hyiga;

TEST(MaterialTest, RejectsInvalidConstants) {
    EXPECT_THROW(Material(0.0, 0.3, Regime::plane_stress), ConfigError);
    EXPECT_THROW(Material(1.0, 0.5, Regime::plane_strain), ConfigError);
    EXPECT_THROW(Material(1.0, -1.0, Regime::plane_strain), ConfigError);
    EXPECT_NO_THROW(Material(1.0, 0.4999, Regime::plane_strain));
}

TEST(MaterialTest, UnsetRegimeIsConfigError) {
    const Material m(1.0, 0.3, std::nullopt);
    EXPECT_THROW(stiffness_matrix(m), ConfigError);
    EXPECT_THROW(compliance_matrix(m), ConfigError);
}

TEST(StiffnessMatrix, PlaneStressZeroPoisson) {
    const Mat3 C = stiffness_matrix(Material(1.0, 0.0, Regime::plane_stress));
    EXPECT_TRUE(C.isApprox(Eigen::Vector3d(1, 1, 0.5).asDiagonal().toDenseMatrix()));
    const Mat3 S = compliance_matrix(Material(1.0, 0.0, Regime::plane_stress));
    EXPECT_TRUE(S.isApprox(Eigen::Vector3d(1, 1, 2).asDiagonal().toDenseMatrix()));
}

TEST(StiffnessMatrix, PlaneStrainEntry) {
    const Material m(1000.0, 0.3, Regime::plane_strain);
    const Mat3 C = stiffness_matrix(m);
    // 1000 * 0.7 / (1.3 * 0.4)
    EXPECT_NEAR(C(0, 0), 1346.1538461538462, 1e-9);
    // cross-check against the numerical inverse of the compliance
    EXPECT_NEAR(compliance_matrix(m).inverse()(0, 0), C(0, 0), 1e-9);
}

TEST(StiffnessMatrix, InverseConsistency) {
    for (int k = 0; k < 20; ++k) {
        const double E = testutil::uniform(1.0, 1e4);
        const double nu = testutil::uniform(-0.9, 0.4999);
        for (Regime r : {Regime::plane_stress, Regime::plane_strain}) {
            const Material m(E, nu, r);
            const Mat3 C = stiffness_matrix(m);
            const Mat3 S = compliance_matrix(m);
            EXPECT_LT((C * S - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_LT((S * C - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_EQ(Eigen::LLT<Mat3>(C).info(), Eigen::Success);
            EXPECT_EQ(Eigen::LLT<Mat3>(S).info(), Eigen::Success);
        }
    }
}

TEST(ComplianceMatrix, NearlyIncompressibleStaysPositiveDefinite) {
    const Mat3 S = compliance_matrix(Material(250.0, 0.4999, Regime::plane_strain));
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(S);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    EXPECT_TRUE(std::isfinite(eig.eigenvalues().maxCoeff() / eig.eigenvalues().minCoeff()));
}

TEST(StiffnessMatrix, PlaneStrainStiffensTowardIncompressibility) {
    const double c_soft = stiffness_matrix(Material(1.0, 0.3, Regime::plane_strain))(0, 0);
    const double c_hard = stiffness_matrix(Material(1.0, 0.4999, Regime::plane_strain))(0, 0);
    EXPECT_GT(c_hard / c_soft, 100.0);
}

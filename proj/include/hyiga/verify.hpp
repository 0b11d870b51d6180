#pragma once

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hyiga/benchmarks.hpp"
#include "hyiga/lagrange_q4.hpp"
#include "hyiga/postprocess.hpp"

namespace hyiga::verify {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;
};

inline std::string format_line(const CriterionResult& r) {
    std::ostringstream o;
    o.precision(4);
    o << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ". " << r.title << ": " << r.detail << " | " << r.seconds
      << " s (limit " << r.limit_seconds << " s)";
    return o.str();
}

namespace detail {

struct Check {
    bool ok = true;
    std::ostringstream text;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            text << " FAILED[" << what << "]";
        }
    }
};

inline CriterionResult timed(int id, std::string title, double limit, const std::function<void(Check&)>& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    r.limit_seconds = limit;
    Check c;
    c.text.precision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const std::exception& e) {
        c.ok = false;
        c.text << " exception: " << e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = c.ok && r.seconds < limit;
    r.detail = c.text.str();
    if (!r.detail.empty() && r.detail.front() == ' ') {
        r.detail.erase(0, 1);
    }
    return r;
}

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

inline bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] < v[k - 1])) {
            return false;
        }
    }
    return true;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Tolerances and limits
inline constexpr double kQ4Tolerance = 1e-12;  // relative to max |K|
inline constexpr double kBeamHybridMin = 0.98;
inline constexpr double kBeamConventionalMax = 0.9;
inline constexpr double kCurvedBeamBand = 0.02;
inline constexpr double kCookHybridBand = 0.05;
inline constexpr double kCookQ4Max = 0.6;
inline constexpr double kPlateNeutralBand = 0.2;
inline constexpr double kPlateSlopeTarget = -2.0;  // -(p+1)/2 for p = 3
inline constexpr double kPlateSlopeBand = 0.5;
inline constexpr double kPlateLockingRatio = 0.5;
inline constexpr double kPatchTolerance = 1e-10;
inline constexpr double kEquilibriumTolerance = 1e-8;
inline constexpr double kExactFieldTolerance = 1e-6;

inline constexpr double kLimit1 = 1.0, kLimit2 = 5.0, kLimit3 = 5.0, kLimit4 = 30.0, kLimit5 = 60.0, kLimit6 = 60.0,
                        kLimit7 = 30.0;

inline CriterionResult q4_identity() {
    return detail::timed(1, "Q4 identity (degree-1 IGA vs bilinear Lagrange FE, 4x4)", kLimit1, [](detail::Check& c) {
        const Material mat(1000.0, 0.3, Regime::plane_stress);
        const NurbsPatch p = k_refine(geometry::cook_membrane(), 1, 4, 4);
        const MatrixXd K(assemble(build_mesh(p), mat, Formulation::conventional).K);
        const std::array<Vec2, 4> corners{Vec2(0, 0), Vec2(48, 44), Vec2(0, 44), Vec2(48, 60)};
        const MatrixXd ref = q4::q4_global(corners, 4, 4, stiffness_matrix(mat), false);
        const double rel = detail::max_abs(K - ref) / detail::max_abs(ref);
        c.text << "max|K_iga - K_q4| / max|K_q4| = " << rel << " (tol " << kQ4Tolerance << ")";
        c.expect(rel <= kQ4Tolerance, "entry-wise identity");
    });
}

inline CriterionResult straight_beam() {
    return detail::timed(2, "Straight beam, 4x1 quadratic", kLimit2, [](detail::Check& c) {
        for (double s : {10.0, 100.0, 1000.0}) {
            bench::CaseParams p;
            p.slenderness = s;
            const auto bc = bench::case_straight_beam(p);
            const auto h = bench::run_one(bc, Formulation::hybrid, 2, 2, {});
            c.text << "hybrid L/t=" << s << ": " << h.normalized_tip << "; ";
            c.expect(h.normalized_tip >= kBeamHybridMin, "hybrid >= 0.98");
        }
        bench::CaseParams p;
        p.slenderness = 1000.0;
        const auto iga = bench::run_one(bench::case_straight_beam(p), Formulation::conventional, 2, 2, {});
        c.text << "iga L/t=1000: " << iga.normalized_tip << " (need < " << kBeamConventionalMax << ")";
        c.expect(iga.normalized_tip < kBeamConventionalMax, "conventional locks");
    });
}

inline CriterionResult curved_beam() {
    return detail::timed(3, "Curved beam R/t=10, hybrid quadratic 8x1", kLimit3, [](detail::Check& c) {
        bench::CaseParams p;
        p.slenderness = 10.0;
        const auto r = bench::run_one(bench::case_curved_beam(p), Formulation::hybrid, 2, 3, {});
        c.text << "tip u_r = " << r.tip << ", normalized " << r.normalized_tip << " (band +-" << kCurvedBeamBand << ")";
        c.expect(std::abs(r.normalized_tip - 1.0) <= kCurvedBeamBand, "within 2%");
    });
}

inline CriterionResult cook() {
    return detail::timed(4, "Cook membrane 16x16", kLimit4, [](detail::Check& c) {
        const auto cs = bench::case_cook({});
        const auto h = bench::run_one(cs, Formulation::hybrid, 2, 4, {});
        const auto q = bench::run_one(cs, Formulation::conventional, 1, 4, {});
        c.text << "hybrid d2 " << h.normalized_tip << " (band +-" << kCookHybridBand << "), iga d1 " << q.normalized_tip
               << " (need < " << kCookQ4Max << ")";
        c.expect(std::abs(h.normalized_tip - 1.0) <= kCookHybridBand, "hybrid within 5%");
        c.expect(q.normalized_tip < kCookQ4Max, "Q4 locks");
    });
}

inline CriterionResult plate_compressible() {
    return detail::timed(5, "Plate with hole nu=0.3, cubic, L=0..4", kLimit5, [](detail::Check& c) {
        bench::CaseParams p;
        p.nu = 0.3;
        const auto cs = bench::case_plate(p);
        bench::StudySpec spec{{Formulation::conventional, Formulation::hybrid}, {3}, {0, 1, 2, 3, 4}};
        const auto rows = bench::run_study(cs, spec);
        std::vector<double> dof, e_iga, e_hyb;
        for (const auto& r : rows) {
            if (r.formulation == Formulation::conventional) {
                dof.push_back(r.active_dof);
                e_iga.push_back(r.l2_error);
            } else {
                e_hyb.push_back(r.l2_error);
            }
        }
        double worst = 0.0;
        for (std::size_t k = 0; k < dof.size(); ++k) {
            worst = std::max(worst, std::abs(e_hyb[k] - e_iga[k]) / e_iga[k]);
        }
        const double s_iga = detail::loglog_slope(dof, e_iga), s_hyb = detail::loglog_slope(dof, e_hyb);
        c.text << "max |hyb-iga|/iga = " << worst << " (tol " << kPlateNeutralBand << "), slopes iga " << s_iga
               << " hybrid " << s_hyb << " (target " << kPlateSlopeTarget << " +-" << kPlateSlopeBand << ")";
        c.expect(worst <= kPlateNeutralBand, "formulation neutrality");
        c.expect(detail::strictly_decreasing(e_iga) && detail::strictly_decreasing(e_hyb), "monotone");
        c.expect(std::abs(s_iga - kPlateSlopeTarget) <= kPlateSlopeBand, "iga slope");
        c.expect(std::abs(s_hyb - kPlateSlopeTarget) <= kPlateSlopeBand, "hybrid slope");
    });
}

inline CriterionResult plate_incompressible() {
    return detail::timed(6, "Plate with hole nu=0.4999, quadratic, two coarsest meshes", kLimit6,
                         [](detail::Check& c) {
                             bench::CaseParams p;
                             p.nu = 0.4999;
                             const auto cs = bench::case_plate(p);
                             bench::StudySpec spec{{Formulation::conventional, Formulation::hybrid}, {2}, {0, 1}};
                             const auto rows = bench::run_study(cs, spec);
                             for (int l = 0; l < 2; ++l) {
                                 const double ratio = rows[2 + l].l2_error / rows[l].l2_error;
                                 c.text << "L" << l << " hybrid/iga = " << rows[2 + l].l2_error << "/" << rows[l].l2_error
                                        << " = " << ratio << "; ";
                                 c.expect(ratio <= kPlateLockingRatio, "ratio <= 0.5 at L" + std::to_string(l));
                             }
                         });
}

// ---------------------------------------------------------------------------
// Property suite

namespace detail {

inline NurbsPatch jittered_square(int n, double jitter, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-jitter, jitter);
    const NurbsPatch base(KnotVector(1, {0, 0, 1, 1}), KnotVector(1, {0, 0, 1, 1}), {{0, 0}, {1, 0}, {0, 1}, {1, 1}},
                          {1, 1, 1, 1});
    const NurbsPatch fine = k_refine(base, 1, n, n);
    std::vector<Vec2> cps = fine.control_points();
    for (int j = 1; j + 1 < fine.num_v(); ++j) {
        for (int i = 1; i + 1 < fine.num_u(); ++i) {
            cps[fine.index(i, j)] += Vec2(U(rng), U(rng)) / n;
        }
    }
    return NurbsPatch(fine.basis_u(), fine.basis_v(), cps, fine.weights());
}

inline int zero_modes(const MatrixXd& K) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(K);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseAbs();
    int n = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        n += ev(i) < 1e-9 * ev.maxCoeff();
    }
    return n;
}

/// Affine field imposed on all boundary control points; returns the max
/// relative error at the interior ones.
inline double patch_test(const NurbsPatch& p, Formulation f) {
    const Material mat(1000.0, 0.3, Regime::plane_stress);
    const Mesh m = build_mesh(p);
    const MatrixXd K(assemble(m, mat, f).K);
    VectorXd exact(2 * p.num_control_points());
    for (int a = 0; a < p.num_control_points(); ++a) {
        const Vec2& x = p.control_points()[a];
        exact(2 * a) = 1e-3 * (x.x() + 2 * x.y());
        exact(2 * a + 1) = 1e-3 * (-0.5 * x.x() + 0.7 * x.y());
    }
    std::vector<int> fixed, free;
    for (int j = 0; j < p.num_v(); ++j) {
        for (int i = 0; i < p.num_u(); ++i) {
            const bool edge = i == 0 || j == 0 || i == p.num_u() - 1 || j == p.num_v() - 1;
            for (int c = 0; c < 2; ++c) {
                (edge ? fixed : free).push_back(2 * p.index(i, j) + c);
            }
        }
    }
    MatrixXd Kff(free.size(), free.size());
    VectorXd rhs = VectorXd::Zero(free.size());
    for (std::size_t a = 0; a < free.size(); ++a) {
        for (std::size_t b = 0; b < free.size(); ++b) {
            Kff(a, b) = K(free[a], free[b]);
        }
        for (int c : fixed) {
            rhs(a) -= K(free[a], c) * exact(c);
        }
    }
    const VectorXd uf = Kff.ldlt().solve(rhs);
    double err = 0;
    for (std::size_t a = 0; a < free.size(); ++a) {
        err = std::max(err, std::abs(uf(a) - exact(free[a])));
    }
    return err / exact.cwiseAbs().maxCoeff();
}

}  // namespace detail

inline CriterionResult property_suite() {
    return detail::timed(7, "Property suite", kLimit7, [](detail::Check& c) {
        std::mt19937_64 rng(20240917);
        std::uniform_real_distribution<double> U01(0.0, 1.0);
        const NurbsPatch plate = geometry::plate_with_hole_quadratic();

        // partition of unity and non-negativity
        double pu = 0.0, fd = 0.0, geo = 0.0;
        bool nonneg = true;
        const NurbsPatch fine = k_refine(plate, 3, 4, 4);
        for (int k = 0; k < 200; ++k) {
            const double xi = U01(rng), eta = U01(rng);
            const RationalBasis rb = nurbs_basis_2d(plate, xi, eta);
            double sum = 0.0;
            for (double v : rb.values) {
                sum += v;
                nonneg = nonneg && v >= 0.0;
            }
            pu = std::max(pu, std::abs(sum - 1.0));
            // derivative vs central difference (interior points only)
            const double h = 1e-6;
            if (xi > 2 * h && xi < 1 - 2 * h && std::abs(xi - 0.5) > 2 * h) {
                const Vec2 dx = (surface_point(plate, xi + h, eta) - surface_point(plate, xi - h, eta)) / (2 * h);
                const Mat2 J1 = parametric_jacobian(plate, rb);
                fd = std::max(fd, (dx - J1.row(0).transpose()).norm() / (1.0 + dx.norm()));
            }
            geo = std::max(geo, (surface_point(fine, xi, eta) - surface_point(plate, xi, eta)).norm());
        }
        c.text << "PU " << pu << ", FD " << fd << ", refine " << geo;
        c.expect(pu < 1e-13 && nonneg, "partition of unity");
        c.expect(fd < 1e-6, "derivative FD");
        c.expect(geo < 1e-12, "refinement invariance");

        // element rank and H positive definite
        const Material mat(1000.0, 0.3, Regime::plane_stress);
        bool rank_ok = true, h_ok = true;
        for (int d = 1; d <= 3; ++d) {
            std::vector<NurbsPatch> patches{k_refine(geometry::cook_membrane(), d, 2, 2)};
            if (d >= 2) {
                patches.push_back(k_refine(plate, d, 2, 2));
            }
            for (const NurbsPatch& p : patches) {
                const Mesh m = build_mesh(p);
                const Element& e = m.elements[1];
                const auto hyb = element_matrices_hybrid(p, e, mat, stress_basis_for_degree(d));
                const auto conv = element_matrices_conventional(p, e, mat);
                rank_ok = rank_ok && detail::zero_modes(hyb.K) == 3 && detail::zero_modes(conv.K) == 3;
                Eigen::SelfAdjointEigenSolver<MatrixXd> hs(hyb.H);
                h_ok = h_ok && hs.eigenvalues().minCoeff() > 0.0;
            }
        }
        c.expect(rank_ok, "rank n_dof-3");
        c.expect(h_ok, "H SPD");

        // patch test on a distorted mesh
        double patch = 0.0;
        for (int d = 1; d <= 3; ++d) {
            NurbsPatch p = detail::jittered_square(3, 0.25, rng);
            if (d > 1) {
                p = k_refine(p, d, 1, 1);
            }
            for (Formulation f : {Formulation::conventional, Formulation::hybrid}) {
                patch = std::max(patch, detail::patch_test(p, f));
            }
        }
        c.text << ", patch " << patch;
        c.expect(patch < kPatchTolerance, "patch test");

        // equilibrium of reactions on every benchmark
        double eq = 0.0;
        std::vector<bench::BenchmarkCase> cases;
        for (double s : {10.0, 1000.0}) {
            bench::CaseParams bp;
            bp.slenderness = s;
            cases.push_back(bench::case_straight_beam(bp));
            cases.push_back(bench::case_curved_beam(bp));
        }
        cases.push_back(bench::case_cook({}));
        for (double nu : {0.3, 0.4999}) {
            bench::CaseParams bp;
            bp.nu = nu;
            cases.push_back(bench::case_plate(bp));
        }
        for (const auto& cs : cases) {
            for (Formulation f : {Formulation::conventional, Formulation::hybrid}) {
                const Solution s = analyze(cs.discretize(2, 1), cs.material, f, cs.bcs);
                const VectorXd r = reactions(s.system, s.u);
                Vec2 total = Vec2::Zero();
                for (int a = 0; a < s.mesh.n_cp(); ++a) {
                    total += Vec2(r(2 * a) + s.system.f(2 * a), r(2 * a + 1) + s.system.f(2 * a + 1));
                }
                eq = std::max(eq, total.norm());
            }
        }
        c.text << ", equilibrium " << eq;
        c.expect(eq < kEquilibriumTolerance, "reaction equilibrium");

        // exact plate field through strain and constitutive law
        double field = 0.0;
        for (double nu : {0.3, 0.4999}) {
            bench::PlateWithHoleExact ex;
            ex.nu = nu;
            const Mat3 C = stiffness_matrix(Material(ex.E, nu, Regime::plane_strain));
            for (int k = 0; k < 50; ++k) {
                const Vec2 x = surface_point(plate, U01(rng), 0.05 + 0.95 * U01(rng));
                const double h = 1e-5;
                const Vec2 dx = (ex.displacement(x + Vec2(h, 0)) - ex.displacement(x - Vec2(h, 0))) / (2 * h);
                const Vec2 dy = (ex.displacement(x + Vec2(0, h)) - ex.displacement(x - Vec2(0, h))) / (2 * h);
                const Vec3 eps(dx.x(), dy.y(), dx.y() + dy.x());
                field = std::max(field, (C * eps - ex.stress(x)).cwiseAbs().maxCoeff());
            }
        }
        c.text << ", exact-field " << field;
        c.expect(field < kExactFieldTolerance, "exact-field consistency");

        // byte-identical reruns (serial and threaded)
        bench::CaseParams bp;
        bp.nu = 0.3;
        const auto cs = bench::case_plate(bp);
        const bench::StudySpec spec{{Formulation::conventional, Formulation::hybrid}, {2}, {0, 1, 2}};
        const std::string a = bench::to_csv(bench::run_study(cs, spec, {}, 1));
        const std::string b = bench::to_csv(bench::run_study(cs, spec, {}, 3));
        const Solution s = analyze(cs.discretize(2, 1), cs.material, Formulation::hybrid, cs.bcs);
        const std::string v1 = vtk_string(sample_fields(s, 3), "t");
        const std::string v2 = vtk_string(sample_fields(s, 3), "t");
        c.expect(a == b && v1 == v2, "deterministic output");
        c.text << ", reruns " << (a == b && v1 == v2 ? "identical" : "differ");
    });
}

inline std::vector<CriterionResult> run_all() {
    return {q4_identity(), straight_beam(), curved_beam(), cook(), plate_compressible(), plate_incompressible(),
            property_suite()};
}

}  // namespace hyiga::verify

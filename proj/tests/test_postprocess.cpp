#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "hyiga/benchmarks.hpp"
#include "hyiga/postprocess.hpp"
#include "test_util.hpp"

using namespace hyiga;

namespace {

const Material kMat(1000.0, 0.3, Regime::plane_stress);

// Unit square under sigma_xx = 1: roller on x = 0, roller on y = 0, unit traction on x = 1.
Solution uniaxial(const NurbsPatch& p, Formulation f) {
    BoundaryConditions bcs;
    bcs.fixed.push_back({Edge::xi_min, true, false});
    bcs.fixed.push_back({Edge::eta_min, false, true});
    bcs.tractions.push_back({Edge::xi_max, [](const Vec2&, const Vec2&) { return Vec2(1.0, 0.0); }});
    return analyze(p, kMat, f, bcs);
}

// Minimal legacy-VTK reader, independent of the writer: counts and arrays only.
struct ParsedVtk {
    std::string title;
    std::vector<double> points;
    std::vector<std::vector<int>> cells;
    std::vector<int> cell_types;
    std::vector<double> u, stress;
};

ParsedVtk parse_vtk(const std::string& text) {
    std::istringstream in(text);
    ParsedVtk v;
    std::string line, word;
    std::getline(in, line);
    if (line.rfind("# vtk DataFile Version", 0) != 0) {
        throw std::runtime_error("bad magic");
    }
    std::getline(in, v.title);
    std::getline(in, line);
    if (line != "ASCII") {
        throw std::runtime_error("not ASCII");
    }
    std::getline(in, line);
    if (line != "DATASET UNSTRUCTURED_GRID") {
        throw std::runtime_error("bad dataset");
    }
    auto read_doubles = [&](std::size_t n, std::vector<double>& out) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!(in >> word)) {
                throw std::runtime_error("truncated");
            }
            char* end = nullptr;
            out.push_back(std::strtod(word.c_str(), &end));
            if (*end != '\0') {
                throw std::runtime_error("bad number " + word);
            }
        }
    };
    std::size_t npts = 0, ncells = 0, size = 0;
    while (in >> word) {
        if (word == "POINTS") {
            in >> npts >> word;
            read_doubles(3 * npts, v.points);
        } else if (word == "CELLS") {
            in >> ncells >> size;
            for (std::size_t c = 0; c < ncells; ++c) {
                int n = 0;
                in >> n;
                std::vector<int> ids(n);
                for (int& id : ids) {
                    in >> id;
                    if (id < 0 || static_cast<std::size_t>(id) >= npts) {
                        throw std::runtime_error("cell index out of range");
                    }
                }
                v.cells.push_back(ids);
            }
        } else if (word == "CELL_TYPES") {
            std::size_t n = 0;
            in >> n;
            v.cell_types.resize(n);
            for (int& t : v.cell_types) {
                in >> t;
            }
        } else if (word == "POINT_DATA") {
            std::size_t n = 0;
            in >> n;
            if (n != npts) {
                throw std::runtime_error("POINT_DATA count mismatch");
            }
        } else if (word == "VECTORS") {
            in >> word >> word;
            read_doubles(3 * npts, v.u);
        } else if (word == "SCALARS") {
            std::string name, type;
            int ncomp = 0;
            in >> name >> type >> ncomp >> word >> word;  // LOOKUP_TABLE default
            read_doubles(ncomp * npts, v.stress);
        } else {
            throw std::runtime_error("unexpected token " + word);
        }
    }
    return v;
}

}  // namespace

TEST(StressRecovery, UniaxialStateIsExact) {
    const NurbsPatch p = k_refine(testutil::distorted_square(3, 3, 0.2), 2, 1, 1);
    for (Formulation f : {Formulation::conventional, Formulation::hybrid}) {
        const Solution s = uniaxial(p, f);
        const StressSampler sigma(s);
        for (double xi : {0.0, 0.13, 0.5, 0.77, 1.0}) {
            for (double eta : {0.0, 0.4, 1.0}) {
                const Vec3 t = sigma(xi, eta);
                EXPECT_NEAR(t(0), 1.0, 1e-8);
                EXPECT_NEAR(t(1), 0.0, 1e-8);
                EXPECT_NEAR(t(2), 0.0, 1e-8);
            }
        }
    }
}

TEST(StressRecovery, FormulationsAgreeOnConstantStress) {
    const NurbsPatch p = k_refine(testutil::distorted_square(2, 2, 0.2), 3, 1, 1);
    const Solution a = uniaxial(p, Formulation::conventional);
    const Solution b = uniaxial(p, Formulation::hybrid);
    const StressSampler sa(a), sb(b);
    for (double xi = 0.05; xi < 1.0; xi += 0.15) {
        EXPECT_LT((sa(xi, 0.3) - sb(xi, 0.3)).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(StressRecovery, PlateHoleConcentration) {
    bench::CaseParams cp;
    cp.nu = 0.3;
    const auto cs = bench::case_plate(cp);
    const Solution s = analyze(cs.discretize(3, 3), cs.material, Formulation::hybrid, cs.bcs);
    const double sxx = StressSampler(s)(1.0, 0.0)(0);  // hole top (0, 1)
    EXPECT_NEAR(sxx / 3.0, 1.0, 0.05);
}

TEST(StressRecovery, OutsideElementIsDomainError) {
    const Solution s = uniaxial(testutil::distorted_square(2, 2, 0.1), Formulation::hybrid);
    const StressSampler sigma(s);
    EXPECT_THROW(sigma.in_element(s.mesh.elements[0], 1.5, 0.0), DomainError);
    EXPECT_THROW(sigma(1.2, 0.5), DomainError);
}

TEST(StressRecovery, CollapsedCornerTakesInteriorLimit) {
    bench::CaseParams cp;
    const auto cs = bench::case_plate(cp);
    const Solution s = analyze(cs.discretize(2, 0), cs.material, Formulation::hybrid, cs.bcs);
    const StressSampler sigma(s);
    // repeated control point at (-4, 4): corner of both elements
    for (const Element& e : s.mesh.elements) {
        const double xm = e.master_xi(0.5), em = e.master_eta(1.0);
        const Vec3 corner = sigma.in_element(e, xm, em);
        EXPECT_TRUE(corner.allFinite());
        EXPECT_LT((corner - sigma.in_element(e, xm * (1 - 1e-6), em * (1 - 1e-6))).norm(), 1e-4);
    }
}

TEST(FieldExport, SingleElementTwoSamples) {
    const Solution s = uniaxial(testutil::distorted_square(1, 1, 0.0), Formulation::conventional);
    const FieldExport f = sample_fields(s, 2);
    EXPECT_EQ(f.points.size(), 4u);
    EXPECT_EQ(f.cells.size(), 1u);
    EXPECT_THROW(sample_fields(s, 1), ConfigError);
}

TEST(FieldExport, DisplacementMatchesSampler) {
    const Solution s = uniaxial(k_refine(testutil::distorted_square(2, 3, 0.2), 2, 1, 1), Formulation::hybrid);
    const FieldExport f = sample_fields(s, 4);
    ASSERT_EQ(f.points.size(), 6u * 16u);
    ASSERT_EQ(f.cells.size(), 6u * 9u);
    for (std::size_t k = 0; k < f.points.size(); ++k) {
        const Vec2 u = displacement_at(s, f.params[k].x(), f.params[k].y());
        EXPECT_EQ(f.displacement[k], u);
        EXPECT_EQ(f.points[k], surface_point(s.mesh.patch, f.params[k].x(), f.params[k].y()));
    }
}

TEST(Vtk, ParsesBackExactly) {
    const Solution s = uniaxial(k_refine(testutil::distorted_square(2, 2, 0.2), 2, 1, 1), Formulation::hybrid);
    const FieldExport f = sample_fields(s, 3);
    const ParsedVtk v = parse_vtk(vtk_string(f, "round trip"));
    EXPECT_EQ(v.title, "round trip");
    ASSERT_EQ(v.points.size(), 3 * f.points.size());
    ASSERT_EQ(v.cells.size(), f.cells.size());
    ASSERT_EQ(v.cell_types.size(), f.cells.size());
    for (int t : v.cell_types) {
        EXPECT_EQ(t, 9);
    }
    for (std::size_t k = 0; k < f.points.size(); ++k) {
        EXPECT_EQ(v.points[3 * k], f.points[k].x());
        EXPECT_EQ(v.points[3 * k + 1], f.points[k].y());
        EXPECT_EQ(v.u[3 * k], f.displacement[k].x());
        EXPECT_EQ(v.u[3 * k + 1], f.displacement[k].y());
        EXPECT_EQ(v.u[3 * k + 2], 0.0);
        for (int c = 0; c < 3; ++c) {
            EXPECT_EQ(v.stress[3 * k + c], f.stress[k](c));
        }
    }
    for (std::size_t c = 0; c < f.cells.size(); ++c) {
        ASSERT_EQ(v.cells[c].size(), 4u);
        for (int i = 0; i < 4; ++i) {
            EXPECT_EQ(v.cells[c][i], f.cells[c][i]);
        }
    }
}

TEST(Vtk, CellsAreCounterClockwise) {
    const Solution s = uniaxial(testutil::distorted_square(2, 2, 0.2), Formulation::conventional);
    const FieldExport f = sample_fields(s, 3);
    for (const auto& c : f.cells) {
        double area = 0.0;
        for (int i = 0; i < 4; ++i) {
            const Vec2& a = f.points[c[i]];
            const Vec2& b = f.points[c[(i + 1) % 4]];
            area += a.x() * b.y() - b.x() * a.y();
        }
        EXPECT_GT(area, 0.0);
    }
}

TEST(Vtk, WriteErrorNamesPath) {
    const Solution s = uniaxial(testutil::distorted_square(1, 1, 0.0), Formulation::conventional);
    try {
        export_vtk(sample_fields(s, 2), "/nonexistent-dir/out.vtk");
        FAIL() << "expected InputError";
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent-dir/out.vtk"), std::string::npos);
    }
}

TEST(DeformedNet, IsControlPointsPlusDisplacement) {
    const Solution s = uniaxial(k_refine(testutil::distorted_square(2, 2, 0.2), 2, 1, 1), Formulation::hybrid);
    const auto net = deformed_control_net(s.mesh.patch, s.u);
    for (int a = 0; a < s.mesh.n_cp(); ++a) {
        EXPECT_EQ(net[a].x(), s.mesh.patch.control_points()[a].x() + s.u(2 * a));
        EXPECT_EQ(net[a].y(), s.mesh.patch.control_points()[a].y() + s.u(2 * a + 1));
    }
    // the deformed surface is x + u everywhere
    const NurbsPatch d = deformed_patch(s.mesh.patch, s.u);
    for (double xi : {0.1, 0.5, 0.9}) {
        for (double eta : {0.2, 0.7}) {
            const Vec2 expect = surface_point(s.mesh.patch, xi, eta) + displacement_at(s, xi, eta);
            EXPECT_LT((surface_point(d, xi, eta) - expect).norm(), 1e-14);
        }
    }
}

TEST(DeformedNet, MagnificationOnlyAffectsRenderData) {
    const Solution s = uniaxial(testutil::distorted_square(2, 2, 0.1), Formulation::hybrid);
    const auto before = deformed_control_net(s.mesh.patch, s.u);
    const std::string txt = control_net_vtk_string(s.mesh.patch, s.u, 1e4);
    EXPECT_NE(txt.find("magnification=10000"), std::string::npos);
    EXPECT_EQ(before, deformed_control_net(s.mesh.patch, s.u));
    std::istringstream in(txt);
    std::string line;
    for (int k = 0; k < 5; ++k) {
        std::getline(in, line);
    }
    double x = 0, y = 0;
    in >> x >> y;
    EXPECT_EQ(x, s.mesh.patch.control_points()[0].x() + 1e4 * s.u(0));
    EXPECT_EQ(y, s.mesh.patch.control_points()[0].y() + 1e4 * s.u(1));
}

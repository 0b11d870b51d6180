#pragma once

#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hyiga/format.hpp"
#include "hyiga/solution.hpp"

namespace hyiga {

using Vec3 = Eigen::Vector3d;

/// Physical stress (xx, yy, xy) anywhere in the patch. Hybrid solutions use
/// the condensed stress parameters beta = H^-1 G u_e with the same T as the
/// stiffness; conventional ones use C B u_e.
class StressSampler {
public:
    explicit StressSampler(const Solution& s) : sol_(&s) {
        const Mesh& mesh = s.mesh;
        if (s.formulation == Formulation::hybrid) {
            sb_ = stress_basis_for_degree(mesh.patch.degree_u());
            beta_.reserve(mesh.elements.size());
            for (const Element& e : mesh.elements) {
                const ElementSystem es = element_matrices_hybrid(mesh.patch, e, s.material, *sb_, s.options);
                beta_.push_back(es.beta * local_displacements(e));
            }
        } else {
            C_ = stiffness_matrix(s.material);
        }
    }

    /// Stress at master coordinates of a given element.
    Vec3 in_element(const Element& e, double xi_m, double eta_m) const {
        if (std::abs(xi_m) > 1.0 + 1e-12 || std::abs(eta_m) > 1.0 + 1e-12) {
            std::ostringstream msg;
            msg << "stress sampling: master point (" << xi_m << ", " << eta_m << ") outside element " << e.id;
            throw DomainError(msg.str());
        }
        const NurbsPatch& patch = sol_->mesh.patch;
        Jacobians jac;
        try {
            jac = jacobians(patch, e, xi_m, eta_m);
        } catch (const MeshError&) {
            // collapsed edge or corner (repeated control points): take the
            // limit from inside the element
            const bool on_edge = std::abs(xi_m) >= 1.0 - 1e-12 || std::abs(eta_m) >= 1.0 - 1e-12;
            if (!on_edge) {
                throw;
            }
            constexpr double kShrink = 1.0 - 1e-9;
            xi_m *= kShrink;
            eta_m *= kShrink;
            jac = jacobians(patch, e, xi_m, eta_m);
        }
        if (sb_) {
            const MatrixXd TP = physical_stress_interpolation(patch, e, *sb_, sol_->options.t_eval, xi_m, eta_m, jac.J);
            return TP * beta_[static_cast<std::size_t>(e.id)];
        }
        return C_ * (strain_displacement_B(jac) * local_displacements(e));
    }

    /// Stress at a parametric point.
    Vec3 operator()(double xi, double eta) const {
        const Element& e = sol_->mesh.locate(xi, eta);
        return in_element(e, e.master_xi(xi), e.master_eta(eta));
    }

private:
    VectorXd local_displacements(const Element& e) const {
        VectorXd ue(e.n_dof());
        for (std::size_t a = 0; a < e.cps.size(); ++a) {
            ue(2 * a) = sol_->u(2 * e.cps[a]);
            ue(2 * a + 1) = sol_->u(2 * e.cps[a] + 1);
        }
        return ue;
    }

    const Solution* sol_;
    std::optional<StressBasis> sb_;
    std::vector<VectorXd> beta_;
    Mat3 C_ = Mat3::Zero();
};

inline StressSampler recover_stress(const Solution& s) { return StressSampler(s); }

/// Fields on an s x s master-grid per element. Points are not shared between
/// elements because recovered stresses may jump across element boundaries.
struct FieldExport {
    std::vector<Vec2> params;  // (xi, eta)
    std::vector<Vec2> points;
    std::vector<Vec2> displacement;
    std::vector<Vec3> stress;
    std::vector<std::array<int, 4>> cells;  // counter-clockwise in parameter space
};

inline FieldExport sample_fields(const Solution& s, int samples) {
    if (samples < 2) {
        throw ConfigError("sample_fields: need at least 2 samples per element direction");
    }
    const StressSampler sigma(s);
    FieldExport out;
    for (const Element& e : s.mesh.elements) {
        const int base = static_cast<int>(out.points.size());
        for (int j = 0; j < samples; ++j) {
            for (int i = 0; i < samples; ++i) {
                const double xm = -1.0 + 2.0 * i / (samples - 1);
                const double em = -1.0 + 2.0 * j / (samples - 1);
                const double xi = e.xi_at(xm), eta = e.eta_at(em);
                const RationalBasis rb = nurbs_basis_2d(s.mesh.patch, xi, eta);
                Vec2 x = Vec2::Zero(), u = Vec2::Zero();
                for (std::size_t k = 0; k < rb.size(); ++k) {
                    x += rb.values[k] * s.mesh.patch.control_points()[rb.indices[k]];
                    u.x() += rb.values[k] * s.u(2 * rb.indices[k]);
                    u.y() += rb.values[k] * s.u(2 * rb.indices[k] + 1);
                }
                out.params.emplace_back(xi, eta);
                out.points.push_back(x);
                out.displacement.push_back(u);
                out.stress.push_back(sigma.in_element(e, xm, em));
            }
        }
        for (int j = 0; j + 1 < samples; ++j) {
            for (int i = 0; i + 1 < samples; ++i) {
                const int a = base + j * samples + i;
                out.cells.push_back({a, a + 1, a + samples + 1, a + samples});
            }
        }
    }
    return out;
}

/// New control net CP + u (exact; no magnification).
inline std::vector<Vec2> deformed_control_net(const NurbsPatch& patch, const VectorXd& u) {
    std::vector<Vec2> out = patch.control_points();
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] += Vec2(u(2 * a), u(2 * a + 1));
    }
    return out;
}

inline NurbsPatch deformed_patch(const NurbsPatch& patch, const VectorXd& u) {
    return NurbsPatch(patch.basis_u(), patch.basis_v(), deformed_control_net(patch, u), patch.weights());
}

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InputError("cannot write '" + path + "'");
    }
    return out;
}

inline void finish_write(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw InputError("write failed for '" + path + "'");
    }
}

}  // namespace detail

/// Legacy ASCII unstructured grid with point data "u" (padded to 3) and
/// "stress" (xx, yy, xy).
inline std::string vtk_string(const FieldExport& f, const std::string& title) {
    std::ostringstream o;
    o << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    o << "POINTS " << f.points.size() << " double\n";
    for (const Vec2& x : f.points) {
        o << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
    }
    o << "CELLS " << f.cells.size() << ' ' << 5 * f.cells.size() << '\n';
    for (const auto& c : f.cells) {
        o << "4 " << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3] << '\n';
    }
    o << "CELL_TYPES " << f.cells.size() << '\n';
    for (std::size_t k = 0; k < f.cells.size(); ++k) {
        o << "9\n";
    }
    o << "POINT_DATA " << f.points.size() << '\n';
    o << "VECTORS u double\n";
    for (const Vec2& u : f.displacement) {
        o << format_double(u.x()) << ' ' << format_double(u.y()) << " 0\n";
    }
    o << "SCALARS stress double 3\nLOOKUP_TABLE default\n";
    for (const Vec3& s : f.stress) {
        o << format_double(s(0)) << ' ' << format_double(s(1)) << ' ' << format_double(s(2)) << '\n';
    }
    return o.str();
}

inline void export_vtk(const FieldExport& f, const std::string& path, const std::string& title = "hyiga field") {
    std::ofstream out = detail::open_for_write(path);
    out << vtk_string(f, title);
    detail::finish_write(out, path);
}

/// Control net as a quad mesh for plotting, points at CP + magnification * u.
/// The factor is written into the title line.
inline std::string control_net_vtk_string(const NurbsPatch& patch, const VectorXd& u, double magnification) {
    std::ostringstream o;
    o << "# vtk DataFile Version 3.0\nhyiga deformed control net magnification=" << format_double(magnification)
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    const int nu = patch.num_u(), nv = patch.num_v();
    o << "POINTS " << nu * nv << " double\n";
    for (int a = 0; a < nu * nv; ++a) {
        const Vec2 x = patch.control_points()[a] + magnification * Vec2(u(2 * a), u(2 * a + 1));
        o << format_double(x.x()) << ' ' << format_double(x.y()) << " 0\n";
    }
    const int nc = (nu - 1) * (nv - 1);
    o << "CELLS " << nc << ' ' << 5 * nc << '\n';
    for (int j = 0; j + 1 < nv; ++j) {
        for (int i = 0; i + 1 < nu; ++i) {
            o << "4 " << patch.index(i, j) << ' ' << patch.index(i + 1, j) << ' ' << patch.index(i + 1, j + 1) << ' '
              << patch.index(i, j + 1) << '\n';
        }
    }
    o << "CELL_TYPES " << nc << '\n';
    for (int k = 0; k < nc; ++k) {
        o << "9\n";
    }
    o << "POINT_DATA " << nu * nv << "\nSCALARS weight double 1\nLOOKUP_TABLE default\n";
    for (double w : patch.weights()) {
        o << format_double(w) << '\n';
    }
    return o.str();
}

}  // namespace hyiga

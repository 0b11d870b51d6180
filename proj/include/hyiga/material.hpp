#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "hyiga/errors.hpp"

namespace hyiga {

using Mat3 = Eigen::Matrix3d;

enum class Regime { plane_stress, plane_strain };

inline std::string to_string(Regime r) {
    return r == Regime::plane_stress ? "plane_stress" : "plane_strain";
}

inline Regime parse_regime(const std::string& s) {
    if (s == "plane_stress" || s == "plane-stress") {
        return Regime::plane_stress;
    }
    if (s == "plane_strain" || s == "plane-strain") {
        return Regime::plane_strain;
    }
    throw ConfigError("unknown regime '" + s + "' (expected plane_stress or plane_strain)");
}

/// Isotropic linear-elastic material. Voigt order is (xx, yy, xy) with
/// engineering shear strain.
class Material {
public:
    Material(double E, double nu, std::optional<Regime> regime) : E_(E), nu_(nu), regime_(regime) {
        if (!(E > 0.0) || !std::isfinite(E)) {
            throw ConfigError("material: E must be positive and finite");
        }
        // nu = 0.5 exactly would make the plane-strain stiffness unbounded
        if (!(nu > -1.0 && nu < 0.5)) {
            std::ostringstream msg;
            msg << "material: nu=" << nu << " outside (-1, 0.5)";
            throw ConfigError(msg.str());
        }
    }

    double youngs_modulus() const noexcept { return E_; }
    double poisson_ratio() const noexcept { return nu_; }
    double shear_modulus() const noexcept { return E_ / (2.0 * (1.0 + nu_)); }
    bool has_regime() const noexcept { return regime_.has_value(); }

    Regime regime() const {
        if (!regime_) {
            throw ConfigError("material: regime (plane_stress | plane_strain) not set");
        }
        return *regime_;
    }

private:
    double E_;
    double nu_;
    std::optional<Regime> regime_;
};

inline Mat3 stiffness_matrix(const Material& m) {
    const double E = m.youngs_modulus();
    const double nu = m.poisson_ratio();
    Mat3 C = Mat3::Zero();
    if (m.regime() == Regime::plane_stress) {
        const double f = E / (1.0 - nu * nu);
        C(0, 0) = C(1, 1) = f;
        C(0, 1) = C(1, 0) = f * nu;
        C(2, 2) = f * (1.0 - nu) / 2.0;
    } else {
        const double f = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
        C(0, 0) = C(1, 1) = f * (1.0 - nu);
        C(0, 1) = C(1, 0) = f * nu;
        C(2, 2) = f * (1.0 - 2.0 * nu) / 2.0;
    }
    return C;
}

/// Closed-form inverse of stiffness_matrix. Stays bounded as nu -> 0.5.
inline Mat3 compliance_matrix(const Material& m) {
    const double E = m.youngs_modulus();
    const double nu = m.poisson_ratio();
    Mat3 S = Mat3::Zero();
    if (m.regime() == Regime::plane_stress) {
        S(0, 0) = S(1, 1) = 1.0 / E;
        S(0, 1) = S(1, 0) = -nu / E;
    } else {
        S(0, 0) = S(1, 1) = (1.0 - nu * nu) / E;
        S(0, 1) = S(1, 0) = -nu * (1.0 + nu) / E;
    }
    S(2, 2) = 2.0 * (1.0 + nu) / E;
    return S;
}

}  // namespace hyiga

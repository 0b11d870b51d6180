#pragma once

#include <cassert>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "hyiga/errors.hpp"
#include "hyiga/knot_vector.hpp"

namespace hyiga {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class Direction { u, v };

/// Tensor-product NURBS surface. Control points and weights are stored with
/// the u (xi) index running fastest: global index = j * num_u() + i.
class NurbsPatch {
public:
    NurbsPatch() = default;

    NurbsPatch(KnotVector basis_u, KnotVector basis_v, std::vector<Vec2> control_points,
               std::vector<double> weights)
        : u_(std::move(basis_u)),
          v_(std::move(basis_v)),
          cps_(std::move(control_points)),
          weights_(std::move(weights)) {
        const std::size_t expected = static_cast<std::size_t>(u_.num_basis()) * v_.num_basis();
        if (cps_.size() != expected || weights_.size() != expected) {
            std::ostringstream msg;
            msg << "nurbs patch: expected " << u_.num_basis() << "x" << v_.num_basis()
                << " control points and weights, got " << cps_.size() << " / " << weights_.size();
            throw ConfigError(msg.str());
        }
        for (double w : weights_) {
            if (!(w > 0.0)) {
                throw ConfigError("nurbs patch: weights must be strictly positive");
            }
        }
    }

    const KnotVector& basis_u() const noexcept { return u_; }
    const KnotVector& basis_v() const noexcept { return v_; }
    const KnotVector& basis(Direction d) const noexcept { return d == Direction::u ? u_ : v_; }

    int degree_u() const noexcept { return u_.degree(); }
    int degree_v() const noexcept { return v_.degree(); }
    int num_u() const noexcept { return u_.num_basis(); }
    int num_v() const noexcept { return v_.num_basis(); }
    int num_control_points() const noexcept { return num_u() * num_v(); }

    int index(int i, int j) const noexcept { return j * num_u() + i; }

    const std::vector<Vec2>& control_points() const noexcept { return cps_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const Vec2& control_point(int i, int j) const { return cps_[index(i, j)]; }
    double weight(int i, int j) const { return weights_[index(i, j)]; }

    friend bool operator==(const NurbsPatch& a, const NurbsPatch& b) {
        return a.u_ == b.u_ && a.v_ == b.v_ && a.cps_ == b.cps_ && a.weights_ == b.weights_;
    }

private:
    KnotVector u_;
    KnotVector v_;
    std::vector<Vec2> cps_;
    std::vector<double> weights_;
};

/// Active rational basis at a parametric point. Local ordering has the u
/// index fastest, matching the global numbering.
struct RationalBasis {
    int span_u = 0;
    int span_v = 0;
    std::vector<int> indices;  // global control point index of each local function
    std::vector<double> values;
    std::vector<double> d_dxi;
    std::vector<double> d_deta;

    std::size_t size() const noexcept { return indices.size(); }
};

inline RationalBasis nurbs_basis_2d(const NurbsPatch& patch, double xi, double eta) {
    const BasisValues bu = bspline_basis(patch.basis_u(), xi);
    const BasisValues bv = bspline_basis(patch.basis_v(), eta);
    const int p = patch.degree_u();
    const int q = patch.degree_v();
    const std::size_t n_local = static_cast<std::size_t>(p + 1) * (q + 1);

    RationalBasis rb;
    rb.span_u = bu.span;
    rb.span_v = bv.span;
    rb.indices.resize(n_local);
    rb.values.resize(n_local);
    rb.d_dxi.resize(n_local);
    rb.d_deta.resize(n_local);

    double W = 0.0;
    double dW_dxi = 0.0;
    double dW_deta = 0.0;
    std::size_t a = 0;
    for (int b = 0; b <= q; ++b) {
        const int j = bv.span - q + b;
        for (int c = 0; c <= p; ++c, ++a) {
            const int i = bu.span - p + c;
            const double w = patch.weight(i, j);
            rb.indices[a] = patch.index(i, j);
            rb.values[a] = bu.values[c] * bv.values[b] * w;
            rb.d_dxi[a] = bu.derivatives[c] * bv.values[b] * w;
            rb.d_deta[a] = bu.values[c] * bv.derivatives[b] * w;
            W += rb.values[a];
            dW_dxi += rb.d_dxi[a];
            dW_deta += rb.d_deta[a];
        }
    }
    assert(W > 0.0);
    if (!(W > 0.0)) {
        throw DomainError("nurbs_basis_2d: non-positive weight function");
    }
    for (std::size_t k = 0; k < n_local; ++k) {
        const double R = rb.values[k] / W;
        rb.d_dxi[k] = (rb.d_dxi[k] - R * dW_dxi) / W;
        rb.d_deta[k] = (rb.d_deta[k] - R * dW_deta) / W;
        rb.values[k] = R;
    }
    return rb;
}

inline Vec2 surface_point(const NurbsPatch& patch, double xi, double eta) {
    const RationalBasis rb = nurbs_basis_2d(patch, xi, eta);
    Vec2 x = Vec2::Zero();
    for (std::size_t a = 0; a < rb.size(); ++a) {
        x += rb.values[a] * patch.control_points()[rb.indices[a]];
    }
    return x;
}

/// Parametric-to-physical Jacobian, rows are d/dxi and d/deta of (x, y).
inline Mat2 parametric_jacobian(const NurbsPatch& patch, const RationalBasis& rb) {
    Mat2 J = Mat2::Zero();
    for (std::size_t a = 0; a < rb.size(); ++a) {
        const Vec2& cp = patch.control_points()[rb.indices[a]];
        J(0, 0) += rb.d_dxi[a] * cp.x();
        J(0, 1) += rb.d_dxi[a] * cp.y();
        J(1, 0) += rb.d_deta[a] * cp.x();
        J(1, 1) += rb.d_deta[a] * cp.y();
    }
    return J;
}

}  // namespace hyiga

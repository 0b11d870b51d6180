#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "hyiga/errors.hpp"

namespace hyiga {

/// Polynomial degree plus a non-decreasing knot sequence. Interior knot
/// multiplicity is bounded by the degree; the ends may carry up to p+1
/// repeats (open vectors).
class KnotVector {
public:
    KnotVector() = default;

    KnotVector(int degree, std::vector<double> knots) : degree_(degree), knots_(std::move(knots)) {
        if (degree_ < 0) {
            throw ConfigError("knot vector: negative degree");
        }
        if (knots_.size() < static_cast<std::size_t>(2 * degree_ + 2)) {
            throw ConfigError("knot vector: need at least 2(p+1) knots");
        }
        for (std::size_t k = 1; k < knots_.size(); ++k) {
            if (!(knots_[k] >= knots_[k - 1])) {
                throw ConfigError("knot vector: knots must be non-decreasing");
            }
        }
        if (!(knots_.back() > knots_.front())) {
            throw ConfigError("knot vector: empty parametric range");
        }
        for (double u : unique_knots()) {
            const bool end = (u == knots_.front() || u == knots_.back());
            const int mult = multiplicity(u);
            if (end ? mult > degree_ + 1 : mult > std::max(degree_, 1)) {
                std::ostringstream msg;
                msg << "knot vector: multiplicity " << mult << " of knot " << u << " exceeds bound";
                throw ConfigError(msg.str());
            }
        }
    }

    int degree() const noexcept { return degree_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    std::size_t size() const noexcept { return knots_.size(); }
    double operator[](std::size_t k) const { return knots_[k]; }

    int num_basis() const noexcept { return static_cast<int>(knots_.size()) - degree_ - 1; }
    double front() const noexcept { return knots_.front(); }
    double back() const noexcept { return knots_.back(); }

    bool is_open() const {
        return multiplicity(front()) == degree_ + 1 && multiplicity(back()) == degree_ + 1;
    }

    int multiplicity(double u) const {
        return static_cast<int>(std::count(knots_.begin(), knots_.end(), u));
    }

    std::vector<double> unique_knots() const {
        std::vector<double> out;
        for (double u : knots_) {
            if (out.empty() || out.back() != u) {
                out.push_back(u);
            }
        }
        return out;
    }

    /// Span indices k with knots[k] < knots[k+1], in increasing order.
    std::vector<int> nonzero_spans() const {
        std::vector<int> spans;
        for (int k = degree_; k < num_basis(); ++k) {
            if (knots_[k + 1] > knots_[k]) {
                spans.push_back(k);
            }
        }
        return spans;
    }

    friend bool operator==(const KnotVector&, const KnotVector&) = default;

private:
    int degree_ = 0;
    std::vector<double> knots_;
};

struct BasisValues {
    int span = 0;
    std::vector<double> values;       // N_{span-p..span}
    std::vector<double> derivatives;  // dN/dxi for the same functions
};

/// Index k with knots[k] <= xi < knots[k+1]; xi at the last knot maps to the
/// last nonzero span.
inline int find_span(const KnotVector& kv, double xi) {
    const int p = kv.degree();
    const int n = kv.num_basis();
    const auto& U = kv.knots();
    if (!(xi >= U[p] && xi <= U[n])) {
        std::ostringstream msg;
        msg << "find_span: xi=" << xi << " outside [" << U[p] << ", " << U[n] << "]";
        throw DomainError(msg.str());
    }
    if (xi >= U[n]) {
        int k = n - 1;
        while (k > p && !(U[k + 1] > U[k])) {
            --k;
        }
        return k;
    }
    // upper_bound gives the first knot strictly greater than xi
    const auto it = std::upper_bound(U.begin() + p, U.begin() + n + 1, xi);
    return static_cast<int>(it - U.begin()) - 1;
}

/// Nonzero B-spline functions and first derivatives at xi (Cox-de Boor,
/// triangular table form). 0/0 quotients never arise since only the
/// nonzero span is visited.
inline BasisValues bspline_basis(const KnotVector& kv, double xi) {
    const int p = kv.degree();
    const int span = find_span(kv, xi);
    const auto& U = kv.knots();

    // ndu holds basis values (upper triangle) and knot differences (lower)
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
    std::vector<double> left(p + 1, 0.0);
    std::vector<double> right(p + 1, 0.0);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - U[span + 1 - j];
        right[j] = U[span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[j][r] != 0.0 ? ndu[r][j - 1] / ndu[j][r] : 0.0;
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }

    BasisValues out;
    out.span = span;
    out.values.resize(p + 1);
    out.derivatives.assign(p + 1, 0.0);
    for (int j = 0; j <= p; ++j) {
        out.values[j] = ndu[j][p];
    }
    if (p == 0) {
        return out;
    }
    // first derivative: p * (N_{r,p-1}/(u_{r+p}-u_r) - N_{r+1,p-1}/(u_{r+p+1}-u_{r+1}))
    for (int r = 0; r <= p; ++r) {
        double d = 0.0;
        if (r >= 1) {
            const double den = ndu[p][r - 1];
            if (den != 0.0) {
                d += ndu[r - 1][p - 1] / den;
            }
        }
        if (r <= p - 1) {
            const double den = ndu[p][r];
            if (den != 0.0) {
                d -= ndu[r][p - 1] / den;
            }
        }
        out.derivatives[r] = p * d;
    }
    return out;
}

}  // namespace hyiga

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "hyiga/errors.hpp"

namespace hyiga {

struct GaussRule {
    std::vector<double> points;  // on [-1, 1]
    std::vector<double> weights;

    std::size_t size() const noexcept { return points.size(); }
};

/// n-point Gauss-Legendre rule on [-1, 1], exact for degree 2n-1.
inline GaussRule gauss_legendre(int n) {
    if (n < 1 || n > 64) {
        throw ConfigError("gauss_legendre: point count must be in [1, 64]");
    }
    GaussRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // three-term recurrence for P_n and its derivative
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 1 ? x : p1;
            const double pnm1 = n == 1 ? 1.0 : p0;
            dp = n * (x * pn - pnm1) / (x * x - 1.0);
            const double dx = pn / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.points[n / 2] = 0.0;
    }
    return rule;
}

struct QuadPoint2 {
    double xi;   // master coordinates in [-1, 1]^2
    double eta;
    double weight;
};

inline std::vector<QuadPoint2> tensor_rule(int n_xi, int n_eta) {
    const GaussRule a = gauss_legendre(n_xi);
    const GaussRule b = gauss_legendre(n_eta);
    std::vector<QuadPoint2> out;
    out.reserve(a.size() * b.size());
    for (std::size_t j = 0; j < b.size(); ++j) {
        for (std::size_t i = 0; i < a.size(); ++i) {
            out.push_back({a.points[i], b.points[j], a.weights[i] * b.weights[j]});
        }
    }
    return out;
}

}  // namespace hyiga

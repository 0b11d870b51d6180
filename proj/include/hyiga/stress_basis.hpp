#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyiga/errors.hpp"

namespace hyiga {

/// Monomial xi^a * eta^b in master coordinates.
struct Monomial {
    int a;
    int b;
};

/// Stress interpolation in master space for equal degrees p = q.
/// Rows are (tau_xixi, tau_etaeta, tau_xieta); every column belongs to
/// exactly one row.
class StressBasis {
public:
    StressBasis(int degree, std::array<std::vector<Monomial>, 3> rows)
        : degree_(degree), rows_(std::move(rows)) {}

    int degree() const noexcept { return degree_; }
    const std::array<std::vector<Monomial>, 3>& rows() const noexcept { return rows_; }

    int n_beta() const noexcept {
        return static_cast<int>(rows_[0].size() + rows_[1].size() + rows_[2].size());
    }

    /// P(xi~, eta~): 3 x n_beta.
    Eigen::MatrixXd evaluate(double xi, double eta) const {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3, n_beta());
        int col = 0;
        for (int r = 0; r < 3; ++r) {
            for (const Monomial& m : rows_[r]) {
                P(r, col++) = std::pow(xi, m.a) * std::pow(eta, m.b);
            }
        }
        return P;
    }

private:
    int degree_;
    std::array<std::vector<Monomial>, 3> rows_;
};

inline StressBasis stress_basis_for_degree(int p) {
    switch (p) {
        case 1:
            // 5 parameters; the normal rows follow the displayed matrix
            // (tau_etaeta varies with xi~)
            return StressBasis(1, {{{{0, 0}, {0, 1}},
                                    {{0, 0}, {1, 0}},
                                    {{0, 0}}}});
        case 2:
            return StressBasis(2, {{{{0, 0}, {1, 0}, {0, 1}, {1, 1}, {0, 2}, {1, 2}},
                                    {{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}, {2, 1}},
                                    {{0, 0}, {1, 0}, {0, 1}, {1, 1}}}});
        case 3:
            return StressBasis(3, {{{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2},
                                     {2, 1}, {1, 2}, {2, 2}, {2, 3}, {1, 3}, {0, 3}},
                                    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2},
                                     {2, 1}, {1, 2}, {2, 2}, {3, 1}, {3, 2}, {3, 0}},
                                    {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2},
                                     {2, 1}, {1, 2}, {2, 2}}}});
        default: {
            std::ostringstream msg;
            msg << "stress basis: degree " << p << " not supported (expected 1, 2 or 3)";
            throw ConfigError(msg.str());
        }
    }
}

}  // namespace hyiga

#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "hyiga/nurbs_patch.hpp"

namespace hyiga {

namespace detail {

// Homogeneous control point (w x, w y, w).
using HPoint = Eigen::Vector3d;

struct CurveData {
    std::vector<double> knots;
    std::vector<HPoint> points;
};

inline std::vector<std::vector<HPoint>> extract_lines(const NurbsPatch& patch, Direction dir) {
    const int nu = patch.num_u();
    const int nv = patch.num_v();
    const int lines = dir == Direction::u ? nv : nu;
    const int len = dir == Direction::u ? nu : nv;
    std::vector<std::vector<HPoint>> out(lines, std::vector<HPoint>(len));
    for (int l = 0; l < lines; ++l) {
        for (int k = 0; k < len; ++k) {
            const int i = dir == Direction::u ? k : l;
            const int j = dir == Direction::u ? l : k;
            const double w = patch.weight(i, j);
            const Vec2& x = patch.control_point(i, j);
            out[l][k] = HPoint(w * x.x(), w * x.y(), w);
        }
    }
    return out;
}

inline NurbsPatch rebuild(const NurbsPatch& patch, Direction dir, KnotVector new_basis,
                          const std::vector<std::vector<HPoint>>& lines) {
    KnotVector bu = dir == Direction::u ? new_basis : patch.basis_u();
    KnotVector bv = dir == Direction::v ? new_basis : patch.basis_v();
    const int nu = bu.num_basis();
    const int nv = bv.num_basis();
    std::vector<Vec2> cps(static_cast<std::size_t>(nu) * nv);
    std::vector<double> weights(cps.size());
    for (int j = 0; j < nv; ++j) {
        for (int i = 0; i < nu; ++i) {
            const HPoint& h = dir == Direction::u ? lines[j][i] : lines[i][j];
            const std::size_t idx = static_cast<std::size_t>(j) * nu + i;
            weights[idx] = h.z();
            cps[idx] = Vec2(h.x() / h.z(), h.y() / h.z());
        }
    }
    return NurbsPatch(std::move(bu), std::move(bv), std::move(cps), std::move(weights));
}

// Boehm single-knot insertion on one homogeneous control polygon.
inline std::vector<HPoint> insert_into_line(const std::vector<double>& U, int p, int span, double u,
                                            const std::vector<HPoint>& P) {
    const int n = static_cast<int>(P.size());
    std::vector<HPoint> Q(n + 1);
    for (int i = 0; i <= span - p; ++i) {
        Q[i] = P[i];
    }
    for (int i = span + 1; i <= n; ++i) {
        Q[i] = P[i - 1];
    }
    for (int i = std::max(span - p + 1, 0); i <= span; ++i) {
        const double den = U[i + p] - U[i];
        const double alpha = den > 0.0 ? (u - U[i]) / den : 0.0;
        Q[i] = alpha * P[i] + (1.0 - alpha) * P[i - 1];
    }
    return Q;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) {
        return 0.0;
    }
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Degree elevation of one curve by t (Bezier decomposition, elevation of each
// segment, and removal of the superfluous knots).
inline CurveData elevate_line(const std::vector<double>& U, int p, const std::vector<HPoint>& Pw, int t) {
    const int n = static_cast<int>(Pw.size()) - 1;
    const int m = n + p + 1;
    const int ph = p + t;
    const int ph2 = ph / 2;

    std::vector<std::vector<double>> bezalfs(ph + 1, std::vector<double>(p + 1, 0.0));
    bezalfs[0][0] = 1.0;
    bezalfs[ph][p] = 1.0;
    for (int i = 1; i <= ph2; ++i) {
        const double inv = 1.0 / binomial(ph, i);
        const int mpi = std::min(p, i);
        for (int j = std::max(0, i - t); j <= mpi; ++j) {
            bezalfs[i][j] = inv * binomial(p, j) * binomial(t, i - j);
        }
    }
    for (int i = ph2 + 1; i <= ph - 1; ++i) {
        const int mpi = std::min(p, i);
        for (int j = std::max(0, i - t); j <= mpi; ++j) {
            bezalfs[i][j] = bezalfs[ph - i][p - j];
        }
    }

    // Upper bounds on output sizes; trimmed at the end.
    const int distinct = static_cast<int>(U.size());
    std::vector<double> Uh(U.size() + static_cast<std::size_t>(distinct) * t + 1, 0.0);
    std::vector<HPoint> Qw(Pw.size() + static_cast<std::size_t>(distinct) * t + 1, HPoint::Zero());
    std::vector<HPoint> bpts(p + 1), ebpts(ph + 1), next_bpts(std::max(p - 1, 1));
    std::vector<double> alfs(std::max(p - 1, 1));

    int mh = ph;
    int kind = ph + 1;
    int r = -1;
    int a = p;
    int b = p + 1;
    int cind = 1;
    double ua = U[0];
    Qw[0] = Pw[0];
    for (int i = 0; i <= ph; ++i) {
        Uh[i] = ua;
    }
    for (int i = 0; i <= p; ++i) {
        bpts[i] = Pw[i];
    }
    while (b < m) {
        const int i0 = b;
        while (b < m && U[b] == U[b + 1]) {
            ++b;
        }
        const int mul = b - i0 + 1;
        mh = mh + mul + t;
        const double ub = U[b];
        const int oldr = r;
        r = p - mul;
        const int lbz = oldr > 0 ? (oldr + 2) / 2 : 1;
        const int rbz = r > 0 ? ph - (r + 1) / 2 : ph;
        if (r > 0) {
            const double numer = ub - ua;
            for (int k = p; k > mul; --k) {
                alfs[k - mul - 1] = numer / (U[a + k] - ua);
            }
            for (int j = 1; j <= r; ++j) {
                const int save = r - j;
                const int s = mul + j;
                for (int k = p; k >= s; --k) {
                    bpts[k] = alfs[k - s] * bpts[k] + (1.0 - alfs[k - s]) * bpts[k - 1];
                }
                next_bpts[save] = bpts[p];
            }
        }
        for (int i = lbz; i <= ph; ++i) {
            ebpts[i] = HPoint::Zero();
            const int mpi = std::min(p, i);
            for (int j = std::max(0, i - t); j <= mpi; ++j) {
                ebpts[i] += bezalfs[i][j] * bpts[j];
            }
        }
        if (oldr > 1) {
            int first = kind - 2;
            int last = kind;
            const double den = ub - ua;
            const double bet = (ub - Uh[kind - 1]) / den;
            for (int tr = 1; tr < oldr; ++tr) {
                int i = first;
                int j = last;
                int kj = j - kind + 1;
                while (j - i > tr) {
                    if (i < cind) {
                        const double alf = (ub - Uh[i]) / (ua - Uh[i]);
                        Qw[i] = alf * Qw[i] + (1.0 - alf) * Qw[i - 1];
                    }
                    if (j >= lbz) {
                        if (j - tr <= kind - ph + oldr) {
                            const double gam = (ub - Uh[j - tr]) / den;
                            ebpts[kj] = gam * ebpts[kj] + (1.0 - gam) * ebpts[kj + 1];
                        } else {
                            ebpts[kj] = bet * ebpts[kj] + (1.0 - bet) * ebpts[kj + 1];
                        }
                    }
                    ++i;
                    --j;
                    --kj;
                }
                --first;
                ++last;
            }
        }
        if (a != p) {
            for (int i = 0; i < ph - oldr; ++i) {
                Uh[kind] = ua;
                ++kind;
            }
        }
        for (int j = lbz; j <= rbz; ++j) {
            Qw[cind] = ebpts[j];
            ++cind;
        }
        if (b < m) {
            for (int j = 0; j < r; ++j) {
                bpts[j] = next_bpts[j];
            }
            for (int j = r; j <= p; ++j) {
                bpts[j] = Pw[b - p + j];
            }
            a = b;
            ++b;
            ua = ub;
        } else {
            for (int i = 0; i <= ph; ++i) {
                Uh[kind + i] = ub;
            }
        }
    }
    const int nh = mh - ph - 1;
    CurveData out;
    out.knots.assign(Uh.begin(), Uh.begin() + nh + ph + 2);
    out.points.assign(Qw.begin(), Qw.begin() + nh + 1);
    return out;
}

}  // namespace detail

/// Inserts one knot in the given direction. The geometry map is unchanged.
inline NurbsPatch insert_knot(const NurbsPatch& patch, Direction dir, double xi_new) {
    const KnotVector& kv = patch.basis(dir);
    const int p = kv.degree();
    if (!(xi_new > kv.front() && xi_new < kv.back())) {
        std::ostringstream msg;
        msg << "insert_knot: " << xi_new << " not strictly inside (" << kv.front() << ", " << kv.back() << ")";
        throw RefinementError(msg.str());
    }
    if (kv.multiplicity(xi_new) + 1 > p) {
        std::ostringstream msg;
        msg << "insert_knot: multiplicity of " << xi_new << " would exceed degree " << p;
        throw RefinementError(msg.str());
    }
    const int span = find_span(kv, xi_new);
    std::vector<double> knots = kv.knots();
    knots.insert(knots.begin() + span + 1, xi_new);

    auto lines = detail::extract_lines(patch, dir);
    for (auto& line : lines) {
        line = detail::insert_into_line(kv.knots(), p, span, xi_new, line);
    }
    return detail::rebuild(patch, dir, KnotVector(p, std::move(knots)), lines);
}

/// Raises the degree in one direction by `times`; every distinct knot gains
/// `times` in multiplicity so existing continuity is kept.
inline NurbsPatch elevate_degree(const NurbsPatch& patch, Direction dir, int times) {
    if (times < 1) {
        throw RefinementError("elevate_degree: times must be >= 1");
    }
    const KnotVector& kv = patch.basis(dir);
    if (!kv.is_open()) {
        throw RefinementError("elevate_degree: only open knot vectors are supported");
    }
    auto lines = detail::extract_lines(patch, dir);
    std::vector<double> new_knots;
    for (auto& line : lines) {
        detail::CurveData c = detail::elevate_line(kv.knots(), kv.degree(), line, times);
        new_knots = std::move(c.knots);
        line = std::move(c.points);
    }
    return detail::rebuild(patch, dir, KnotVector(kv.degree() + times, std::move(new_knots)), lines);
}

/// Splits every nonzero span in `dir` into `parts` equal pieces.
inline NurbsPatch subdivide(const NurbsPatch& patch, Direction dir, int parts) {
    if (parts < 1) {
        throw RefinementError("subdivide: parts must be >= 1");
    }
    const std::vector<double> breaks = patch.basis(dir).unique_knots();
    NurbsPatch out = patch;
    for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
        const double a = breaks[s];
        const double b = breaks[s + 1];
        for (int k = 1; k < parts; ++k) {
            out = insert_knot(out, dir, a + (b - a) * k / parts);
        }
    }
    return out;
}

/// Uniform h-refinement: `levels` rounds of midpoint splitting.
inline NurbsPatch refine_uniform(const NurbsPatch& patch, Direction dir, int levels) {
    return subdivide(patch, dir, 1 << levels);
}

/// k-refinement: elevate both directions to `degree` first, then subdivide,
/// so inserted knots carry maximal continuity.
inline NurbsPatch k_refine(const NurbsPatch& patch, int degree, int parts_u, int parts_v) {
    NurbsPatch out = patch;
    if (degree < patch.degree_u() || degree < patch.degree_v()) {
        std::ostringstream msg;
        msg << "k_refine: base patch degree (" << patch.degree_u() << "," << patch.degree_v()
            << ") exceeds requested degree " << degree;
        throw RefinementError(msg.str());
    }
    if (degree > out.degree_u()) {
        out = elevate_degree(out, Direction::u, degree - out.degree_u());
    }
    if (degree > out.degree_v()) {
        out = elevate_degree(out, Direction::v, degree - out.degree_v());
    }
    out = subdivide(out, Direction::u, parts_u);
    return subdivide(out, Direction::v, parts_v);
}

}  // namespace hyiga

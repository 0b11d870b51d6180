#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hyiga/format.hpp"
#include "hyiga/geometry.hpp"
#include "hyiga/solution.hpp"

namespace hyiga::bench {

using Vec3 = Eigen::Vector3d;

enum class Problem { straight_beam, curved_beam, cook, plate };

inline std::string to_string(Problem p) {
    switch (p) {
        case Problem::straight_beam:
            return "beam";
        case Problem::curved_beam:
            return "curved_beam";
        case Problem::cook:
            return "cook";
        case Problem::plate:
        default:
            return "plate";
    }
}

inline Problem parse_problem(const std::string& s) {
    if (s == "beam" || s == "straight_beam") {
        return Problem::straight_beam;
    }
    if (s == "curved_beam" || s == "curved") {
        return Problem::curved_beam;
    }
    if (s == "cook") {
        return Problem::cook;
    }
    if (s == "plate" || s == "plate_with_hole") {
        return Problem::plate;
    }
    throw ConfigError("unknown problem '" + s + "' (expected beam, curved_beam, cook or plate)");
}

/// Closed-form plane-strain solution for an infinite plate with a circular
/// hole under remote uniaxial tension `T` along x.
struct PlateWithHoleExact {
    double radius = 1.0;
    double tension = 1.0;
    double E = 1000.0;
    double nu = 0.3;

    Vec3 stress(const Vec2& x) const {
        const double r = x.norm(), phi = std::atan2(x.y(), x.x());
        const double a2 = radius * radius / (r * r), a4 = a2 * a2;
        const double c2 = std::cos(2 * phi), c4 = std::cos(4 * phi), s2 = std::sin(2 * phi), s4 = std::sin(4 * phi);
        return tension * Vec3(1.0 - a2 * (1.5 * c2 + c4) + 1.5 * a4 * c4, -a2 * (0.5 * c2 - c4) - 1.5 * a4 * c4,
                              -a2 * (0.5 * s2 + s4) + 1.5 * a4 * s4);
    }

    Vec2 displacement(const Vec2& x) const {
        const double r = x.norm(), phi = std::atan2(x.y(), x.x());
        const double mu = E / (2.0 * (1.0 + nu));
        const double k = 3.0 - 4.0 * nu;
        const double R = radius;
        const double f = tension * R / (8.0 * mu);
        const double ux = f * (r / R * (k + 1) * std::cos(phi) + 2 * R / r * ((1 + k) * std::cos(phi) + std::cos(3 * phi)) -
                               2 * R * R * R / (r * r * r) * std::cos(3 * phi));
        const double uy = f * (r / R * (k - 3) * std::sin(phi) + 2 * R / r * ((1 - k) * std::sin(phi) + std::sin(3 * phi)) -
                               2 * R * R * R / (r * r * r) * std::sin(3 * phi));
        return {ux, uy};
    }
};

/// Parameters that select and override a case.
struct CaseParams {
    double slenderness = 10.0;  // L/t or R/t for the beams
    double nu = 0.3;            // plate only
    std::optional<double> E;
    std::optional<double> nu_override;  // replaces the case's Poisson ratio (beams, Cook)
};

struct BenchmarkCase {
    Problem problem = Problem::straight_beam;
    std::string name;
    NurbsPatch base;
    Material material{1.0, 0.0, Regime::plane_stress};
    BoundaryConditions bcs;
    int min_degree = 1;
    bool refine_v = true;

    // tip quantity: component of u at a parametric point, normalized
    double tip_xi = 1.0, tip_eta = 1.0;
    Vec2 tip_direction{0.0, 1.0};
    double tip_reference = 1.0;

    std::optional<PlateWithHoleExact> exact;
    bool l2_against_fine_run = false;  // Cook: compare with a converged cubic hybrid run

    /// Elements per base span at ladder level L: 2^L along xi, and along eta
    /// unless the case refines the length only.
    std::pair<int, int> parts(int level) const {
        const int n = 1 << level;
        return {n, refine_v ? n : 1};
    }

    NurbsPatch discretize(int degree, int level) const {
        if (degree < min_degree || degree > 3) {
            std::ostringstream msg;
            msg << name << ": degree " << degree << " unsupported (valid: " << min_degree << "..3)";
            throw ConfigError(msg.str());
        }
        if (level < 0 || level > 6) {
            throw ConfigError(name + ": refinement level must be in 0..6");
        }
        const auto [pu, pv] = parts(level);
        return k_refine(base, degree, pu, pv);
    }
};

inline Material make_material(double E, double nu, Regime r, const CaseParams& p) {
    return Material(p.E.value_or(E), p.nu_override.value_or(nu), r);
}

/// Cantilever [0,100] x [0,t], clamped at x = 0, uniform shear on x = 100
/// with the listed resultants. Tip: u_y at (100, t), reference 20.
inline BenchmarkCase case_straight_beam(const CaseParams& p) {
    const double L = 100.0;
    double fy = 0.0;
    if (p.slenderness == 10.0) {
        fy = 4.97018;
    } else if (p.slenderness == 100.0) {
        fy = 4.9997e-3;
    } else if (p.slenderness == 1000.0) {
        fy = 4.9999e-6;
    } else {
        std::ostringstream msg;
        msg << "beam: slenderness " << p.slenderness << " not in {10, 100, 1000}";
        throw ConfigError(msg.str());
    }
    const double t = L / p.slenderness;
    BenchmarkCase c;
    c.problem = Problem::straight_beam;
    std::ostringstream name;
    name << "beam_L/t=" << p.slenderness;
    c.name = name.str();
    c.base = geometry::straight_beam(L, t);
    c.material = make_material(1000.0, 0.0, Regime::plane_stress, p);
    c.bcs.fixed.push_back({Edge::xi_min, true, true});
    c.bcs.tractions.push_back({Edge::xi_max, [q = fy / t](const Vec2&, const Vec2&) { return Vec2(0.0, q); }});
    c.refine_v = false;
    c.tip_xi = 1.0;
    c.tip_eta = 1.0;
    c.tip_direction = Vec2(0, 1);
    c.tip_reference = 20.0;
    return c;
}

/// Quarter ring of mean radius 10, clamped on the y axis, loaded by
/// f_x = 0.1 t^3 on the free end at y = 0. Tip: radial (x) displacement at
/// mid-thickness, reference 0.942.
inline BenchmarkCase case_curved_beam(const CaseParams& p) {
    if (!(p.slenderness == 10.0 || p.slenderness == 100.0 || p.slenderness == 1000.0)) {
        std::ostringstream msg;
        msg << "curved_beam: slenderness " << p.slenderness << " not in {10, 100, 1000}";
        throw ConfigError(msg.str());
    }
    const double R = 10.0;
    const double t = R / p.slenderness;
    const double fx = 0.1 * t * t * t;
    BenchmarkCase c;
    c.problem = Problem::curved_beam;
    std::ostringstream name;
    name << "curved_beam_R/t=" << p.slenderness;
    c.name = name.str();
    c.base = geometry::curved_beam(R - 0.5 * t, R + 0.5 * t);
    c.material = make_material(1000.0, 0.0, Regime::plane_stress, p);
    c.bcs.fixed.push_back({Edge::xi_min, true, true});
    c.bcs.tractions.push_back({Edge::xi_max, [q = fx / t](const Vec2&, const Vec2&) { return Vec2(q, 0.0); }});
    c.min_degree = 2;
    c.refine_v = false;
    c.tip_xi = 1.0;
    c.tip_eta = 0.5;
    c.tip_direction = Vec2(1, 0);
    c.tip_reference = 0.942;
    return c;
}

/// Tapered panel clamped at x = 0 with a total shear load of 100 on x = 48.
/// Tip: u_y at the top right corner (48, 60), reference 7.7.
inline BenchmarkCase case_cook(const CaseParams& p) {
    BenchmarkCase c;
    c.problem = Problem::cook;
    c.name = "cook";
    c.base = geometry::cook_membrane();
    c.material = make_material(250.0, 0.4999, Regime::plane_strain, p);
    c.bcs.fixed.push_back({Edge::xi_min, true, true});
    c.bcs.tractions.push_back({Edge::xi_max, [](const Vec2&, const Vec2&) { return Vec2(0.0, 100.0 / 16.0); }});
    c.tip_xi = 1.0;
    c.tip_eta = 1.0;
    c.tip_direction = Vec2(0, 1);
    c.tip_reference = 7.7;
    c.l2_against_fine_run = true;
    return c;
}

/// Quarter of a 8 x 8 plate with a unit hole, exact tractions on the outer
/// edges, symmetry on the cut edges, plane strain with E = 1000.
inline BenchmarkCase case_plate(const CaseParams& p) {
    BenchmarkCase c;
    c.problem = Problem::plate;
    std::ostringstream name;
    name << "plate_nu=" << p.nu;
    c.name = name.str();
    c.base = geometry::plate_with_hole_quadratic();
    c.material = Material(p.E.value_or(1000.0), p.nu, Regime::plane_strain);
    PlateWithHoleExact ex;
    ex.E = c.material.youngs_modulus();
    ex.nu = c.material.poisson_ratio();
    c.exact = ex;
    c.bcs.tractions.push_back({Edge::eta_max, [ex](const Vec2& x, const Vec2& n) {
                                   const Vec3 s = ex.stress(x);
                                   return Vec2(s(0) * n.x() + s(2) * n.y(), s(2) * n.x() + s(1) * n.y());
                               }});
    c.bcs.fixed.push_back({Edge::xi_min, false, true});  // y = 0
    c.bcs.fixed.push_back({Edge::xi_max, true, false});  // x = 0
    c.min_degree = 2;
    c.tip_xi = 1.0;  // top of the hole, (0, 1)
    c.tip_eta = 0.0;
    c.tip_direction = Vec2(0, 1);
    c.tip_reference = ex.displacement(Vec2(0.0, 1.0)).y();
    return c;
}

inline BenchmarkCase make_case(Problem pr, const CaseParams& p) {
    switch (pr) {
        case Problem::straight_beam:
            return case_straight_beam(p);
        case Problem::curved_beam:
            return case_curved_beam(p);
        case Problem::cook:
            return case_cook(p);
        case Problem::plate:
        default:
            return case_plate(p);
    }
}

/// One analysis on the ladder.
struct RunResult {
    Problem problem = Problem::straight_beam;
    std::string case_name;
    Formulation formulation = Formulation::conventional;
    int degree = 0;
    int level = 0;
    int active_dof = 0;
    double tip = 0.0;  // raw tip quantity
    double normalized_tip = 0.0;
    double l2_error = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    std::shared_ptr<const Solution> solution;  // kept on request for export
};

namespace detail {

struct FineRun {
    NurbsPatch patch;
    VectorXd u;
};

inline std::string fine_key(const BenchmarkCase& c, const ElementOptions& opt) {
    std::ostringstream k;
    k.precision(17);
    k << c.name << '|' << c.material.youngs_modulus() << '|' << c.material.poisson_ratio() << '|'
      << to_string(opt.t_eval);
    return k.str();
}

}  // namespace detail

inline constexpr int kFineDegree = 3;
inline constexpr int kFineLevel = 5;  // 32 x 32

/// Converged cubic hybrid solution used as the Cook L2 reference; computed once
/// per material and option set.
inline const detail::FineRun& fine_reference(const BenchmarkCase& c, const ElementOptions& opt) {
    static std::mutex mu;
    static std::map<std::string, std::unique_ptr<detail::FineRun>> cache;
    const std::string key = detail::fine_key(c, opt);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it == cache.end()) {
        const NurbsPatch patch = c.discretize(kFineDegree, kFineLevel);
        Solution s = analyze(patch, c.material, Formulation::hybrid, c.bcs, opt);
        it = cache.emplace(key, std::make_unique<detail::FineRun>(detail::FineRun{patch, std::move(s.u)})).first;
    }
    return *it->second;
}

inline ReferenceField reference_field(const BenchmarkCase& c, const ElementOptions& opt) {
    if (c.exact) {
        const PlateWithHoleExact ex = *c.exact;
        return [ex](double, double, const Vec2& x) { return ex.displacement(x); };
    }
    if (c.l2_against_fine_run) {
        const detail::FineRun& fine = fine_reference(c, opt);
        // refinement keeps the parametrization, so parametric points coincide
        return [&fine](double xi, double eta, const Vec2&) { return displacement_at(fine.patch, fine.u, xi, eta); };
    }
    return {};
}

inline RunResult run_one(const BenchmarkCase& c, Formulation f, int degree, int level, const ElementOptions& opt,
                         bool keep_solution = false) {
    const NurbsPatch patch = c.discretize(degree, level);
    auto sp = std::make_shared<Solution>(analyze(patch, c.material, f, c.bcs, opt));
    const Solution& s = *sp;
    RunResult r;
    r.problem = c.problem;
    r.case_name = c.name;
    r.formulation = f;
    r.degree = degree;
    r.level = level;
    r.active_dof = s.active_dof();
    r.tip = displacement_at(s, c.tip_xi, c.tip_eta).dot(c.tip_direction);
    r.normalized_tip = r.tip / c.tip_reference;
    r.residual = s.report.relative_residual;
    if (const ReferenceField ref = reference_field(c, opt)) {
        r.l2_error = relative_L2_error(s, ref);
    }
    if (keep_solution) {
        r.solution = std::move(sp);
    }
    return r;
}

/// Worker count: HYIGA_THREADS if set and positive, else the hardware count.
inline unsigned thread_limit() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HYIGA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            n = static_cast<unsigned>(v);
        }
    }
    return n;
}

struct StudySpec {
    std::vector<Formulation> formulations;
    std::vector<int> degrees;
    std::vector<int> levels;
};

/// Runs the cartesian product formulation x degree x level. Runs execute
/// concurrently; rows come back in that nested order regardless of scheduling.
inline std::vector<RunResult> run_study(const BenchmarkCase& c, const StudySpec& spec, const ElementOptions& opt = {},
                                        unsigned threads = 0, bool keep_solutions = false) {
    struct Job {
        Formulation f;
        int degree;
        int level;
    };
    std::vector<Job> jobs;
    for (Formulation f : spec.formulations) {
        for (int d : spec.degrees) {
            for (int l : spec.levels) {
                c.discretize(d, l);  // validate up front: nothing runs on a bad study
                jobs.push_back({f, d, l});
            }
        }
    }
    if (jobs.empty()) {
        throw ConfigError("run_study: empty study (need at least one formulation, degree and level)");
    }
    if (c.l2_against_fine_run) {
        fine_reference(c, opt);  // build once before fanning out
    }
    std::vector<RunResult> rows(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    const unsigned n_workers = std::min<unsigned>(threads > 0 ? threads : thread_limit(), jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            try {
                rows[k] = run_one(c, jobs[k].f, jobs[k].degree, jobs[k].level, opt, keep_solutions);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return rows;
}

inline const char* kCsvHeader = "problem,formulation,degree,refinement,active_dof,normalized_tip,l2_error";

inline std::string csv_row(const RunResult& r) {
    std::ostringstream o;
    o << to_string(r.problem) << ',' << to_string(r.formulation) << ',' << r.degree << ',' << r.level << ','
      << r.active_dof << ',' << format_double(r.normalized_tip) << ',' << format_double(r.l2_error);
    return o.str();
}

inline std::string to_csv(const std::vector<RunResult>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const RunResult& r : rows) {
        out += csv_row(r);
        out += '\n';
    }
    return out;
}

}  // namespace hyiga::bench

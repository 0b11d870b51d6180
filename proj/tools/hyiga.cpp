// hyiga: benchmark studies, acceptance checks and geometry export.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure (or a
// failed acceptance criterion under `verify`).
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyiga/config.hpp"
#include "hyiga/patch_io.hpp"
#include "hyiga/postprocess.hpp"
#include "hyiga/verify.hpp"

namespace fs = std::filesystem;
using namespace hyiga;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// flag name -> config key; every key settable in a file has a flag
const std::vector<std::pair<std::string, std::string>> kFlagKeys{
    {"problem", "run.problem"},       {"formulation", "run.formulation"}, {"degree", "run.degree"},
    {"refine", "run.refine"},         {"slenderness", "run.slenderness"}, {"nu", "run.nu"},
    {"t-eval", "run.t_eval"},         {"quadrature", "run.quadrature"},   {"E", "material.E"},
    {"material-nu", "material.nu"},   {"output-dir", "output.dir"},       {"formats", "output.formats"},
    {"vtk-samples", "output.vtk_samples"}, {"magnification", "output.magnification"},
};

nlohmann::json number_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::string run_stem(const bench::RunResult& r) {
    return bench::to_string(r.problem) + "_" + to_string(r.formulation) + "_p" + std::to_string(r.degree) + "_r" +
           std::to_string(r.level);
}

/// Everything that goes to disk, built in memory first so a failure writes nothing.
using Artifacts = std::map<std::string, std::string>;

nlohmann::json summary_json(const RunConfig& cfg, const bench::BenchmarkCase& cs,
                            const std::vector<bench::RunResult>& rows) {
    nlohmann::json j;
    j["problem"] = bench::to_string(cfg.problem);
    j["case"] = cs.name;
    j["material"] = {{"E", cs.material.youngs_modulus()},
                     {"nu", cs.material.poisson_ratio()},
                     {"regime", cs.material.regime() == Regime::plane_strain ? "plane_strain" : "plane_stress"}};
    j["t_eval"] = to_string(cfg.t_eval);
    j["quadrature"] = cfg.quadrature;
    j["tip"] = {{"xi", cs.tip_xi}, {"eta", cs.tip_eta}, {"reference", cs.tip_reference}};
    j["magnification"] = cfg.magnification;
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json e{{"formulation", to_string(r.formulation)},
                         {"degree", r.degree},
                         {"refinement", r.level},
                         {"active_dof", r.active_dof},
                         {"tip", r.tip},
                         {"normalized_tip", r.normalized_tip},
                         {"l2_error", number_or_null(r.l2_error)},
                         {"relative_residual", r.residual}};
        if (cfg.problem == bench::Problem::curved_beam && r.solution) {
            // the measuring surface is a modelling choice; report all three
            nlohmann::json s;
            for (const auto& [label, eta] : {std::pair{"inner", 0.0}, {"mid", 0.5}, {"outer", 1.0}}) {
                s[label] = displacement_at(*r.solution, cs.tip_xi, eta).dot(cs.tip_direction) / cs.tip_reference;
            }
            e["normalized_tip_across_thickness"] = s;
        }
        runs.push_back(std::move(e));
    }
    j["runs"] = std::move(runs);
    return j;
}

Artifacts build_artifacts(const RunConfig& cfg, const bench::BenchmarkCase& cs,
                          const std::vector<bench::RunResult>& rows) {
    Artifacts out;
    if (cfg.formats.count(OutputFormat::csv)) {
        out["study.csv"] = bench::to_csv(rows);
    }
    out["summary.json"] = summary_json(cfg, cs, rows).dump(2) + "\n";
    for (const auto& r : rows) {
        const std::string stem = run_stem(r);
        const Solution& s = *r.solution;
        if (cfg.formats.count(OutputFormat::vtk)) {
            out[stem + ".vtk"] = vtk_string(sample_fields(s, cfg.vtk_samples), cs.name + " " + stem);
            out[stem + "_net.vtk"] = control_net_vtk_string(s.mesh.patch, s.u, cfg.magnification);
            out[stem + "_deformed.json"] = dump_patch(deformed_patch(s.mesh.patch, s.u));
        }
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.flush();
    if (!f) {
        throw InputError("cannot write '" + path.string() + "'");
    }
}

int cmd_run(const std::string& config_path, const RawConfig& flags) {
    RunConfig cfg;
    bench::BenchmarkCase cs;
    try {
        RawConfig raw = config_path.empty() ? RawConfig{} : load_ini(config_path);
        for (const auto& [k, v] : flags) {
            raw[k] = v;
        }
        cfg = build_config(raw);
        cs = bench::make_case(cfg.problem, cfg.case_params());
    } catch (const ConfigError& e) {
        std::cerr << "hyiga: config error: " << e.what() << '\n';
        return kExitConfig;
    }

    const bool keep = cfg.formats.count(OutputFormat::vtk) || cfg.formats.count(OutputFormat::mm) ||
                      cfg.problem == bench::Problem::curved_beam;
    std::vector<bench::RunResult> rows;
    Artifacts files;
    try {
        rows = bench::run_study(cs, {cfg.formulations, cfg.degrees, cfg.levels}, cfg.element_options(), 0, keep);
        files = build_artifacts(cfg, cs, rows);
    } catch (const ConfigError& e) {
        std::cerr << "hyiga: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "hyiga: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }

    try {
        const fs::path dir(cfg.output_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
        }
        for (const auto& [name, text] : files) {
            write_text(dir / name, text);
        }
        if (cfg.formats.count(OutputFormat::mm)) {
            for (const auto& r : rows) {
                export_matrix_market(r.solution->system.K, (dir / (run_stem(r) + "_K.mtx")).string());
            }
        }
    } catch (const Error& e) {
        std::cerr << "hyiga: " << e.what() << '\n';
        return kExitConfig;
    }

    std::cout << bench::kCsvHeader << '\n';
    for (const auto& r : rows) {
        std::cout << bench::csv_row(r) << '\n';
    }
    return 0;
}

int cmd_verify() {
    bool all = true;
    for (const auto& r : verify::run_all()) {
        std::cout << verify::format_line(r) << '\n';
        all = all && r.passed;
    }
    return all ? 0 : kExitNumerical;
}

int cmd_export_geometry(const std::string& name, double slenderness, int degree, int level, const std::string& out) {
    NurbsPatch patch;
    try {
        bench::CaseParams p;
        p.slenderness = slenderness;
        const bench::BenchmarkCase cs = bench::make_case(bench::parse_problem(name), p);
        if (degree == 0 && level == 0) {
            patch = cs.base;
        } else {
            patch = cs.discretize(degree > 0 ? degree : std::max(cs.base.degree_u(), cs.min_degree), level);
        }
    } catch (const ConfigError& e) {
        std::cerr << "hyiga: config error: " << e.what() << '\n';
        return kExitConfig;
    }
    const std::string text = dump_patch(patch);
    if (out.empty()) {
        std::cout << text;
        return 0;
    }
    try {
        write_text(out, text);
    } catch (const Error& e) {
        std::cerr << "hyiga: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyiga: hybrid-stress isogeometric analysis benchmarks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a convergence study and write CSV/JSON/VTK");
    std::string config_path;
    run->add_option("-c,--config", config_path, "INI file; flags override its values");
    std::map<std::string, std::string> flag_values;
    for (const auto& [flag, key] : kFlagKeys) {
        run->add_option("--" + flag, flag_values[flag], "sets " + key);
    }

    app.add_subcommand("verify", "run the acceptance criteria");

    auto* geo = app.add_subcommand("export-geometry", "print a benchmark's NURBS patch as JSON");
    std::string case_name, geo_out;
    double slenderness = 10.0;
    int degree = 0, level = 0;
    geo->add_option("case", case_name, "beam, curved_beam, cook or plate")->required();
    geo->add_option("--slenderness", slenderness, "L/t or R/t for the beams");
    geo->add_option("--degree", degree, "elevate to this degree (default: base patch)");
    geo->add_option("--refine", level, "refinement level");
    geo->add_option("-o,--output", geo_out, "write to file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (run->parsed()) {
        RawConfig flags;
        for (const auto& [flag, key] : kFlagKeys) {
            if (run->count("--" + flag) > 0) {
                flags[key] = {flag_values[flag], "--" + flag};
            }
        }
        return cmd_run(config_path, flags);
    }
    if (app.got_subcommand("verify")) {
        return cmd_verify();
    }
    return cmd_export_geometry(case_name, slenderness, degree, level, geo_out);
}

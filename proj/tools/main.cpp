#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "sc/io/io.hpp"
#include "sc/step/lower.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// exit codes: 2 parse error, 3 geometry error, 4 config error
constexpr int kExitParse = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitConfig = 4;

struct CommonOptions {
    std::string step_path;
    std::string case_name;
    std::string bc_path;
    double h = 0.0;
    std::size_t target_n = 0;
    std::string lattice = "triangular";
    double t = 0.3;
    std::string indicator = "zz";
    bool zz_weighted = true;
    std::string zz_mode = "direct";
    double zz_scale = 1.0;
    double f = 0.05;
    double alpha = 3.0;
    bool relax = false;
    int iters = 4;
    std::string out_dir = ".";
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->set_help_flag("--help", "print this help message");  // frees -h for --h
    cmd->add_option("--step", o.step_path, "STEP file input");
    cmd->add_option("--case", o.case_name, "builtin case: kirsch | inglis");
    cmd->add_option("--bc", o.bc_path, "boundary-condition JSON (with --step)");
    cmd->add_option("--h", o.h, "characteristic length");
    cmd->add_option("--target-n", o.target_n, "target node count");
    cmd->add_option("--lattice", o.lattice, "square | triangular")->capture_default_str();
    cmd->add_option("--t", o.t, "boundary proximity threshold")->capture_default_str();
    cmd->add_option("--indicator", o.indicator, "zz | residual")->capture_default_str();
    cmd->add_option("--zz-weighted", o.zz_weighted, "spline-weighted MLS recovery")
        ->capture_default_str();
    cmd->add_option("--zz-mode", o.zz_mode, "direct | indirect")->capture_default_str();
    cmd->add_option("--zz-scale", o.zz_scale, "recovery stencil scale")->capture_default_str();
    cmd->add_option("-f", o.f, "marking fraction")->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "pruning divisor")->capture_default_str();
    cmd->add_option("--relax", o.relax, "local node relaxation")->capture_default_str();
    cmd->add_option("--iters", o.iters, "adaptive iterations")->capture_default_str();
    cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--threads", o.threads, "worker threads")->capture_default_str();
}

void fail(int code, const std::string& kind, const std::string& message) {
    json err{{"error", kind}, {"message", message}};
    std::cerr << err.dump() << '\n';
    std::exit(code);
}

struct Problem {
    sc::bench::BenchmarkCase bench;  // exact-solution case when builtin
    bool builtin = false;
    std::shared_ptr<const sc::geom::BRepModel2D> brep;
    sc::gfd::MaterialModel material;
    std::vector<sc::cloud::BCSpec> bcs;
};

Problem load_problem(const CommonOptions& o) {
    Problem p;
    if (!o.case_name.empty() && !o.step_path.empty())
        fail(kExitConfig, "config", "use exactly one of --step or --case");
    if (o.case_name.empty() && o.step_path.empty())
        fail(kExitConfig, "config", "one of --step or --case is required");

    if (!o.case_name.empty()) {
        try {
            p.bench = sc::bench::make_case_by_name(o.case_name);
        } catch (const std::exception& e) {
            fail(kExitConfig, "config", e.what());
        }
        p.builtin = true;
        p.brep = p.bench.brep;
        p.material = p.bench.material;
        p.bcs = p.bench.bc_specs;
        return p;
    }

    if (o.bc_path.empty())
        fail(kExitConfig, "config", "--bc is required with --step");
    if (!fs::exists(o.bc_path))
        fail(kExitConfig, "config", "boundary-condition file not found: " + o.bc_path);

    std::ifstream is(o.step_path, std::ios::binary);
    if (!is) fail(kExitConfig, "config", "cannot open STEP file: " + o.step_path);
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    try {
        const sc::step::StepModel model = sc::step::parse_step(bytes);
        p.brep = std::make_shared<sc::geom::BRepModel2D>(sc::step::lower_to_brep(model));
    } catch (const sc::step::SyntaxError& e) {
        fail(kExitParse, "parse", e.what());
    } catch (const sc::step::DuplicateId& e) {
        fail(kExitParse, "parse", e.what());
    } catch (const sc::step::UnresolvedReference& e) {
        fail(kExitParse, "parse", e.what());
    } catch (const std::exception& e) {
        fail(kExitGeometry, "geometry", e.what());
    }
    try {
        const sc::io::ProblemConfig cfg = sc::io::read_problem_config(o.bc_path);
        p.material = cfg.material;
        p.bcs = cfg.bcs;
    } catch (const std::exception& e) {
        fail(kExitConfig, "config", e.what());
    }
    return p;
}

sc::cloud::CloudParams cloud_params(const CommonOptions& o) {
    sc::cloud::CloudParams cp;
    if (o.h > 0.0) cp.h = o.h;
    if (o.target_n > 0) cp.target_n = o.target_n;
    if (!cp.h && !cp.target_n) cp.target_n = 5000;
    cp.lattice =
        o.lattice == "square" ? sc::cloud::Lattice::Square : sc::cloud::Lattice::Triangular;
    cp.t = o.t;
    return cp;
}

sc::cloud::SmartCloud make_cloud(const Problem& p, const CommonOptions& o) {
    try {
        sc::cloud::SmartCloud c = sc::cloud::build_cloud(p.brep, cloud_params(o));
        if (p.builtin)
            sc::bench::apply_case_bcs(p.bench, c);
        else
            sc::cloud::assign_boundary_conditions(c, p.bcs);
        return c;
    } catch (const sc::cloud::UnknownEntity& e) {
        fail(kExitConfig, "config", e.what());
    } catch (const std::exception& e) {
        fail(kExitGeometry, "geometry", e.what());
    }
    std::abort();
}

sc::gfd::StencilConfig stencil_config(const CommonOptions& o) {
    sc::gfd::StencilConfig scfg;
    scfg.threads = o.threads;
    return scfg;
}

sc::ind::ZZConfig zz_config(const CommonOptions& o) {
    sc::ind::ZZConfig z;
    z.weighted = o.zz_weighted;
    z.mode = o.zz_mode == "indirect" ? sc::ind::ZZMode::IndirectComponents
                                     : sc::ind::ZZMode::DirectVM;
    z.scale = o.zz_scale;
    return z;
}

void ensure_out(const CommonOptions& o) {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) fail(kExitConfig, "config", "cannot create output directory " + o.out_dir);
}

int cmd_discretize(const CommonOptions& o) {
    const Problem p = load_problem(o);
    ensure_out(o);
    const sc::cloud::SmartCloud c = make_cloud(p, o);
    sc::io::write_cloud_vtk(fs::path(o.out_dir) / "cloud_it0.vtk", c);
    sc::io::write_cloud_csv(fs::path(o.out_dir) / "cloud_it0.csv", c);
    const std::size_t nb = c.boundary_count();
    std::cout << "nodes " << c.nodes.size() << " (boundary " << nb << ", interior "
              << c.nodes.size() - nb << "), h " << sc::io::format_g17(c.h) << '\n';
    return 0;
}

// Solve on a builtin case (exact Dirichlet data) or a STEP+config problem.
int cmd_solve(const CommonOptions& o) {
    const Problem p = load_problem(o);
    ensure_out(o);
    const sc::cloud::SmartCloud c = make_cloud(p, o);
    sc::gfd::StencilConfig scfg = stencil_config(o);
    try {
        sc::bench::BenchmarkCase bc = p.bench;
        if (!p.builtin) {
            bc.brep = p.brep;
            bc.material = p.material;
            bc.bc_specs = p.bcs;
        }
        const sc::bench::SolveOutcome outcome = sc::bench::solve_case(bc, c, scfg);
        sc::io::write_solution_vtk(fs::path(o.out_dir) / "solution.vtk", c, outcome.sol);
        sc::io::write_cloud_csv(fs::path(o.out_dir) / "cloud_it0.csv", c);
        sc::io::JsonlWriter stats(fs::path(o.out_dir) / "stats.jsonl");
        json j{{"n_nodes", c.nodes.size()},
               {"kappa_max", outcome.kappa_max},
               {"residual", outcome.sol.residual},
               {"t_stencil_s", outcome.t_stencil_s},
               {"t_assemble_s", outcome.t_assemble_s},
               {"t_solve_s", outcome.t_solve_s}};
        stats.write_raw(j.dump());
        std::cout << "solved " << c.nodes.size() << " nodes, residual "
                  << sc::io::format_g17(outcome.sol.residual) << ", kappa_max "
                  << sc::io::format_g17(outcome.kappa_max) << '\n';
        return 0;
    } catch (const std::exception& e) {
        fail(kExitGeometry, "solve", e.what());
    }
    return 0;
}

int cmd_indicate(const CommonOptions& o) {
    const Problem p = load_problem(o);
    ensure_out(o);
    const sc::cloud::SmartCloud c = make_cloud(p, o);
    sc::gfd::StencilConfig scfg = stencil_config(o);
    try {
        sc::bench::BenchmarkCase bc = p.bench;
        if (!p.builtin) {
            bc.brep = p.brep;
            bc.material = p.material;
            bc.bc_specs = p.bcs;
        }
        const sc::bench::SolveOutcome outcome = sc::bench::solve_case(bc, c, scfg);
        sc::ind::ErrorField err;
        if (o.indicator == "residual")
            err = sc::ind::residual_indicator(c, outcome.sol, bc.material, scfg, o.threads);
        else
            err = sc::ind::zz_indicator(c, outcome.stencils, outcome.sol, bc.material,
                                        zz_config(o), o.threads);
        sc::io::write_error_csv(fs::path(o.out_dir) / "error_it0.csv", err);
        sc::io::write_error_vtk(fs::path(o.out_dir) / "error_it0.vtk", c, err);
        std::cout << "indicator " << o.indicator << " L2W "
                  << sc::io::format_g17(sc::ind::l2w_indicator(err.e)) << '\n';
        return 0;
    } catch (const std::exception& e) {
        fail(kExitGeometry, "indicate", e.what());
    }
    return 0;
}

int cmd_adapt(const CommonOptions& o) {
    const Problem p = load_problem(o);
    if (!p.builtin)
        fail(kExitConfig, "config",
             "adapt requires a builtin case (exact boundary data drives refreshes)");
    ensure_out(o);
    sc::cloud::SmartCloud c = make_cloud(p, o);
    sc::gfd::StencilConfig scfg = stencil_config(o);
    sc::adapt::AdaptConfig acfg;
    acfg.f = o.f;
    acfg.alpha = o.alpha;
    acfg.relax = o.relax;
    acfg.max_iterations = o.iters;
    acfg.early_stop = false;

    try {
        sc::io::JsonlWriter report(fs::path(o.out_dir) / "report.jsonl");
        auto dump = [&](const sc::bench::IterationRecord& rec, const sc::cloud::SmartCloud& cl,
                        const sc::gfd::SolutionField&, const sc::ind::ErrorField& err) {
            sc::io::write_cloud_vtk(
                fs::path(o.out_dir) / ("cloud_it" + std::to_string(rec.iteration) + ".vtk"), cl);
            sc::io::write_error_csv(
                fs::path(o.out_dir) / ("error_it" + std::to_string(rec.iteration) + ".csv"), err);
            if (rec.iteration > 0) report.write_iteration(rec);
        };
        const sc::bench::AdaptiveRun run =
            sc::bench::run_adaptive(p.bench, std::move(c), scfg, acfg, zz_config(o), dump);
        std::cout << "adapted to " << run.cloud.nodes.size() << " nodes over "
                  << run.history.size() - 1 << " iterations\n";
        return 0;
    } catch (const std::exception& e) {
        fail(kExitGeometry, "adapt", e.what());
    }
    return 0;
}

int cmd_study(const CommonOptions& o, const std::string& kind) {
    if (o.case_name.empty()) fail(kExitConfig, "config", "study requires --case");
    ensure_out(o);
    try {
        sc::bench::StudyParams sp;
        sp.case_kind = sc::bench::make_case_by_name(o.case_name).kind;
        if (o.target_n > 0) sp.target_n = o.target_n;
        sp.lattice =
            o.lattice == "square" ? sc::cloud::Lattice::Square : sc::cloud::Lattice::Triangular;
        sp.t = o.t;
        sp.threads = o.threads;
        sp.adapt_iterations = o.iters;
        const sc::bench::StudyTable table =
            sc::bench::run_study(sc::bench::study_kind_by_name(kind), sp);
        const fs::path out = fs::path(o.out_dir) / ("study_" + kind + ".csv");
        sc::io::write_study_csv(out, table);
        std::cout << "study " << kind << ": " << table.rows.size() << " rows -> " << out.string()
                  << '\n';
        return 0;
    } catch (const std::exception& e) {
        fail(kExitConfig, "study", e.what());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smart-cloud GFD collocation pipeline"};
    app.require_subcommand(1);

    CommonOptions o;
    std::string study_kind = "convergence";

    CLI::App* discretize = app.add_subcommand("discretize", "CAD to smart cloud");
    add_common(discretize, o);
    CLI::App* solve = app.add_subcommand("solve", "solve the collocation problem");
    add_common(solve, o);
    CLI::App* indicate = app.add_subcommand("indicate", "a posteriori error indication");
    add_common(indicate, o);
    CLI::App* adapt = app.add_subcommand("adapt", "h-adaptive refinement loop");
    add_common(adapt, o);
    CLI::App* study = app.add_subcommand("study", "parameter studies (CSV output)");
    add_common(study, o);
    study->add_option("--kind", study_kind,
                      "threshold_t | lattice_compare | convergence | f_sweep | relax_compare | "
                      "indicator_compare")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (discretize->parsed()) return cmd_discretize(o);
    if (solve->parsed()) return cmd_solve(o);
    if (indicate->parsed()) return cmd_indicate(o);
    if (adapt->parsed()) return cmd_adapt(o);
    if (study->parsed()) return cmd_study(o, study_kind);
    return 0;
}

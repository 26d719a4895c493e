#include "sc/bench/pipeline.hpp"

#include <chrono>
#include <cmath>

namespace sc::bench {

using geom::BRepEdge;
using geom::CircleArc;
using geom::EdgeLoop;
using geom::EllipseArc;
using geom::Line;
using geom::Vec2;

namespace {

constexpr double kPi = 3.14159265358979323846;

BRepEdge line_edge(int id, const Vec2& from, const Vec2& to) {
    BRepEdge e;
    e.id = id;
    Line l;
    l.origin = from;
    l.direction = (to - from).normalized();
    l.t0 = 0.0;
    l.t1 = (to - from).norm();
    e.curve = l;
    e.reversed = false;
    return e;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

geom::BRepModel2D kirsch_quarter_brep(double a, double L) {
    EdgeLoop outer;
    outer.edges.push_back(line_edge(1, {a, 0.0}, {L, 0.0}));
    outer.edges.push_back(line_edge(2, {L, 0.0}, {L, L}));
    outer.edges.push_back(line_edge(3, {L, L}, {0.0, L}));
    outer.edges.push_back(line_edge(4, {0.0, L}, {0.0, a}));
    BRepEdge arc;
    arc.id = 5;
    CircleArc c;
    c.center = {0.0, 0.0};
    c.radius = a;
    c.t0 = 0.0;
    c.t1 = 0.5 * kPi;
    arc.curve = c;
    arc.reversed = true;  // traversal from (0,a) down to (a,0)
    outer.edges.push_back(arc);
    return geom::BRepModel2D(std::move(outer), {});
}

geom::BRepModel2D inglis_half_brep(double a, double b, double L) {
    EdgeLoop outer;
    outer.edges.push_back(line_edge(1, {0.0, -b}, {0.0, -L}));
    outer.edges.push_back(line_edge(2, {0.0, -L}, {L, -L}));
    outer.edges.push_back(line_edge(3, {L, -L}, {L, L}));
    outer.edges.push_back(line_edge(4, {L, L}, {0.0, L}));
    outer.edges.push_back(line_edge(5, {0.0, L}, {0.0, b}));
    BRepEdge arc;
    arc.id = 6;
    EllipseArc e;
    e.center = {0.0, 0.0};
    e.a = a;
    e.b = b;
    e.rotation = 0.0;
    e.t0 = -0.5 * kPi;
    e.t1 = 0.5 * kPi;
    arc.curve = e;
    arc.reversed = true;  // traversal from (0,b) through (a,0) to (0,-b)
    outer.edges.push_back(arc);
    return geom::BRepModel2D(std::move(outer), {});
}

BenchmarkCase make_case(CaseKind kind) {
    BenchmarkCase bc;
    bc.kind = kind;
    if (kind == CaseKind::CylindricalHole) {
        bc.material.E = 1.0;
        bc.material.nu = 0.3;
        bc.material.plane = gfd::Plane::Strain;
        bc.brep = std::make_shared<geom::BRepModel2D>(kirsch_quarter_brep(bc.a, bc.L));
        bc.exact = kirsch_solution(bc.a, bc.S, bc.material);
        bc.hole_edge = 5;
        bc.tip_override = false;
        // bottom: u2 = 0; left: u1 = 0; right/top: exact displacements; arc free
        cloud::BCSpec bottom{cloud::BCSpec::Type::Dirichlet, {std::nullopt, 0.0}, 1};
        cloud::BCSpec right{cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 2};
        cloud::BCSpec top{cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 3};
        cloud::BCSpec left{cloud::BCSpec::Type::Dirichlet, {0.0, std::nullopt}, 4};
        cloud::BCSpec hole{cloud::BCSpec::Type::Free, {std::nullopt, std::nullopt}, 5};
        bc.bc_specs = {bottom, right, top, left, hole};
        bc.exact_dirichlet_edges = {2, 3};
    } else {
        bc.material.E = 1.0;
        bc.material.nu = 0.3;
        bc.material.plane = gfd::Plane::Stress;
        bc.brep = std::make_shared<geom::BRepModel2D>(inglis_half_brep(bc.a, bc.b, bc.L));
        bc.exact = inglis_solution(bc.a, bc.b, bc.biaxial_ratio * bc.S, bc.S, bc.material);
        bc.hole_edge = 6;
        cloud::BCSpec left_lo{cloud::BCSpec::Type::Dirichlet, {0.0, std::nullopt}, 1};
        cloud::BCSpec bottom{cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 2};
        cloud::BCSpec right{cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 3};
        cloud::BCSpec top{cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 4};
        cloud::BCSpec left_up{cloud::BCSpec::Type::Dirichlet, {0.0, std::nullopt}, 5};
        cloud::BCSpec hole{cloud::BCSpec::Type::Free, {std::nullopt, std::nullopt}, 6};
        bc.bc_specs = {left_lo, bottom, right, top, left_up, hole};
        bc.exact_dirichlet_edges = {2, 3, 4};
    }
    return bc;
}

BenchmarkCase make_case_by_name(const std::string& name) {
    if (name == "kirsch" || name == "cylindrical_hole") return make_case(CaseKind::CylindricalHole);
    if (name == "inglis" || name == "elliptical_hole") return make_case(CaseKind::EllipticalHole);
    throw std::invalid_argument("unknown case '" + name + "' (use kirsch or inglis)");
}

void apply_case_bcs(const BenchmarkCase& bc, cloud::SmartCloud& cloud) {
    cloud::assign_boundary_conditions(cloud, bc.bc_specs);

    for (auto& node : cloud.nodes) {
        if (!node.is_boundary()) continue;
        for (int d = 0; d < 2; ++d) {
            auto& dof = node.bc[static_cast<std::size_t>(d)];
            if (dof.kind != cloud::DofBC::Kind::Dirichlet) continue;
            const bool exact_edge =
                std::find(bc.exact_dirichlet_edges.begin(), bc.exact_dirichlet_edges.end(),
                          dof.edge_id) != bc.exact_dirichlet_edges.end();
            if (exact_edge) {
                const Vec2 ue = bc.exact.displacement(node.position);
                dof.value = d == 0 ? ue.x : ue.y;
            }
        }
        node.pde_override = false;
    }

    if (bc.tip_override) {
        // the three hole-edge nodes closest to the tip collocate the PDE instead
        const Vec2 tip{bc.a, 0.0};
        std::vector<std::pair<double, std::uint32_t>> arc_nodes;
        for (const auto& node : cloud.nodes) {
            if (!node.is_boundary()) continue;
            for (const auto& par : node.parents) {
                if (par.edge_id == bc.hole_edge) {
                    arc_nodes.emplace_back((node.position - tip).norm(), node.id);
                    break;
                }
            }
        }
        std::sort(arc_nodes.begin(), arc_nodes.end());
        for (std::size_t i = 0; i < std::min<std::size_t>(3, arc_nodes.size()); ++i)
            cloud.nodes[arc_nodes[i].second].pde_override = true;
    }
}

cloud::SmartCloud setup_cloud(const BenchmarkCase& bc, const cloud::CloudParams& params) {
    cloud::SmartCloud c = cloud::build_cloud(bc.brep, params);
    apply_case_bcs(bc, c);
    return c;
}

SolveOutcome solve_case(const BenchmarkCase& bc, const cloud::SmartCloud& cloud,
                        const gfd::StencilConfig& scfg) {
    SolveOutcome out;
    auto t0 = std::chrono::steady_clock::now();
    out.stencils = gfd::build_stencils(cloud, scfg);
    out.t_stencil_s = seconds_since(t0);
    out.kappa_max = gfd::max_kappa(out.stencils);

    t0 = std::chrono::steady_clock::now();
    const gfd::CollocationSystem sys = gfd::assemble(cloud, out.stencils, bc.material);
    out.t_assemble_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    const gfd::SolveResult res = gfd::solve(sys);
    out.t_solve_s = seconds_since(t0);

    out.sol = gfd::compute_stress(cloud, out.stencils, res.u, bc.material, scfg.threads);
    out.sol.residual = res.residual;
    return out;
}

namespace {

IterationRecord record_state(const BenchmarkCase& bc, const cloud::SmartCloud& cloud,
                             const SolveOutcome& outcome, const ind::ErrorField& err, int it,
                             double t_indicator) {
    IterationRecord rec;
    rec.iteration = it;
    rec.n_nodes = cloud.nodes.size();
    rec.n_boundary = cloud.boundary_count();
    rec.kappa_max = outcome.kappa_max;
    rec.residual = outcome.sol.residual;
    rec.t_solve_s = outcome.t_solve_s;
    rec.t_indicator_s = t_indicator;
    rec.l2w_indicator = ind::l2w_indicator(err.e);

    if (bc.exact.stress) {
        std::vector<double> vm_exact(cloud.nodes.size());
        for (std::size_t i = 0; i < cloud.nodes.size(); ++i)
            vm_exact[i] = bc.exact.von_mises_at(cloud.nodes[i].position, bc.material);
        rec.l2r_vm_exact = ind::error_norms(vm_exact, outcome.sol.von_mises).l2r;
    }

    // indicative relative norm: indicator magnitude against the computed field
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < err.e.size(); ++i) {
        num += err.e[i] * err.e[i];
        den += outcome.sol.von_mises[i] * outcome.sol.von_mises[i];
    }
    rec.l2r_vm_zz = den > 0.0 ? std::sqrt(num / den) : 0.0;
    return rec;
}

}  // namespace

AdaptiveRun run_adaptive(
    const BenchmarkCase& bc, cloud::SmartCloud cloud, const gfd::StencilConfig& scfg,
    const adapt::AdaptConfig& acfg, const ind::ZZConfig& zcfg,
    const std::function<void(const IterationRecord&, const cloud::SmartCloud&,
                             const gfd::SolutionField&, const ind::ErrorField&)>& on_iteration) {
    AdaptiveRun run;

    SolveOutcome outcome = solve_case(bc, cloud, scfg);
    auto t0 = std::chrono::steady_clock::now();
    ind::ErrorField err =
        ind::zz_indicator(cloud, outcome.stencils, outcome.sol, bc.material, zcfg, scfg.threads);
    IterationRecord rec = record_state(bc, cloud, outcome, err, 0, seconds_since(t0));
    if (on_iteration) on_iteration(rec, cloud, outcome.sol, err);
    run.history.push_back(rec);

    for (int it = 1; it <= acfg.max_iterations; ++it) {
        const adapt::StepReport step =
            adapt::adapt_step(cloud, outcome.stencils, err, acfg, bc.bc_specs);
        apply_case_bcs(bc, cloud);

        outcome = solve_case(bc, cloud, scfg);
        t0 = std::chrono::steady_clock::now();
        err = ind::zz_indicator(cloud, outcome.stencils, outcome.sol, bc.material, zcfg,
                                scfg.threads);
        const double prev_l2w = rec.l2w_indicator;
        rec = record_state(bc, cloud, outcome, err, it, seconds_since(t0));
        rec.t_refine_s = step.t_refine_s;
        if (on_iteration) on_iteration(rec, cloud, outcome.sol, err);
        run.history.push_back(rec);

        if (acfg.early_stop && rec.l2w_indicator > prev_l2w * (1.0 - acfg.l2w_drop_tol)) break;
    }
    run.last = std::move(outcome);
    run.cloud = std::move(cloud);
    return run;
}

}  // namespace sc::bench

#pragma once

#include "sc/adapt/adapt.hpp"
#include "sc/bench/exact.hpp"

namespace sc::bench {

enum class CaseKind { CylindricalHole, EllipticalHole };

/// A benchmark problem: geometry, loading, material, exact solution and the
/// boundary-condition layout of its quarter/half model.
struct BenchmarkCase {
    CaseKind kind = CaseKind::CylindricalHole;
    double a = 1.0;             // hole radius / major semi-axis
    double b = 0.2;             // ellipse minor semi-axis
    double L = 5.0;             // outer square half-width
    double S = 1.0;             // remote load
    double biaxial_ratio = 0.5; // ellipse: Nx = ratio * S, Ny = S
    gfd::MaterialModel material;
    // Collocate the PDE at the three tip boundary nodes instead of traction
    // rows. Off by default: with a sub-grid tip radius those rows destabilize
    // coarse solves.
    bool tip_override = false;

    std::shared_ptr<const geom::BRepModel2D> brep;
    ExactSolution exact;
    std::vector<cloud::BCSpec> bc_specs;
    std::vector<int> exact_dirichlet_edges;
    int hole_edge = -1;
};

/// Quarter model of the cylindrical-hole problem: [0,L]^2 minus the quarter
/// disc of radius a at the origin. Edge ids 1..5 (bottom, right, top, left, arc).
geom::BRepModel2D kirsch_quarter_brep(double a, double L);

/// Half model of the elliptical-hole problem: [0,L]x[-L,L] minus the right
/// half-ellipse. Edge ids 1..6 (left-lower, bottom, right, top, left-upper, arc).
geom::BRepModel2D inglis_half_brep(double a, double b, double L);

BenchmarkCase make_case(CaseKind kind);
BenchmarkCase make_case_by_name(const std::string& name);  // "kirsch" | "inglis"

/// Resolve boundary conditions, fill exact Dirichlet values, apply the tip
/// override. Called after construction and again after every refinement.
void apply_case_bcs(const BenchmarkCase& bc, cloud::SmartCloud& cloud);

cloud::SmartCloud setup_cloud(const BenchmarkCase& bc, const cloud::CloudParams& params);

struct SolveOutcome {
    std::vector<gfd::Stencil> stencils;
    gfd::SolutionField sol;
    double kappa_max = 0.0;
    double t_stencil_s = 0.0;
    double t_assemble_s = 0.0;
    double t_solve_s = 0.0;
};

SolveOutcome solve_case(const BenchmarkCase& bc, const cloud::SmartCloud& cloud,
                        const gfd::StencilConfig& scfg);

struct IterationRecord {
    int iteration = 0;
    std::size_t n_nodes = 0;
    std::size_t n_boundary = 0;
    double l2r_vm_exact = 0.0;
    double l2r_vm_zz = 0.0;
    double l2w_indicator = 0.0;
    double kappa_max = 0.0;
    double residual = 0.0;
    double t_solve_s = 0.0;
    double t_indicator_s = 0.0;
    double t_refine_s = 0.0;
};

struct AdaptiveRun {
    cloud::SmartCloud cloud;      // final refined cloud
    SolveOutcome last;            // outcome on the final cloud
    std::vector<IterationRecord> history;
};

/// Full h-adaptive loop: solve, indicate, record, refine; stops at the
/// iteration cap or when the indicator L2W improves by less than the
/// configured fraction. `on_iteration` (optional) receives each record plus
/// the state for artifact dumps.
AdaptiveRun run_adaptive(
    const BenchmarkCase& bc, cloud::SmartCloud cloud, const gfd::StencilConfig& scfg,
    const adapt::AdaptConfig& acfg, const ind::ZZConfig& zcfg,
    const std::function<void(const IterationRecord&, const cloud::SmartCloud&,
                             const gfd::SolutionField&, const ind::ErrorField&)>& on_iteration =
        nullptr);

}  // namespace sc::bench

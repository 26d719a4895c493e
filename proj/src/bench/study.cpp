#include "sc/bench/study.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace sc::bench {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string case_tag(CaseKind k) {
    return k == CaseKind::CylindricalHole ? "kirsch" : "inglis";
}

/// Solve one configuration and fill a study row.
StudyRow evaluate(const BenchmarkCase& bc, const cloud::SmartCloud& cloud,
                  const gfd::StencilConfig& scfg, const ind::ZZConfig& zcfg, bool with_residual,
                  const std::string& config) {
    StudyRow row;
    row.config = config;
    row.n_nodes = cloud.nodes.size();

    const SolveOutcome outcome = solve_case(bc, cloud, scfg);
    row.kappa_max = outcome.kappa_max;
    row.t_assemble_s = outcome.t_assemble_s;
    row.t_solve_s = outcome.t_solve_s;

    std::vector<double> vm_exact(cloud.nodes.size());
    for (std::size_t i = 0; i < cloud.nodes.size(); ++i)
        vm_exact[i] = bc.exact.von_mises_at(cloud.nodes[i].position, bc.material);
    row.l2r_vm_exact = ind::error_norms(vm_exact, outcome.sol.von_mises).l2r;

    auto t0 = std::chrono::steady_clock::now();
    const ind::ErrorField zz =
        ind::zz_indicator(cloud, outcome.stencils, outcome.sol, bc.material, zcfg, scfg.threads);
    row.t_indicator_s = seconds_since(t0);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < zz.e.size(); ++i) {
        num += zz.e[i] * zz.e[i];
        den += outcome.sol.von_mises[i] * outcome.sol.von_mises[i];
    }
    row.l2r_vm_zz = den > 0.0 ? std::sqrt(num / den) : 0.0;

    if (with_residual) {
        const ind::ErrorField res =
            ind::residual_indicator(cloud, outcome.sol, bc.material, scfg, scfg.threads);
        row.l2w_residual = ind::l2w_indicator(res.e);
    }
    return row;
}

}  // namespace

StudyKind study_kind_by_name(const std::string& name) {
    if (name == "threshold_t") return StudyKind::ThresholdT;
    if (name == "lattice_compare") return StudyKind::LatticeCompare;
    if (name == "convergence") return StudyKind::Convergence;
    if (name == "f_sweep") return StudyKind::FSweep;
    if (name == "relax_compare") return StudyKind::RelaxCompare;
    if (name == "indicator_compare") return StudyKind::IndicatorCompare;
    throw std::invalid_argument("unknown study kind '" + name + "'");
}

StudyTable run_study(StudyKind kind, const StudyParams& params) {
    StudyTable table;
    BenchmarkCase bc = make_case(params.case_kind);
    gfd::StencilConfig scfg;
    scfg.threads = params.threads;
    ind::ZZConfig zcfg;  // weighted, direct, scale 1.0

    switch (kind) {
        case StudyKind::ThresholdT: {
            for (double t : params.thresholds) {
                cloud::CloudParams cp;
                cp.target_n = params.target_n;
                cp.lattice = cloud::Lattice::Square;  // as in the threshold sensitivity runs
                cp.t = t;
                const cloud::SmartCloud c = setup_cloud(bc, cp);
                std::ostringstream cfg;
                cfg << case_tag(bc.kind) << "_t" << t;
                table.rows.push_back(
                    evaluate(bc, c, scfg, zcfg, params.with_residual, cfg.str()));
            }
            break;
        }
        case StudyKind::LatticeCompare: {
            for (cloud::Lattice lat : {cloud::Lattice::Square, cloud::Lattice::Triangular}) {
                for (std::size_t n : params.levels) {
                    cloud::CloudParams cp;
                    cp.target_n = n;
                    cp.lattice = lat;
                    cp.t = params.t;
                    const cloud::SmartCloud c = setup_cloud(bc, cp);
                    std::ostringstream cfg;
                    cfg << case_tag(bc.kind) << "_"
                        << (lat == cloud::Lattice::Square ? "square" : "triangular") << "_n" << n;
                    table.rows.push_back(
                        evaluate(bc, c, scfg, zcfg, params.with_residual, cfg.str()));
                }
            }
            break;
        }
        case StudyKind::Convergence: {
            for (std::size_t n : params.levels) {
                cloud::CloudParams cp;
                cp.target_n = n;
                cp.lattice = params.lattice;
                cp.t = params.t;
                const cloud::SmartCloud c = setup_cloud(bc, cp);
                std::ostringstream cfg;
                cfg << case_tag(bc.kind) << "_n" << n;
                table.rows.push_back(
                    evaluate(bc, c, scfg, zcfg, params.with_residual, cfg.str()));
            }
            break;
        }
        case StudyKind::FSweep: {
            for (double f : params.fractions) {
                cloud::CloudParams cp;
                cp.target_n = params.target_n;
                cp.lattice = params.lattice;
                cp.t = params.t;
                cloud::SmartCloud c = setup_cloud(bc, cp);
                adapt::AdaptConfig acfg;
                acfg.f = f;
                acfg.max_iterations = params.adapt_iterations;
                acfg.early_stop = false;
                const AdaptiveRun run = run_adaptive(bc, std::move(c), scfg, acfg, zcfg);
                for (const auto& rec : run.history) {
                    StudyRow row;
                    std::ostringstream cfg;
                    cfg << case_tag(bc.kind) << "_f" << f << "_it" << rec.iteration;
                    row.config = cfg.str();
                    row.n_nodes = rec.n_nodes;
                    row.l2r_vm_exact = rec.l2r_vm_exact;
                    row.l2r_vm_zz = rec.l2r_vm_zz;
                    row.kappa_max = rec.kappa_max;
                    row.t_solve_s = rec.t_solve_s;
                    row.t_indicator_s = rec.t_indicator_s;
                    table.rows.push_back(row);
                }
            }
            break;
        }
        case StudyKind::RelaxCompare: {
            for (bool relax : {false, true}) {
                cloud::CloudParams cp;
                cp.target_n = params.target_n;
                cp.lattice = params.lattice;
                cp.t = params.t;
                cloud::SmartCloud c = setup_cloud(bc, cp);
                adapt::AdaptConfig acfg;
                acfg.relax = relax;
                acfg.max_iterations = params.adapt_iterations;
                acfg.early_stop = false;
                const AdaptiveRun run = run_adaptive(bc, std::move(c), scfg, acfg, zcfg);
                for (const auto& rec : run.history) {
                    StudyRow row;
                    std::ostringstream cfg;
                    cfg << case_tag(bc.kind) << (relax ? "_relax" : "_norelax") << "_it"
                        << rec.iteration;
                    row.config = cfg.str();
                    row.n_nodes = rec.n_nodes;
                    row.l2r_vm_exact = rec.l2r_vm_exact;
                    row.l2r_vm_zz = rec.l2r_vm_zz;
                    row.kappa_max = rec.kappa_max;
                    row.t_solve_s = rec.t_solve_s;
                    row.t_indicator_s = rec.t_indicator_s;
                    table.rows.push_back(row);
                }
            }
            break;
        }
        case StudyKind::IndicatorCompare: {
            cloud::CloudParams cp;
            cp.target_n = params.target_n;
            cp.lattice = params.lattice;
            cp.t = params.t;
            const cloud::SmartCloud c = setup_cloud(bc, cp);
            for (bool weighted : {false, true}) {
                for (ind::ZZMode mode : {ind::ZZMode::IndirectComponents, ind::ZZMode::DirectVM}) {
                    ind::ZZConfig z;
                    z.weighted = weighted;
                    z.mode = mode;
                    std::ostringstream cfg;
                    cfg << case_tag(bc.kind) << "_zz_" << (weighted ? "weighted" : "unweighted")
                        << "_" << (mode == ind::ZZMode::DirectVM ? "direct" : "indirect");
                    table.rows.push_back(evaluate(bc, c, scfg, z, false, cfg.str()));
                }
            }
            // residual indicator as its own row
            table.rows.push_back(
                evaluate(bc, c, scfg, zcfg, true, case_tag(bc.kind) + "_residual"));
            break;
        }
    }
    return table;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("slope fit needs at least two samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace sc::bench

#pragma once

#include "sc/bench/pipeline.hpp"

namespace sc::bench {

enum class StudyKind {
    ThresholdT,
    LatticeCompare,
    Convergence,
    FSweep,
    RelaxCompare,
    IndicatorCompare,
};

StudyKind study_kind_by_name(const std::string& name);

struct StudyRow {
    std::string config;
    std::size_t n_nodes = 0;
    double l2r_vm_exact = 0.0;
    double l2r_vm_zz = 0.0;
    double l2w_residual = 0.0;
    double kappa_max = 0.0;
    double t_assemble_s = 0.0;
    double t_solve_s = 0.0;
    double t_indicator_s = 0.0;
};

struct StudyTable {
    static constexpr const char* header =
        "config,n_nodes,l2r_vm_exact,l2r_vm_zz,l2w_residual,kappa_max,t_assemble_s,t_solve_s,"
        "t_indicator_s";
    std::vector<StudyRow> rows;
};

struct StudyParams {
    CaseKind case_kind = CaseKind::CylindricalHole;
    std::size_t target_n = 4500;
    std::vector<std::size_t> levels = {2000, 6000, 18000, 54000};
    std::vector<double> thresholds = {0.02, 0.1, 0.3, 0.5, 0.7};
    std::vector<double> fractions = {0.02, 0.05, 0.10, 0.20};
    int adapt_iterations = 4;
    cloud::Lattice lattice = cloud::Lattice::Triangular;
    double t = 0.3;
    int threads = 1;
    bool with_residual = true;  // residual indicator column is expensive
};

StudyTable run_study(StudyKind kind, const StudyParams& params);

/// Least-squares slope of log(y) against log(x); used for convergence rates.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sc::bench

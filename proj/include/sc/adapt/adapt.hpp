#pragma once

#include <set>

#include "sc/ind/indicators.hpp"

namespace sc::adapt {

struct ProjectionFailed : std::runtime_error {
    explicit ProjectionFailed(const std::string& what) : std::runtime_error(what) {}
};

struct MarkSet {
    std::vector<std::uint32_t> seeds;    // the ceil(f*n) highest-error nodes
    std::vector<std::uint32_t> closure;  // seeds plus their stencil supports
};

struct AdaptConfig {
    double f = 0.05;          // marking fraction
    double alpha = 3.0;       // pruning divisor, h_min = h_loc / alpha
    bool relax = false;
    int max_iterations = 4;
    bool early_stop = true;      // stop when the indicator stalls
    double l2w_drop_tol = 0.02;  // required relative L2W improvement per iteration
    int relax_passes = 5;
    std::size_t voronoi_k = 24;
};

/// Highest-error marking: seeds are the top ceil(f*n) nodes (ties to the lower
/// id), the closure adds every stencil support node of a seed.
MarkSet mark_nodes(const ind::ErrorField& error, const std::vector<gfd::Stencil>& stencils,
                   double f);

/// Midpoints of unrefined boundary elements touching marked boundary nodes,
/// projected onto the exact parent edge. Gated by the same h_min rule as
/// interior candidates; accepted nodes split their element in two.
/// Returns the ids of the new boundary nodes.
std::vector<std::uint32_t> refine_boundary(cloud::SmartCloud& cloud, const MarkSet& marks,
                                           const geom::PointGrid& initial_grid,
                                           const std::vector<double>& initial_h_loc,
                                           double alpha);

/// Voronoi-corner candidates around all marked nodes (over existing plus new
/// boundary nodes), deduplicated and classified Inside.
std::vector<geom::Vec2> refine_interior(const cloud::SmartCloud& cloud, const MarkSet& marks,
                                        const geom::PointGrid& initial_grid,
                                        const std::vector<double>& initial_h_loc, double alpha,
                                        std::size_t voronoi_k);

/// Deterministic proximity pruning: a candidate is accepted iff it keeps at
/// least h_min = h_loc(nearest initial node)/alpha from every existing node
/// and every previously accepted candidate.
std::vector<geom::Vec2> prune_close(const cloud::SmartCloud& cloud,
                                    const std::vector<geom::Vec2>& candidates,
                                    const geom::PointGrid& initial_grid,
                                    const std::vector<double>& initial_h_loc, double alpha);

/// Local Laplace smoothing at fine/coarse interfaces (30-NN patches whose fine
/// fraction lies within [0.2, 0.8]); boundary nodes and the outer third of the
/// patch stay fixed. Returns the ids of moved nodes.
std::vector<std::uint32_t> relax_local(cloud::SmartCloud& cloud,
                                       std::set<std::uint32_t>& fine_region, int passes);

struct StepReport {
    std::size_t nodes_before = 0;
    std::size_t nodes_after = 0;
    std::size_t new_boundary = 0;
    std::size_t new_interior = 0;
    std::size_t relaxed = 0;
    double l2w_indicator = 0.0;
    double t_refine_s = 0.0;
};

/// One h-adaptivity step: mark, refine boundary and interior, prune, optional
/// relaxation, then re-assign boundary conditions from the CAD entities.
StepReport adapt_step(cloud::SmartCloud& cloud, const std::vector<gfd::Stencil>& stencils,
                      const ind::ErrorField& error, const AdaptConfig& cfg,
                      const std::vector<cloud::BCSpec>& specs);

}  // namespace sc::adapt

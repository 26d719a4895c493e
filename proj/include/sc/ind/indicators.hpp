#pragma once

#include <vector>

#include "sc/gfd/gfd.hpp"
#include "sc/ind/vonmises.hpp"

namespace sc::ind {

struct SingularMoment : std::runtime_error {
    explicit SingularMoment(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateNeighborhood : std::runtime_error {
    explicit DegenerateNeighborhood(const std::string& what) : std::runtime_error(what) {}
};
struct ZeroReference : std::runtime_error {
    explicit ZeroReference(const std::string& what) : std::runtime_error(what) {}
};

enum class ZZMode { DirectVM, IndirectComponents };

struct ZZConfig {
    bool weighted = true;
    ZZMode mode = ZZMode::DirectVM;
    double scale = 1.0;  // factor applied to the solver stencil radius
};

enum class ErrorKind { ZZ, Residual, Exact };

struct ErrorField {
    std::vector<double> e;
    ErrorKind kind = ErrorKind::ZZ;
    std::size_t warnings = 0;  // nodes/corners skipped for singular fits
};

struct VoronoiCell {
    std::uint32_t owner = 0;
    std::vector<geom::Vec2> corners;
    bool clipped = false;  // some corners were discarded (outside or unbounded)
};

/// Moving-least-squares recovery of a nodal scalar field at one node, using a
/// quadratic basis over the (scaled) solver stencil support. Returns the
/// recovered value at the node itself.
double mls_recover(const cloud::SmartCloud& cloud, const std::vector<double>& values,
                   std::uint32_t center, const gfd::Stencil& stencil,
                   const geom::PointGrid& grid, const ZZConfig& cfg);

ErrorField zz_indicator(const cloud::SmartCloud& cloud, const std::vector<gfd::Stencil>& stencils,
                        const gfd::SolutionField& sol, const gfd::MaterialModel& mat,
                        const ZZConfig& cfg, int threads = 1);

/// Voronoi cells of the owner nodes, computed as half-plane intersections over
/// the k nearest nodes (the Delaunay dual of the local neighborhood). Corners
/// outside the domain are discarded.
std::vector<VoronoiCell> voronoi_cells(const cloud::SmartCloud& cloud,
                                       const std::vector<std::uint32_t>& owners,
                                       const geom::PointGrid& grid, std::size_t k = 24,
                                       bool classify_corners = true);

/// PDE residual averaged over the Voronoi-cell corners of each node; the
/// divergence of stress at a corner is evaluated from a fresh point fit over
/// the neighboring collocation nodes.
ErrorField residual_indicator(const cloud::SmartCloud& cloud, const gfd::SolutionField& sol,
                              const gfd::MaterialModel& mat, const gfd::StencilConfig& scfg,
                              int threads = 1);

struct Norms {
    double l2r = 0.0;
    double l2w = 0.0;
};

/// L2 relative and L2 weighted error norms of approx against exact.
Norms error_norms(const std::vector<double>& exact, const std::vector<double>& approx);

/// Indicator-only weighted norm: sqrt(sum e^2) / n.
double l2w_indicator(const std::vector<double>& e);

}  // namespace sc::ind

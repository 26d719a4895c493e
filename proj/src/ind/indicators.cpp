#include "sc/ind/indicators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "sc/core/parallel.hpp"

namespace sc::ind {

using geom::Vec2;

namespace {

/// Visible nodes within a radius of the center, sorted by (distance, id).
std::vector<std::uint32_t> support_within(const cloud::SmartCloud& cloud,
                                          const geom::PointGrid& grid,
                                          const cloud::ElementChords& chords,
                                          std::uint32_t center, const Vec2& xc, double r) {
    std::vector<std::pair<double, std::uint32_t>> cands;
    const double wall = chords.distance(xc);
    for (std::size_t j : grid.query_radius(xc, r * (1.0 + 1e-12))) {
        if (j == center) continue;
        const double d = (grid.point(j) - xc).norm();
        if (d >= wall && chords.blocks(xc, grid.point(j))) continue;
        cands.emplace_back(d, static_cast<std::uint32_t>(j));
    }
    std::sort(cands.begin(), cands.end());
    std::vector<std::uint32_t> out;
    out.reserve(cands.size());
    for (const auto& [d, j] : cands) out.push_back(j);
    return out;
}

/// Support node set for recovery: the solver stencil support, rescaled by
/// cfg.scale (visible nodes within scale * stencil radius).
std::vector<std::uint32_t> recovery_support(const cloud::SmartCloud& cloud,
                                            const geom::PointGrid& grid,
                                            const cloud::ElementChords& chords,
                                            std::uint32_t center, const gfd::Stencil& stencil,
                                            double scale) {
    if (scale == 1.0) return stencil.support;
    const auto out = support_within(cloud, grid, chords, center,
                                    cloud.nodes[center].position, scale * stencil.radius);
    if (out.size() < 6) return stencil.support;  // too small after shrink: fall back
    return out;
}

/// The moment system A a = E f of the weighted fit, solved as the equivalent
/// least-squares problem sqrt(W) P a = sqrt(W) f through a rank-revealing QR
/// (identical minimizer, far better conditioned than the squared system).
struct MomentSolve {
    std::vector<double> sqw;  // per support node
    Eigen::MatrixXd P;        // m x 6, sqrt(w)-scaled basis rows
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
};

MomentSolve build_moments(const cloud::SmartCloud& cloud,
                          const std::vector<std::uint32_t>& support, const Vec2& xc,
                          bool weighted) {
    MomentSolve ms;
    if (support.size() < 6) throw SingularMoment("fewer than 6 support nodes");
    double radius = 0.0;
    for (std::uint32_t j : support)
        radius = std::max(radius, (cloud.nodes[j].position - xc).norm());
    if (radius <= 0.0) throw SingularMoment("coincident support");

    const auto m = static_cast<Eigen::Index>(support.size());
    ms.P.resize(m, 6);
    ms.sqw.reserve(support.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        const Vec2 d = (cloud.nodes[support[static_cast<std::size_t>(j)]].position - xc) / radius;
        const double w = weighted ? gfd::spline4_weight(d.norm()) : 1.0;
        const double sw = std::sqrt(std::max(w, 0.0));
        ms.sqw.push_back(sw);
        ms.P(j, 0) = sw;
        ms.P(j, 1) = sw * d.x;
        ms.P(j, 2) = sw * d.y;
        ms.P(j, 3) = sw * d.x * d.x;
        ms.P(j, 4) = sw * d.x * d.y;
        ms.P(j, 5) = sw * d.y * d.y;
    }
    ms.qr.compute(ms.P);
    if (ms.qr.rank() < 6) throw SingularMoment("rank-deficient moment matrix");
    return ms;
}

double recover_with(const MomentSolve& ms, const std::vector<std::uint32_t>& support,
                    const std::vector<double>& values) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(support.size()));
    for (std::size_t j = 0; j < support.size(); ++j)
        rhs(static_cast<Eigen::Index>(j)) = ms.sqw[j] * values[support[j]];
    const Eigen::VectorXd a = ms.qr.solve(rhs);
    return a(0);
}

}  // namespace

/// Build moments, growing the support when the weighted fit is rank deficient
/// (zero-weight outermost shells can leave too few effective nodes, e.g. the
/// cocircular hexagon of a perfect triangular lattice).
struct RecoveryFit {
    std::vector<std::uint32_t> support;
    MomentSolve ms;
};

RecoveryFit build_recovery_fit(const cloud::SmartCloud& cloud, const geom::PointGrid& grid,
                               const cloud::ElementChords& chords, std::uint32_t center,
                               const gfd::Stencil& stencil, const ZZConfig& cfg) {
    RecoveryFit fit;
    fit.support = recovery_support(cloud, grid, chords, center, stencil, cfg.scale);
    const Vec2 xc = cloud.nodes[center].position;
    double grow = cfg.scale;
    for (int attempt = 0;; ++attempt) {
        try {
            fit.ms = build_moments(cloud, fit.support, xc, cfg.weighted);
            return fit;
        } catch (const SingularMoment&) {
            if (attempt >= 4) throw;
            grow *= 1.3;
            auto larger = support_within(cloud, grid, chords, center, xc, grow * stencil.radius);
            if (larger.size() <= fit.support.size() && attempt > 0) throw;
            fit.support = std::move(larger);
        }
    }
}

double mls_recover(const cloud::SmartCloud& cloud, const std::vector<double>& values,
                   std::uint32_t center, const gfd::Stencil& stencil,
                   const geom::PointGrid& grid, const ZZConfig& cfg) {
    const cloud::ElementChords chords(cloud);
    const RecoveryFit fit = build_recovery_fit(cloud, grid, chords, center, stencil, cfg);
    return recover_with(fit.ms, fit.support, values);
}

ErrorField zz_indicator(const cloud::SmartCloud& cloud, const std::vector<gfd::Stencil>& stencils,
                        const gfd::SolutionField& sol, const gfd::MaterialModel& mat,
                        const ZZConfig& cfg, int threads) {
    const std::size_t n = cloud.nodes.size();
    ErrorField out;
    out.kind = ErrorKind::ZZ;
    out.e.assign(n, 0.0);
    std::atomic<std::size_t> warnings{0};

    std::vector<double> s11(n), s22(n), s12(n);
    for (std::size_t i = 0; i < n; ++i) {
        s11[i] = sol.stress[i][0];
        s22[i] = sol.stress[i][1];
        s12[i] = sol.stress[i][2];
    }
    const geom::PointGrid grid = cloud.make_grid();
    const cloud::ElementChords chords(cloud);
    const bool strain = mat.plane == gfd::Plane::Strain;

    core::parallel_for(n, threads, [&](std::size_t i) {
        try {
            const RecoveryFit fit = build_recovery_fit(cloud, grid, chords,
                                                       static_cast<std::uint32_t>(i),
                                                       stencils[i], cfg);
            double smooth_vm;
            if (cfg.mode == ZZMode::DirectVM) {
                smooth_vm = recover_with(fit.ms, fit.support, sol.von_mises);
            } else {
                const double r11 = recover_with(fit.ms, fit.support, s11);
                const double r22 = recover_with(fit.ms, fit.support, s22);
                const double r12 = recover_with(fit.ms, fit.support, s12);
                smooth_vm = von_mises({r11, r22, r12}, strain, mat.nu);
            }
            out.e[i] = std::abs(sol.von_mises[i] - smooth_vm);
        } catch (const SingularMoment&) {
            out.e[i] = 0.0;
            warnings.fetch_add(1);
        }
    });
    out.warnings = warnings.load();
    return out;
}

std::vector<VoronoiCell> voronoi_cells(const cloud::SmartCloud& cloud,
                                       const std::vector<std::uint32_t>& owners,
                                       const geom::PointGrid& grid, std::size_t k,
                                       bool classify_corners) {
    struct LabeledVertex {
        Vec2 p;
        int label;  // label of the edge starting at this vertex; < 0 for box edges
    };

    std::vector<VoronoiCell> cells;
    cells.reserve(owners.size());

    for (std::uint32_t owner : owners) {
        const Vec2 xc = cloud.nodes[owner].position;
        const auto neighbors = grid.nearest_k(xc, k, owner);
        if (neighbors.size() < 3)
            throw DegenerateNeighborhood("node " + std::to_string(owner) +
                                         " has fewer than 3 neighbors");
        double far = 0.0;
        for (std::size_t j : neighbors) far = std::max(far, (grid.point(j) - xc).norm());
        const double half = 3.0 * far;

        // Start from a large box; clip with each neighbor's bisector half-plane.
        std::vector<LabeledVertex> poly = {
            {{xc.x - half, xc.y - half}, -1},
            {{xc.x + half, xc.y - half}, -2},
            {{xc.x + half, xc.y + half}, -3},
            {{xc.x - half, xc.y + half}, -4},
        };

        for (std::size_t j : neighbors) {
            const Vec2 xj = grid.point(j);
            const Vec2 mid = (xc + xj) * 0.5;
            const Vec2 dir = xj - xc;  // inside: (p - mid) . dir <= 0
            std::vector<LabeledVertex> next;
            next.reserve(poly.size() + 2);
            const std::size_t nv = poly.size();
            for (std::size_t i = 0; i < nv; ++i) {
                const LabeledVertex& cur = poly[i];
                const LabeledVertex& nxt = poly[(i + 1) % nv];
                const double fc = dot(cur.p - mid, dir);
                const double fn = dot(nxt.p - mid, dir);
                const bool cin = fc <= 0.0;
                const bool nin = fn <= 0.0;
                if (cin) next.push_back(cur);
                if (cin != nin) {
                    const double t = fc / (fc - fn);
                    const Vec2 ip = cur.p + (nxt.p - cur.p) * t;
                    // entering the clipped side starts the bisector edge;
                    // leaving it resumes the original edge
                    next.push_back({ip, cin ? static_cast<int>(j) : cur.label});
                }
            }
            poly = std::move(next);
            if (poly.empty()) break;
        }
        if (poly.size() < 3)
            throw DegenerateNeighborhood("empty voronoi cell for node " + std::to_string(owner));

        // Cocircular neighbor sets (e.g. square lattices) produce coincident
        // vertex pairs; merge runs of numerically identical vertices. A merged
        // vertex is a true corner if any member is bisector-bisector defined.
        const double merge_tol = 1e-7 * far;
        struct Corner {
            Vec2 p;
            bool true_corner;
        };
        std::vector<Corner> merged;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const int incoming = poly[(i + poly.size() - 1) % poly.size()].label;
            const int outgoing = poly[i].label;
            const bool is_true = incoming >= 0 && outgoing >= 0;
            if (!merged.empty() && geom::distance(merged.back().p, poly[i].p) < merge_tol) {
                merged.back().true_corner = merged.back().true_corner || is_true;
                continue;
            }
            merged.push_back({poly[i].p, is_true});
        }
        if (merged.size() > 1 &&
            geom::distance(merged.front().p, merged.back().p) < merge_tol) {
            merged.front().true_corner = merged.front().true_corner || merged.back().true_corner;
            merged.pop_back();
        }

        VoronoiCell cell;
        cell.owner = owner;
        for (const auto& corner : merged) {
            if (!corner.true_corner) {
                cell.clipped = true;  // synthetic box vertex: cell locally unbounded
                continue;
            }
            if (classify_corners &&
                cloud.brep->classify_point(corner.p) == geom::PointClass::Outside) {
                cell.clipped = true;
                continue;
            }
            cell.corners.push_back(corner.p);
        }
        cells.push_back(std::move(cell));
    }
    return cells;
}

ErrorField residual_indicator(const cloud::SmartCloud& cloud, const gfd::SolutionField& sol,
                              const gfd::MaterialModel& mat, const gfd::StencilConfig& scfg,
                              int threads) {
    const std::size_t n = cloud.nodes.size();
    ErrorField out;
    out.kind = ErrorKind::Residual;
    out.e.assign(n, 0.0);
    std::atomic<std::size_t> warnings{0};
    const geom::PointGrid grid = cloud.make_grid();
    const cloud::ElementChords chords(cloud);
    const Vec2 b = mat.body_force;

    core::parallel_for(n, threads, [&](std::size_t i) {
        std::vector<std::uint32_t> one{static_cast<std::uint32_t>(i)};
        std::vector<VoronoiCell> cells;
        try {
            cells = voronoi_cells(cloud, one, grid);
        } catch (const DegenerateNeighborhood&) {
            warnings.fetch_add(1);
            return;
        }
        double acc = 0.0;
        std::size_t q = 0;
        for (const Vec2& corner : cells[0].corners) {
            try {
                const auto fit = gfd::fit_point_derivatives(cloud, grid, chords, corner, scfg);
                double rx = b.x, ry = b.y;
                for (std::size_t j = 0; j < fit.support.size(); ++j) {
                    const auto& s = sol.stress[fit.support[j]];
                    rx += fit.wx[j] * s[0] + fit.wy[j] * s[2];
                    ry += fit.wx[j] * s[2] + fit.wy[j] * s[1];
                }
                acc += std::hypot(rx, ry);
                ++q;
            } catch (const std::runtime_error&) {
                warnings.fetch_add(1);
            }
        }
        out.e[i] = q > 0 ? acc / static_cast<double>(q) : 0.0;
    });
    out.warnings = warnings.load();
    return out;
}

Norms error_norms(const std::vector<double>& exact, const std::vector<double>& approx) {
    if (exact.size() != approx.size() || exact.empty())
        throw std::invalid_argument("error_norms: size mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = exact[i] - approx[i];
        num += d * d;
        den += exact[i] * exact[i];
    }
    if (den == 0.0) throw ZeroReference("L2 relative norm undefined for zero reference");
    Norms out;
    out.l2r = std::sqrt(num) / std::sqrt(den);
    out.l2w = std::sqrt(num) / static_cast<double>(exact.size());
    return out;
}

double l2w_indicator(const std::vector<double>& e) {
    double acc = 0.0;
    for (double v : e) acc += v * v;
    return e.empty() ? 0.0 : std::sqrt(acc) / static_cast<double>(e.size());
}

}  // namespace sc::ind

#include "sc/adapt/adapt.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace sc::adapt {

using geom::Vec2;

MarkSet mark_nodes(const ind::ErrorField& error, const std::vector<gfd::Stencil>& stencils,
                   double f) {
    if (f <= 0.0 || f > 1.0) throw std::invalid_argument("marking fraction must be in (0, 1]");
    const std::size_t n = error.e.size();
    const std::size_t n_seeds =
        std::min(n, static_cast<std::size_t>(std::ceil(f * static_cast<double>(n))));

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (error.e[a] != error.e[b]) return error.e[a] > error.e[b];
        return a < b;
    });

    MarkSet out;
    out.seeds.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_seeds));
    std::sort(out.seeds.begin(), out.seeds.end());

    std::set<std::uint32_t> closure(out.seeds.begin(), out.seeds.end());
    for (std::uint32_t s : out.seeds)
        for (std::uint32_t j : stencils[s].support) closure.insert(j);
    out.closure.assign(closure.begin(), closure.end());
    return out;
}

namespace {

double h_min_at(const Vec2& p, const geom::PointGrid& initial_grid,
                const std::vector<double>& initial_h_loc, double alpha) {
    const std::size_t nearest = initial_grid.nearest(p);
    return initial_h_loc[nearest] / alpha;
}

bool clear_of(const geom::PointGrid& grid, const Vec2& p, double h_min) {
    return grid.query_radius(p, h_min * (1.0 - 1e-12)).empty();
}

}  // namespace

std::vector<std::uint32_t> refine_boundary(cloud::SmartCloud& cloud, const MarkSet& marks,
                                           const geom::PointGrid& initial_grid,
                                           const std::vector<double>& initial_h_loc,
                                           double alpha) {
    std::vector<bool> marked(cloud.nodes.size(), false);
    for (std::uint32_t i : marks.closure) marked[i] = true;

    // Gate new nodes against the full current cloud (and each other).
    geom::PointGrid live = cloud.make_grid();

    std::vector<std::uint32_t> new_ids;
    const std::size_t n_elements = cloud.elements.size();  // split halves are appended
    for (std::size_t ei = 0; ei < n_elements; ++ei) {
        auto& el = cloud.elements[ei];
        const std::uint32_t na = el.nodes[0], nb = el.nodes[1];
        if (!marked[na] && !marked[nb]) continue;

        const Vec2 mid = (cloud.nodes[na].position + cloud.nodes[nb].position) * 0.5;
        const geom::BoundaryProjection proj = cloud.brep->project_to_edge(el.parent_edge, mid);
        if (!std::isfinite(proj.param) || !std::isfinite(proj.point.x))
            throw ProjectionFailed("element " + std::to_string(el.id));

        const double h_min = h_min_at(proj.point, initial_grid, initial_h_loc, alpha);
        if (!clear_of(live, proj.point, h_min)) continue;

        cloud::SmartNode node;
        node.id = static_cast<std::uint32_t>(cloud.nodes.size());
        node.position = proj.point;
        node.kind = cloud::NodeKind::Boundary;
        node.parents.push_back({el.parent_edge, proj.param});
        node.normal = cloud.brep->normal_at(el.parent_edge, proj.param);
        node.h_loc = initial_h_loc[initial_grid.nearest(proj.point)];
        node.fine = true;

        // split the element in two, keeping traversal order
        cloud::BoundaryElement second;
        second.id = static_cast<std::uint32_t>(cloud.elements.size());
        second.nodes = {node.id, nb};
        second.parent_edge = el.parent_edge;
        const Vec2 chord2 = cloud.nodes[nb].position - node.position;
        second.normal = Vec2{chord2.y, -chord2.x}.normalized();

        el.nodes[1] = node.id;
        const Vec2 chord1 = node.position - cloud.nodes[na].position;
        el.normal = Vec2{chord1.y, -chord1.x}.normalized();

        auto& blist = cloud.nodes[nb].incident_elements;
        std::replace(blist.begin(), blist.end(), el.id, second.id);
        node.incident_elements = {el.id, second.id};

        live.insert(node.id, node.position);
        new_ids.push_back(node.id);
        cloud.nodes.push_back(std::move(node));
        cloud.elements.push_back(second);
    }
    return new_ids;
}

std::vector<Vec2> refine_interior(const cloud::SmartCloud& cloud, const MarkSet& marks,
                                  const geom::PointGrid& initial_grid,
                                  const std::vector<double>& initial_h_loc, double alpha,
                                  std::size_t voronoi_k) {
    const geom::PointGrid grid = cloud.make_grid();
    const auto cells = ind::voronoi_cells(cloud, marks.closure, grid, voronoi_k,
                                          /*classify_corners=*/false);

    std::vector<Vec2> corners;
    for (const auto& cell : cells)
        corners.insert(corners.end(), cell.corners.begin(), cell.corners.end());

    // Duplicate corners (cells share them) collapse within h_min.
    std::stable_sort(corners.begin(), corners.end(), [](const Vec2& a, const Vec2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    std::vector<Vec2> unique_pts;
    geom::PointGrid dedup(std::vector<Vec2>{}, cloud.h > 0.0 ? cloud.h : 1.0);
    for (const Vec2& p : corners) {
        const double h_min = h_min_at(p, initial_grid, initial_h_loc, alpha);
        if (!dedup.query_radius(p, h_min).empty()) continue;
        dedup.insert(unique_pts.size(), p);
        unique_pts.push_back(p);
    }

    const auto labels = cloud.brep->classify_batch(unique_pts);
    // The proximity threshold that protects the initial cloud from boundary
    // huggers applies to refinement candidates too, at the local spacing.
    const cloud::ElementChords chords(cloud);
    std::vector<Vec2> inside;
    for (std::size_t i = 0; i < unique_pts.size(); ++i) {
        if (labels[i] != geom::PointClass::Inside) continue;
        const double local_h = initial_h_loc[initial_grid.nearest(unique_pts[i])];
        if (chords.distance(unique_pts[i]) <= cloud.t * local_h) continue;
        inside.push_back(unique_pts[i]);
    }
    return inside;
}

std::vector<Vec2> prune_close(const cloud::SmartCloud& cloud, const std::vector<Vec2>& candidates,
                              const geom::PointGrid& initial_grid,
                              const std::vector<double>& initial_h_loc, double alpha) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (candidates[a].x != candidates[b].x) return candidates[a].x < candidates[b].x;
        if (candidates[a].y != candidates[b].y) return candidates[a].y < candidates[b].y;
        return a < b;
    });

    geom::PointGrid live = cloud.make_grid();
    std::size_t next_id = cloud.nodes.size();
    std::vector<Vec2> accepted;
    for (std::size_t idx : order) {
        const Vec2& p = candidates[idx];
        const double h_min = h_min_at(p, initial_grid, initial_h_loc, alpha);
        if (!clear_of(live, p, h_min)) continue;
        live.insert(next_id++, p);
        accepted.push_back(p);
    }
    return accepted;
}

namespace {

/// Voronoi adjacency of one point within a small patch (half-plane clipping).
std::vector<std::size_t> natural_neighbors(const std::vector<Vec2>& pts, std::size_t center) {
    const Vec2 xc = pts[center];
    double far = 0.0;
    for (const Vec2& p : pts) far = std::max(far, (p - xc).norm());
    if (far == 0.0) return {};
    const double half = 3.0 * far;
    struct LV {
        Vec2 p;
        long label;
    };
    std::vector<LV> poly = {{{xc.x - half, xc.y - half}, -1},
                            {{xc.x + half, xc.y - half}, -2},
                            {{xc.x + half, xc.y + half}, -3},
                            {{xc.x - half, xc.y + half}, -4}};
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (j == center) continue;
        const Vec2 mid = (xc + pts[j]) * 0.5;
        const Vec2 dir = pts[j] - xc;
        std::vector<LV> next;
        const std::size_t nv = poly.size();
        for (std::size_t i = 0; i < nv; ++i) {
            const LV& cur = poly[i];
            const LV& nxt = poly[(i + 1) % nv];
            const double fc = dot(cur.p - mid, dir);
            const double fn = dot(nxt.p - mid, dir);
            if (fc <= 0.0) next.push_back(cur);
            if ((fc <= 0.0) != (fn <= 0.0)) {
                const double t = fc / (fc - fn);
                next.push_back({cur.p + (nxt.p - cur.p) * t,
                                fc <= 0.0 ? static_cast<long>(j) : cur.label});
            }
        }
        poly = std::move(next);
        if (poly.empty()) break;
    }
    std::vector<std::size_t> out;
    for (const auto& v : poly)
        if (v.label >= 0) out.push_back(static_cast<std::size_t>(v.label));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<std::uint32_t> relax_local(cloud::SmartCloud& cloud,
                                       std::set<std::uint32_t>& fine_region, int passes) {
    constexpr std::size_t kPatch = 30;
    const geom::PointGrid grid = cloud.make_grid();
    std::vector<std::uint32_t> moved;

    for (std::size_t i = 0; i < cloud.nodes.size(); ++i) {
        const auto patch = grid.nearest_k(cloud.nodes[i].position, kPatch, i);
        if (patch.size() < kPatch / 2) continue;
        std::size_t fine = 0;
        for (std::size_t j : patch) fine += fine_region.count(static_cast<std::uint32_t>(j));
        const double frac = static_cast<double>(fine) / static_cast<double>(patch.size());
        if (frac < 0.2 || frac > 0.8) continue;

        const double r_rc = (cloud.nodes[patch.back()].position - cloud.nodes[i].position).norm();

        // local index map: 0 = center, then the patch
        std::vector<std::size_t> global{i};
        global.insert(global.end(), patch.begin(), patch.end());
        std::vector<Vec2> pts(global.size());
        for (std::size_t k = 0; k < global.size(); ++k) pts[k] = cloud.nodes[global[k]].position;

        std::vector<bool> movable(global.size(), false);
        for (std::size_t k = 0; k < global.size(); ++k) {
            const auto& nd = cloud.nodes[global[k]];
            const double d = (nd.position - cloud.nodes[i].position).norm();
            // outer third of the patch is frozen; boundary nodes never move
            movable[k] = !nd.is_boundary() && d <= (2.0 / 3.0) * r_rc;
        }

        std::vector<std::vector<std::size_t>> nn(global.size());
        for (std::size_t k = 0; k < global.size(); ++k)
            if (movable[k]) nn[k] = natural_neighbors(pts, k);

        for (int pass = 0; pass < passes; ++pass) {
            for (std::size_t k = 0; k < global.size(); ++k) {
                if (!movable[k] || nn[k].empty()) continue;
                Vec2 avg{0.0, 0.0};
                for (std::size_t q : nn[k]) avg += pts[q];
                avg = avg / static_cast<double>(nn[k].size());
                if (cloud.brep->classify_point(avg) == geom::PointClass::Inside) pts[k] = avg;
            }
        }
        for (std::size_t k = 0; k < global.size(); ++k) {
            if (!movable[k]) continue;
            if ((pts[k] - cloud.nodes[global[k]].position).norm() > 0.0) {
                cloud.nodes[global[k]].position = pts[k];
                moved.push_back(static_cast<std::uint32_t>(global[k]));
            }
        }
    }
    std::sort(moved.begin(), moved.end());
    moved.erase(std::unique(moved.begin(), moved.end()), moved.end());
    for (std::uint32_t id : moved) {
        fine_region.erase(id);
        cloud.nodes[id].fine = false;
    }
    return moved;
}

StepReport adapt_step(cloud::SmartCloud& cloud, const std::vector<gfd::Stencil>& stencils,
                      const ind::ErrorField& error, const AdaptConfig& cfg,
                      const std::vector<cloud::BCSpec>& specs) {
    const auto t0 = std::chrono::steady_clock::now();
    StepReport rep;
    rep.nodes_before = cloud.nodes.size();
    rep.l2w_indicator = ind::l2w_indicator(error.e);

    // The incoming cloud is this iteration's reference discretization: h_loc
    // is evaluated on it and inherited by all nodes added below.
    cloud::compute_h_loc(cloud);
    const geom::PointGrid initial_grid = cloud.make_grid();
    std::vector<double> initial_h_loc(cloud.nodes.size());
    for (std::size_t i = 0; i < cloud.nodes.size(); ++i) initial_h_loc[i] = cloud.nodes[i].h_loc;

    const MarkSet marks = mark_nodes(error, stencils, cfg.f);
    std::set<std::uint32_t> fine_region(marks.closure.begin(), marks.closure.end());
    for (std::uint32_t id : marks.closure) cloud.nodes[id].fine = true;

    const auto new_boundary =
        refine_boundary(cloud, marks, initial_grid, initial_h_loc, cfg.alpha);
    rep.new_boundary = new_boundary.size();
    for (std::uint32_t id : new_boundary) fine_region.insert(id);

    const auto candidates =
        refine_interior(cloud, marks, initial_grid, initial_h_loc, cfg.alpha, cfg.voronoi_k);
    const auto accepted = prune_close(cloud, candidates, initial_grid, initial_h_loc, cfg.alpha);
    rep.new_interior = accepted.size();
    for (const Vec2& p : accepted) {
        cloud::SmartNode node;
        node.id = static_cast<std::uint32_t>(cloud.nodes.size());
        node.position = p;
        node.kind = cloud::NodeKind::Interior;
        node.h_loc = initial_h_loc[initial_grid.nearest(p)];
        node.fine = true;
        fine_region.insert(node.id);
        cloud.nodes.push_back(std::move(node));
    }

    if (cfg.relax) rep.relaxed = relax_local(cloud, fine_region, cfg.relax_passes).size();

    cloud::assign_boundary_conditions(cloud, specs);
    rep.nodes_after = cloud.nodes.size();
    rep.t_refine_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

}  // namespace sc::adapt

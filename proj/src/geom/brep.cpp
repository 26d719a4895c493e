#include "sc/geom/brep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sc::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Flatten one edge into chords with bounded turn angle and bounded length.
void flatten_edge(const BRepEdge& e, double max_len,
                  const std::function<void(Vec2, Vec2, double, double)>& emit) {
    const auto [t0, t1] = param_range(e.curve);
    int n = 1;
    if (std::holds_alternative<CircleArc>(e.curve)) {
        const auto& a = std::get<CircleArc>(e.curve);
        n = std::max(8, static_cast<int>(std::ceil((a.t1 - a.t0) / 0.02)));
        n = std::max(n, static_cast<int>(std::ceil(arclength(e.curve, t0, t1) / max_len)));
    } else if (std::holds_alternative<EllipseArc>(e.curve) ||
               std::holds_alternative<BSpline>(e.curve)) {
        n = std::max(16, static_cast<int>(std::ceil(arclength(e.curve, t0, t1) / max_len)));
        n = std::max(n, 256);
    } else {
        n = std::max(1, static_cast<int>(std::ceil(arclength(e.curve, t0, t1) / max_len)));
    }
    Vec2 prev = eval_curve(e.curve, t0);
    double tprev = t0;
    for (int i = 1; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / n;
        const Vec2 q = eval_curve(e.curve, t);
        if (e.reversed)
            emit(q, prev, t, tprev);
        else
            emit(prev, q, tprev, t);
        prev = q;
        tprev = t;
    }
}

double angle_between_deg(const Vec2& u, const Vec2& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    const double s = std::abs(cross(u, v)) / (nu * nv);
    return std::asin(std::clamp(s, 0.0, 1.0)) * 180.0 / kPi;
}

}  // namespace

double loop_length(const EdgeLoop& l) {
    double acc = 0.0;
    for (const auto& e : l.edges) {
        auto [t0, t1] = param_range(e.curve);
        acc += arclength(e.curve, t0, t1);
    }
    return acc;
}

BRepModel2D::BRepModel2D(EdgeLoop outer, std::vector<EdgeLoop> holes, double tol_rel)
    : outer_(std::move(outer)), holes_(std::move(holes)) {
    // Provisional bbox from coarse samples, needed for tolerance.
    for (std::size_t li = 0; li < loop_count(); ++li) {
        for (const auto& e : loop(li).edges) {
            const auto [t0, t1] = param_range(e.curve);
            for (int i = 0; i <= 16; ++i) bbox_.expand(eval_curve(e.curve, t0 + (t1 - t0) * i / 16.0));
        }
    }
    tol_geom_ = tol_rel * bbox_.diagonal();
    validate_and_normalize();
    build_chords();
}

double BRepModel2D::loop_signed_area(const EdgeLoop& l) const {
    // Shoelace over a fine flattening; exact enough to decide orientation.
    double acc = 0.0;
    for (const auto& e : l.edges) {
        flatten_edge(e, 0.05 * (bbox_.diagonal() > 0 ? bbox_.diagonal() : 1.0),
                     [&](Vec2 a, Vec2 b, double, double) { acc += cross(a, b); });
    }
    return 0.5 * acc;
}

void BRepModel2D::validate_and_normalize() {
    auto check_closed = [&](const EdgeLoop& l, std::size_t idx) {
        if (l.edges.empty()) throw OpenLoop("loop " + std::to_string(idx) + " has no edges");
        for (std::size_t i = 0; i < l.edges.size(); ++i) {
            const auto& cur = l.edges[i];
            const auto& nxt = l.edges[(i + 1) % l.edges.size()];
            if (distance(cur.end_point(), nxt.start_point()) > 1e3 * tol_geom_ + 1e-12)
                throw OpenLoop("loop " + std::to_string(idx) + " breaks after edge id " +
                               std::to_string(cur.id));
        }
    };
    auto reverse_loop = [](EdgeLoop& l) {
        std::reverse(l.edges.begin(), l.edges.end());
        for (auto& e : l.edges) e.reversed = !e.reversed;
    };

    check_closed(outer_, 0);
    if (loop_signed_area(outer_) < 0.0) reverse_loop(outer_);
    for (std::size_t i = 0; i < holes_.size(); ++i) {
        check_closed(holes_[i], i + 1);
        if (loop_signed_area(holes_[i]) > 0.0) reverse_loop(holes_[i]);
    }
}

void BRepModel2D::build_chords() {
    chords_.clear();
    const double diag = bbox_.diagonal() > 0.0 ? bbox_.diagonal() : 1.0;
    const double max_len = diag / 64.0;
    for (std::size_t li = 0; li < loop_count(); ++li) {
        const EdgeLoop& l = loop(li);
        for (std::size_t pos = 0; pos < l.edges.size(); ++pos) {
            flatten_edge(l.edges[pos], max_len, [&](Vec2 a, Vec2 b, double ta, double tb) {
                chords_.push_back({a, b, static_cast<std::uint32_t>(li),
                                   static_cast<std::uint32_t>(pos), ta, tb});
            });
        }
    }
    AABB exact;
    max_sagitta_ = 0.0;
    std::vector<std::pair<Vec2, Vec2>> segs;
    segs.reserve(chords_.size());
    for (const auto& c : chords_) {
        exact.expand(c.a);
        exact.expand(c.b);
        segs.emplace_back(c.a, c.b);
        const auto& e = loop(c.loop).edges[c.edge_pos];
        const Vec2 mid = eval_curve(e.curve, 0.5 * (c.ta + c.tb));
        const Vec2 chord_mid = (c.a + c.b) * 0.5;
        max_sagitta_ = std::max(max_sagitta_, distance(mid, chord_mid));
    }
    bbox_ = exact;
    chord_cell_ = std::max(diag / 128.0, 1e-12);
    chord_grid_.rebuild(segs, chord_cell_);
}

const BRepEdge& BRepModel2D::edge_by_id(int id) const {
    for (std::size_t li = 0; li < loop_count(); ++li)
        for (const auto& e : loop(li).edges)
            if (e.id == id) return e;
    throw std::out_of_range("no edge with id " + std::to_string(id));
}

bool BRepModel2D::has_edge(int id) const {
    for (std::size_t li = 0; li < loop_count(); ++li)
        for (const auto& e : loop(li).edges)
            if (e.id == id) return true;
    return false;
}

Vec2 BRepModel2D::normal_at(int edge_id, double t) const {
    const BRepEdge& e = edge_by_id(edge_id);
    const Vec2 tan = e.traversal_tangent(t);
    const double n = tan.norm();
    if (n < 1e-14) throw DegenerateTangent("zero tangent on edge " + std::to_string(edge_id));
    // Material lies left of the traversal direction; outward is the right side.
    return Vec2{tan.y / n, -tan.x / n};
}

BoundaryProjection BRepModel2D::project_to_edge(int edge_id, const Vec2& p) const {
    const BRepEdge& e = edge_by_id(edge_id);
    const CurveProjection cp = project_to_curve(e.curve, p);
    return {cp.point, edge_id, cp.t, cp.distance};
}

double BRepModel2D::chord_distance(const Vec2& p) const {
    double r = chord_cell_;
    for (int it = 0; it < 64; ++it) {
        auto ids = chord_grid_.query_box({p.x - r, p.y - r}, {p.x + r, p.y + r});
        double best = std::numeric_limits<double>::max();
        for (std::size_t i : ids) {
            const auto& [a, b] = chord_grid_.segment(i);
            const Vec2 d = b - a;
            const double len2 = d.squared_norm();
            const double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
            best = std::min(best, distance(p, a + d * t));
        }
        if (best <= r) return best;
        r *= 2.0;
    }
    return std::numeric_limits<double>::max();
}

BoundaryProjection BRepModel2D::project_point(const Vec2& p) const {
    // Localize with the chord grid, then refine on the exact curves of every
    // edge that could still hold the minimum.
    const double chord_d = chord_distance(p);
    const double margin = max_sagitta_ + chord_cell_;
    auto ids = chord_grid_.query_box({p.x - chord_d - margin, p.y - chord_d - margin},
                                     {p.x + chord_d + margin, p.y + chord_d + margin});
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // (loop, pos)
    for (std::size_t i : ids) edges.emplace_back(chords_[i].loop, chords_[i].edge_pos);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.empty()) {  // fall back to every edge
        for (std::uint32_t li = 0; li < loop_count(); ++li)
            for (std::uint32_t pos = 0; pos < loop(li).edges.size(); ++pos)
                edges.emplace_back(li, pos);
    }

    BoundaryProjection best;
    best.distance = std::numeric_limits<double>::max();
    for (auto [li, pos] : edges) {
        const BRepEdge& e = loop(li).edges[pos];
        const CurveProjection cp = project_to_curve(e.curve, p);
        if (cp.distance < best.distance) best = {cp.point, e.id, cp.t, cp.distance};
    }
    return best;
}

PointClass BRepModel2D::classify_from_projection(const Vec2& p,
                                                 const BoundaryProjection& bp) const {
    if (bp.distance < tol_geom_) return PointClass::OnBoundary;

    // Locate the projected edge within its loop for junction handling.
    std::size_t li = 0, pos = 0;
    bool found = false;
    for (std::size_t L = 0; L < loop_count() && !found; ++L) {
        const EdgeLoop& cand = loop(L);
        for (std::size_t P = 0; P < cand.edges.size(); ++P) {
            if (cand.edges[P].id == bp.edge_id) {
                li = L;
                pos = P;
                found = true;
                break;
            }
        }
    }
    const EdgeLoop& l = loop(li);
    const BRepEdge& e = l.edges[pos];
    const auto [t0, t1] = param_range(e.curve);
    const double eps_t = 1e-9 * (std::abs(t1 - t0) + 1.0);
    const Vec2 d = p - bp.point;

    const bool at_start = std::abs(bp.param - e.traversal_start()) < eps_t;
    const bool at_end = std::abs(bp.param - e.traversal_end()) < eps_t;
    if ((at_start || at_end) && l.edges.size() >= 1) {
        // Wedge test at the junction vertex: material is left of traversal.
        Vec2 ta, tb;
        if (at_end) {
            const BRepEdge& nxt = l.edges[(pos + 1) % l.edges.size()];
            ta = e.traversal_tangent(e.traversal_end()).normalized();
            tb = nxt.traversal_tangent(nxt.traversal_start()).normalized();
        } else {
            const BRepEdge& prv = l.edges[(pos + l.edges.size() - 1) % l.edges.size()];
            ta = prv.traversal_tangent(prv.traversal_end()).normalized();
            tb = e.traversal_tangent(e.traversal_start()).normalized();
        }
        bool inside;
        if (cross(ta, tb) >= -1e-12)  // convex (or smooth) corner of the material
            inside = cross(ta, d) > 0.0 && cross(tb, d) > 0.0;
        else  // reflex corner
            inside = cross(ta, d) > 0.0 || cross(tb, d) > 0.0;
        return inside ? PointClass::Inside : PointClass::Outside;
    }

    const Vec2 n = normal_at(bp.edge_id, bp.param);
    return dot(d, n) > 0.0 ? PointClass::Outside : PointClass::Inside;
}

PointClass BRepModel2D::classify_point(const Vec2& p) const {
    return classify_from_projection(p, project_point(p));
}

std::vector<PointClass> BRepModel2D::classify_batch(const std::vector<Vec2>& pts,
                                                    BatchStats* stats) const {
    std::vector<PointClass> out(pts.size(), PointClass::Inside);
    std::vector<bool> done(pts.size(), false);
    BatchStats local;

    const double cell = std::max(bbox_.diagonal() / 256.0, 1e-12);
    PointGrid grid(pts, cell);

    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (done[i]) continue;
        const BoundaryProjection bp = project_point(pts[i]);
        ++local.projection_queries;
        const PointClass side = classify_from_projection(pts[i], bp);
        out[i] = side;
        done[i] = true;
        if (side == PointClass::OnBoundary) continue;
        const double r = bp.distance - tol_geom_;
        if (r <= 0.0) continue;
        for (std::size_t j : grid.query_radius(pts[i], r)) {
            if (done[j]) continue;
            if ((pts[j] - pts[i]).norm() < r) {
                out[j] = side;
                done[j] = true;
            }
        }
    }
    if (stats) *stats = local;
    return out;
}

bool BRepModel2D::segment_intersects_boundary(const Vec2& a, const Vec2& b,
                                              double threshold_deg) const {
    const Vec2 lo{std::min(a.x, b.x), std::min(a.y, b.y)};
    const Vec2 hi{std::max(a.x, b.x), std::max(a.y, b.y)};
    const Vec2 ab = b - a;
    const double seg_len = ab.norm();
    if (seg_len == 0.0) return false;
    const double eps_s = 1e-12;

    for (std::size_t ci : chord_grid_.query_box(lo, hi)) {
        const Chord& c = chords_[ci];
        const Vec2 cd = c.b - c.a;
        const double den = cross(ab, cd);
        if (std::abs(den) < 1e-14 * seg_len * cd.norm()) continue;  // parallel
        const Vec2 ac = c.a - a;
        const double s = cross(ac, cd) / den;
        const double t = cross(ac, ab) / den;
        if (s <= eps_s || s >= 1.0 - eps_s) continue;  // open segment
        if (t < -1e-9 || t > 1.0 + 1e-9) continue;
        // Crossing angle measured against the exact curve tangent there.
        const auto& e = loop(c.loop).edges[c.edge_pos];
        const double tc = c.ta + (c.tb - c.ta) * std::clamp(t, 0.0, 1.0);
        const Vec2 tangent = eval_derivative(e.curve, tc);
        if (angle_between_deg(ab, tangent) > threshold_deg) return true;
    }
    return false;
}

}  // namespace sc::geom

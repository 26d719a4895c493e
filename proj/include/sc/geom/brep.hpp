#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sc/geom/curve.hpp"
#include "sc/geom/grid.hpp"
#include "sc/geom/vec2.hpp"

namespace sc::geom {

struct OpenLoop : std::runtime_error {
    explicit OpenLoop(const std::string& what) : std::runtime_error(what) {}
};

/// One topological edge of a loop: a trimmed curve plus the traversal sense.
/// `reversed == true` means the loop walks the curve from t1 down to t0.
struct BRepEdge {
    int id = 0;  // stable entity id (STEP id or constructor-assigned)
    Curve2D curve;
    bool reversed = false;

    double traversal_start() const {
        auto [t0, t1] = param_range(curve);
        return reversed ? t1 : t0;
    }
    double traversal_end() const {
        auto [t0, t1] = param_range(curve);
        return reversed ? t0 : t1;
    }
    Vec2 start_point() const { return eval_curve(curve, traversal_start()); }
    Vec2 end_point() const { return eval_curve(curve, traversal_end()); }
    /// Tangent in traversal direction.
    Vec2 traversal_tangent(double t) const {
        const Vec2 d = eval_derivative(curve, t);
        return reversed ? -d : d;
    }
};

struct EdgeLoop {
    std::vector<BRepEdge> edges;
};

enum class PointClass { Inside, Outside, OnBoundary };

struct BoundaryProjection {
    Vec2 point;
    int edge_id = 0;
    double param = 0.0;
    double distance = 0.0;
};

/// Planar boundary representation: one outer loop (counter-clockwise) plus
/// hole loops (clockwise). Orientation is normalized on construction using
/// signed areas; loop closure is validated against tol_geom.
class BRepModel2D {
public:
    BRepModel2D(EdgeLoop outer, std::vector<EdgeLoop> holes, double tol_rel = 1e-9);

    const EdgeLoop& outer() const { return outer_; }
    const std::vector<EdgeLoop>& holes() const { return holes_; }
    const AABB& bbox() const { return bbox_; }
    double tol_geom() const { return tol_geom_; }

    std::size_t loop_count() const { return 1 + holes_.size(); }
    const EdgeLoop& loop(std::size_t i) const { return i == 0 ? outer_ : holes_[i - 1]; }
    const BRepEdge& edge_by_id(int id) const;
    bool has_edge(int id) const;

    /// Unit outward normal (out of the material) on edge `id` at parameter `t`.
    Vec2 normal_at(int edge_id, double t) const;

    /// Globally closest boundary point.
    BoundaryProjection project_point(const Vec2& p) const;
    /// Closest point restricted to one edge.
    BoundaryProjection project_to_edge(int edge_id, const Vec2& p) const;

    PointClass classify_point(const Vec2& p) const;

    struct BatchStats {
        std::size_t projection_queries = 0;
    };
    /// Same labels as mapping classify_point, accelerated with the
    /// projection-disc rule: nodes strictly inside the disc of radius
    /// |Xc - proj(Xc)| around a classified seed Xc share its side.
    std::vector<PointClass> classify_batch(const std::vector<Vec2>& pts,
                                           BatchStats* stats = nullptr) const;

    /// True iff the open segment (a, b) crosses a boundary chord transversally
    /// with crossing angle above `threshold_deg`.
    bool segment_intersects_boundary(const Vec2& a, const Vec2& b,
                                     double threshold_deg = 5.0) const;

    /// Distance from p to the nearest boundary chord (fast, approximate within
    /// flattening sagitta). Used to skip visibility tests away from walls.
    double chord_distance(const Vec2& p) const;

private:
    struct Chord {
        Vec2 a, b;
        std::uint32_t loop = 0;
        std::uint32_t edge_pos = 0;
        double ta = 0.0, tb = 0.0;  // curve params at chord ends (traversal order)
    };

    void validate_and_normalize();
    void build_chords();
    double loop_signed_area(const EdgeLoop& l) const;
    PointClass classify_from_projection(const Vec2& p, const BoundaryProjection& bp) const;

    EdgeLoop outer_;
    std::vector<EdgeLoop> holes_;
    AABB bbox_;
    double tol_geom_ = 0.0;
    std::vector<Chord> chords_;
    SegmentGrid chord_grid_;
    double max_sagitta_ = 0.0;
    double chord_cell_ = 1.0;
};

/// Arclength of the full loop in traversal order.
double loop_length(const EdgeLoop& l);

}  // namespace sc::geom

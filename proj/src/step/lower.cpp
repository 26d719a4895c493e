#include "sc/step/lower.hpp"

#include <algorithm>
#include <cmath>

namespace sc::step {

namespace {

using geom::BRepEdge;
using geom::BSpline;
using geom::CircleArc;
using geom::Curve2D;
using geom::EdgeLoop;
using geom::EllipseArc;
using geom::Line;
using geom::Vec2;

constexpr double kPi = 3.14159265358979323846;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

class Lowerer {
public:
    Lowerer(const StepModel& model, double tol_rel) : model_(model), tol_rel_(tol_rel) {}

    geom::BRepModel2D run() {
        scan_points();

        std::vector<int> faces;
        for (const auto& [id, ent] : model_.entities)
            if (ent.keyword == "ADVANCED_FACE") faces.push_back(id);
        if (faces.empty())
            throw UnsupportedEntity("ADVANCED_FACE", 0, "no face found in model");
        if (faces.size() > 1)
            throw UnsupportedEntity("ADVANCED_FACE", faces[1], "multiple faces not supported");

        const StepEntity& face = model_.at(faces[0]);
        // ADVANCED_FACE(name, (bounds...), surface, same_sense)
        const auto& bounds = as_list(face, 1);
        const int surf_id = as_ref(face.args.at(2), face);
        const StepEntity& surf = model_.at(surf_id);
        if (surf.keyword != "PLANE") throw UnsupportedEntity(surf.keyword, surf.id);

        EdgeLoop outer;
        std::vector<EdgeLoop> holes;
        bool have_outer = false;
        std::vector<EdgeLoop> plain;
        for (const auto& bv : bounds) {
            const StepEntity& bound = model_.at(ref_of(bv, face));
            if (bound.keyword != "FACE_OUTER_BOUND" && bound.keyword != "FACE_BOUND")
                throw UnsupportedEntity(bound.keyword, bound.id);
            EdgeLoop loop = lower_loop(model_.at(as_ref(bound.args.at(1), bound)));
            if (bound.keyword == "FACE_OUTER_BOUND") {
                if (have_outer)
                    throw UnsupportedEntity("FACE_OUTER_BOUND", bound.id, "multiple outer bounds");
                outer = std::move(loop);
                have_outer = true;
            } else {
                plain.push_back(std::move(loop));
            }
        }
        if (!have_outer) {
            if (plain.empty()) throw UnsupportedEntity("FACE_BOUND", face.id, "face has no bounds");
            // Pick the loop with the largest bbox as the outer one.
            std::size_t best = 0;
            double best_area = -1.0;
            for (std::size_t i = 0; i < plain.size(); ++i) {
                geom::AABB box;
                for (const auto& e : plain[i].edges) {
                    const auto [t0, t1] = geom::param_range(e.curve);
                    for (int k = 0; k <= 16; ++k)
                        box.expand(geom::eval_curve(e.curve, t0 + (t1 - t0) * k / 16.0));
                }
                if (box.area() > best_area) {
                    best_area = box.area();
                    best = i;
                }
            }
            outer = std::move(plain[best]);
            plain.erase(plain.begin() + static_cast<std::ptrdiff_t>(best));
        }
        holes = std::move(plain);
        return geom::BRepModel2D(std::move(outer), std::move(holes), tol_rel_);
    }

private:
    // --- argument decoding helpers -------------------------------------

    static int ref_of(const Value& v, const StepEntity& in) {
        if (const auto* r = std::get_if<EntityRef>(&v.base())) return r->id;
        throw UnsupportedEntity(in.keyword, in.id, "expected entity reference argument");
    }
    static int as_ref(const Value& v, const StepEntity& in) { return ref_of(v, in); }
    static const ValueList& as_list(const StepEntity& e, std::size_t idx) {
        if (const auto* l = std::get_if<ValueList>(&e.args.at(idx).base())) return *l;
        throw UnsupportedEntity(e.keyword, e.id, "expected list argument");
    }
    static double as_number(const Value& v, const StepEntity& in) {
        if (const auto* d = std::get_if<double>(&v.base())) return *d;
        throw UnsupportedEntity(in.keyword, in.id, "expected numeric argument");
    }
    static bool as_bool(const Value& v, const StepEntity& in) {
        if (const auto* e = std::get_if<EnumValue>(&v.base())) {
            if (e->name == "T") return true;
            if (e->name == "F") return false;
        }
        throw UnsupportedEntity(in.keyword, in.id, "expected .T./.F. argument");
    }

    void scan_points() {
        // 2D-in-3D convention: z must vanish relative to the xy extent.
        geom::AABB box;
        double max_z = 0.0;
        for (const auto& [id, ent] : model_.entities) {
            if (ent.keyword != "CARTESIAN_POINT") continue;
            const Vec3 p = coords(ent);
            box.expand({p.x, p.y});
            max_z = std::max(max_z, std::abs(p.z));
        }
        if (box.valid() && max_z > 1e-9 * (box.diagonal() + 1.0))
            throw NonPlanarGeometry("CARTESIAN_POINT with non-zero z; model is not planar");
    }

    Vec3 coords(const StepEntity& e) const {
        const auto& l = as_list(e, 1);
        Vec3 p;
        if (!l.empty()) p.x = as_number(l[0], e);
        if (l.size() > 1) p.y = as_number(l[1], e);
        if (l.size() > 2) p.z = as_number(l[2], e);
        return p;
    }

    Vec2 point2(int id) const {
        const StepEntity& e = model_.at(id);
        if (e.keyword != "CARTESIAN_POINT") throw UnsupportedEntity(e.keyword, e.id);
        const Vec3 p = coords(e);
        return {p.x, p.y};
    }

    Vec3 direction3(int id) const {
        const StepEntity& e = model_.at(id);
        if (e.keyword != "DIRECTION") throw UnsupportedEntity(e.keyword, e.id);
        return coords(e);
    }

    Vec2 vertex_point(int id) const {
        const StepEntity& e = model_.at(id);
        if (e.keyword != "VERTEX_POINT") throw UnsupportedEntity(e.keyword, e.id);
        return point2(as_ref(e.args.at(1), e));
    }

    struct Placement {
        Vec2 origin;
        Vec2 xdir{1.0, 0.0};   // in-plane reference direction
        double handed = 1.0;   // +1: axis ~ +z, -1: axis ~ -z
    };

    Placement placement(int id) const {
        const StepEntity& e = model_.at(id);
        if (e.keyword != "AXIS2_PLACEMENT_3D" && e.keyword != "AXIS2_PLACEMENT_2D")
            throw UnsupportedEntity(e.keyword, e.id);
        Placement pl;
        pl.origin = point2(as_ref(e.args.at(1), e));
        if (e.keyword == "AXIS2_PLACEMENT_3D") {
            // AXIS2_PLACEMENT_3D(name, location, axis, ref_direction)
            if (e.args.size() > 2 && std::get_if<EntityRef>(&e.args[2].base())) {
                const Vec3 axis = direction3(as_ref(e.args[2], e));
                if (std::abs(axis.x) > 1e-9 || std::abs(axis.y) > 1e-9)
                    throw NonPlanarGeometry("placement axis is not normal to the xy plane");
                pl.handed = axis.z >= 0.0 ? 1.0 : -1.0;
            }
            if (e.args.size() > 3 && std::get_if<EntityRef>(&e.args[3].base())) {
                const Vec3 rd = direction3(as_ref(e.args[3], e));
                pl.xdir = Vec2{rd.x, rd.y}.normalized();
            }
        } else {
            if (e.args.size() > 2 && std::get_if<EntityRef>(&e.args[2].base())) {
                const Vec3 rd = direction3(as_ref(e.args[2], e));
                pl.xdir = Vec2{rd.x, rd.y}.normalized();
            }
        }
        return pl;
    }

    // Arc angles measured in world frame; curve parametrization stored CCW.
    static double wrap_positive(double a) {
        while (a <= 1e-12) a += 2.0 * kPi;
        while (a > 2.0 * kPi + 1e-12) a -= 2.0 * kPi;
        return a;
    }

    struct TrimmedCurve {
        Curve2D curve;
        bool param_from_a = true;  // stored parameter runs from vertex A to vertex B
    };

    TrimmedCurve lower_curve(int curve_id, const Vec2& va, const Vec2& vb) const {
        const StepEntity& c = model_.at(curve_id);
        const bool closed_edge = geom::distance(va, vb) < 1e-12 * (scale_hint() + 1.0);

        if (c.keyword == "LINE") {
            // LINE(name, pnt, dir_vector); param in length units along unit dir.
            const Vec2 origin = point2(as_ref(c.args.at(1), c));
            const StepEntity& vec = model_.at(as_ref(c.args.at(2), c));
            if (vec.keyword != "VECTOR") throw UnsupportedEntity(vec.keyword, vec.id);
            const Vec3 d3 = direction3(as_ref(vec.args.at(1), vec));
            const Vec2 dir = Vec2{d3.x, d3.y}.normalized();
            if (dir.norm() == 0.0) throw UnsupportedEntity("LINE", c.id, "degenerate direction");
            double ta = dot(va - origin, dir);
            double tb = dot(vb - origin, dir);
            Line l;
            l.origin = origin;
            l.direction = dir;
            l.t0 = std::min(ta, tb);
            l.t1 = std::max(ta, tb);
            if (l.t1 - l.t0 <= 0.0) throw UnsupportedEntity("LINE", c.id, "degenerate edge");
            return {Curve2D{l}, ta <= tb};
        }
        if (c.keyword == "CIRCLE") {
            const Placement pl = placement(as_ref(c.args.at(1), c));
            const double r = as_number(c.args.at(2), c);
            CircleArc arc;
            arc.center = pl.origin;
            arc.radius = r;
            if (closed_edge) {
                const double a0 = std::atan2(va.y - pl.origin.y, va.x - pl.origin.x);
                arc.t0 = a0;
                arc.t1 = a0 + 2.0 * kPi;
                return {Curve2D{arc}, true};
            }
            const double aa = std::atan2(va.y - pl.origin.y, va.x - pl.origin.x);
            const double ab = std::atan2(vb.y - pl.origin.y, vb.x - pl.origin.x);
            // The STEP curve sweeps CCW in its own frame: world-CCW from A to B
            // when right-handed, world-CCW from B to A otherwise.
            if (pl.handed > 0.0) {
                arc.t0 = aa;
                arc.t1 = aa + wrap_positive(ab - aa);
                return {Curve2D{arc}, true};
            }
            arc.t0 = ab;
            arc.t1 = ab + wrap_positive(aa - ab);
            return {Curve2D{arc}, false};
        }
        if (c.keyword == "ELLIPSE") {
            const Placement pl = placement(as_ref(c.args.at(1), c));
            double s1 = as_number(c.args.at(2), c);
            double s2 = as_number(c.args.at(3), c);
            double rot = std::atan2(pl.xdir.y, pl.xdir.x);
            if (s1 < s2) {  // normalize to major axis first; frame stays right-handed
                std::swap(s1, s2);
                rot += 0.5 * kPi;
            }
            EllipseArc el;
            el.center = pl.origin;
            el.a = s1;
            el.b = s2;
            el.rotation = rot;
            auto angle_of = [&](const Vec2& v) {
                // parameter t with C(t) = center + a cos t * u + b sin t * w
                const double cr = std::cos(rot), sr = std::sin(rot);
                const Vec2 d = v - pl.origin;
                const double lx = (cr * d.x + sr * d.y) / el.a;
                const double ly = (-sr * d.x + cr * d.y) / el.b;
                return std::atan2(ly, lx);
            };
            if (closed_edge) {
                const double a0 = angle_of(va);
                el.t0 = a0;
                el.t1 = a0 + 2.0 * kPi;
                return {Curve2D{el}, true};
            }
            double aa = angle_of(va);
            double ab = angle_of(vb);
            if (pl.handed > 0.0) {
                el.t0 = aa;
                el.t1 = aa + wrap_positive(ab - aa);
                return {Curve2D{el}, true};
            }
            el.t0 = ab;
            el.t1 = ab + wrap_positive(aa - ab);
            return {Curve2D{el}, false};
        }
        if (c.keyword == "B_SPLINE_CURVE_WITH_KNOTS") {
            // (name, degree, (cps), form, closed, self_intersect, (mults), (knots), spec)
            const int degree = static_cast<int>(as_number(c.args.at(1), c));
            if (degree < 1 || degree > 3)
                throw UnsupportedEntity(c.keyword, c.id, "degree must be 1..3");
            BSpline s;
            s.degree = degree;
            for (const auto& cp : as_list(c, 2)) s.control.push_back(point2(ref_of(cp, c)));
            const auto& mults = as_list(c, 6);
            const auto& knots = as_list(c, 7);
            if (mults.size() != knots.size())
                throw UnsupportedEntity(c.keyword, c.id, "knot/multiplicity mismatch");
            for (std::size_t i = 0; i < knots.size(); ++i) {
                const int m = static_cast<int>(as_number(mults[i], c));
                for (int k = 0; k < m; ++k) s.knots.push_back(as_number(knots[i], c));
            }
            if (s.knots.size() != s.control.size() + static_cast<std::size_t>(degree) + 1)
                throw UnsupportedEntity(c.keyword, c.id, "knot vector size mismatch");
            for (std::size_t i = 0; i + 1 < s.knots.size(); ++i)
                if (s.knots[i + 1] < s.knots[i])
                    throw UnsupportedEntity(c.keyword, c.id, "knots must be non-decreasing");
            // clamped check
            for (int k = 0; k <= degree; ++k) {
                if (s.knots[static_cast<std::size_t>(k)] != s.knots[0] ||
                    s.knots[s.knots.size() - 1 - static_cast<std::size_t>(k)] != s.knots.back())
                    throw UnsupportedEntity(c.keyword, c.id, "knot vector must be clamped");
            }
            const Vec2 p0 = s.control.front();
            const Vec2 p1 = s.control.back();
            const double tol = 1e-9 * (scale_hint() + 1.0);
            if (closed_edge) {
                if (geom::distance(p0, p1) > tol)
                    throw UnsupportedEntity(c.keyword, c.id, "closed edge on open b-spline");
                return {Curve2D{s}, true};
            }
            if (geom::distance(p0, va) < tol && geom::distance(p1, vb) < tol)
                return {Curve2D{s}, true};
            if (geom::distance(p0, vb) < tol && geom::distance(p1, va) < tol)
                return {Curve2D{s}, false};
            throw UnsupportedEntity(c.keyword, c.id, "partially trimmed b-spline not supported");
        }
        throw UnsupportedEntity(c.keyword, c.id);
    }

    double scale_hint() const {
        geom::AABB box;
        for (const auto& [id, ent] : model_.entities)
            if (ent.keyword == "CARTESIAN_POINT") {
                const Vec3 p = coords(ent);
                box.expand({p.x, p.y});
            }
        return box.valid() ? box.diagonal() : 1.0;
    }

    EdgeLoop lower_loop(const StepEntity& loop_ent) const {
        if (loop_ent.keyword != "EDGE_LOOP")
            throw UnsupportedEntity(loop_ent.keyword, loop_ent.id);
        EdgeLoop loop;
        for (const auto& oev : as_list(loop_ent, 1)) {
            const StepEntity& oe = model_.at(ref_of(oev, loop_ent));
            if (oe.keyword != "ORIENTED_EDGE") throw UnsupportedEntity(oe.keyword, oe.id);
            // ORIENTED_EDGE(name, *, *, edge_curve, orientation)
            const StepEntity& ec = model_.at(as_ref(oe.args.at(3), oe));
            if (ec.keyword != "EDGE_CURVE") throw UnsupportedEntity(ec.keyword, ec.id);
            const bool orientation = as_bool(oe.args.at(4), oe);
            const Vec2 v1 = vertex_point(as_ref(ec.args.at(1), ec));
            const Vec2 v2 = vertex_point(as_ref(ec.args.at(2), ec));
            const bool same_sense = as_bool(ec.args.at(4), ec);
            // Stored trim runs from edge start to edge end when same_sense.
            const Vec2 a = same_sense ? v1 : v2;
            const Vec2 b = same_sense ? v2 : v1;
            TrimmedCurve tc = lower_curve(as_ref(ec.args.at(3), ec), a, b);
            BRepEdge edge;
            edge.id = ec.id;
            edge.curve = std::move(tc.curve);
            // param_from_a: stored parameter runs A->B. Edge direction is v1->v2,
            // loop traversal follows `orientation`.
            const bool param_runs_edge_dir = (tc.param_from_a == same_sense);
            edge.reversed = (param_runs_edge_dir != orientation);
            loop.edges.push_back(std::move(edge));
        }
        return loop;
    }

    const StepModel& model_;
    double tol_rel_;
};

}  // namespace

geom::BRepModel2D lower_to_brep(const StepModel& model, double tol_rel) {
    return Lowerer(model, tol_rel).run();
}

}  // namespace sc::step

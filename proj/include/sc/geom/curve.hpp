#pragma once

#include <stdexcept>
#include <variant>
#include <vector>

#include "sc/geom/vec2.hpp"

namespace sc::geom {

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateTangent : std::runtime_error {
    explicit DegenerateTangent(const std::string& what) : std::runtime_error(what) {}
};

/// Infinite line trimmed to [t0, t1]; point(t) = origin + t * direction.
struct Line {
    Vec2 origin;
    Vec2 direction;  // unit
    double t0 = 0.0;
    double t1 = 1.0;
};

/// Arc of a circle, parametrized by angle; point(t) = center + r*(cos t, sin t).
/// t runs over [t0, t1] with t1 > t0 (t1 - t0 == 2*pi for a full circle).
struct CircleArc {
    Vec2 center;
    double radius = 1.0;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Arc of an ellipse with semi-axes a >= b > 0, major axis rotated by `rotation`.
struct EllipseArc {
    Vec2 center;
    double a = 1.0;
    double b = 1.0;
    double rotation = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Non-rational clamped B-spline, degree <= 3.
struct BSpline {
    int degree = 3;
    std::vector<Vec2> control;
    std::vector<double> knots;  // clamped, non-decreasing

    double t_min() const { return knots[static_cast<std::size_t>(degree)]; }
    double t_max() const { return knots[knots.size() - 1 - static_cast<std::size_t>(degree)]; }
};

using Curve2D = std::variant<Line, CircleArc, EllipseArc, BSpline>;

struct ParamRange {
    double t0 = 0.0;
    double t1 = 1.0;
};

ParamRange param_range(const Curve2D& c);

Vec2 eval_curve(const Curve2D& c, double t);
/// First derivative with respect to the curve parameter.
Vec2 eval_derivative(const Curve2D& c, double t);
Vec2 eval_second_derivative(const Curve2D& c, double t);

/// Arclength of [t0, t] computed by adaptive Gauss quadrature of |C'(t)|.
double arclength(const Curve2D& c, double t0, double t1);

/// Parameter at which arclength from range start equals `s` (Newton + bisection).
double param_at_arclength(const Curve2D& c, double s);

struct CurveProjection {
    double t = 0.0;
    Vec2 point;
    double distance = 0.0;
};

/// Closest point on the (trimmed) curve. Newton refinement seeded from uniform
/// samples; golden-section fallback when Newton fails to converge.
CurveProjection project_to_curve(const Curve2D& c, const Vec2& p);

/// De Boor evaluation, exposed for oracle tests.
Vec2 de_boor(const BSpline& s, double t);

}  // namespace sc::geom

#include "sc/geom/curve.hpp"

#include <algorithm>
#include <cmath>

namespace sc::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class... Ts>
struct Overload : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

void check_range(double t, double t0, double t1) {
    const double slack = 1e-9 * (std::abs(t1 - t0) + 1.0);
    if (t < t0 - slack || t > t1 + slack) throw OutOfRange("curve parameter out of range");
}

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGaussX[7] = {0.0,
                               -0.4058451513773972, 0.4058451513773972,
                               -0.7415311855993945, 0.7415311855993945,
                               -0.9491079123427585, 0.9491079123427585};
constexpr double kGaussW[7] = {0.4179591836734694,
                               0.3818300505051189, 0.3818300505051189,
                               0.2797053914892766, 0.2797053914892766,
                               0.1294849661688697, 0.1294849661688697};

double gauss_speed(const Curve2D& c, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 7; ++i) acc += kGaussW[i] * eval_derivative(c, mid + half * kGaussX[i]).norm();
    return acc * half;
}

double adaptive_arclength(const Curve2D& c, double a, double b, double whole, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss_speed(c, a, mid);
    const double right = gauss_speed(c, mid, b);
    if (depth > 24 || std::abs(left + right - whole) < 1e-13 * (1.0 + std::abs(whole)))
        return left + right;
    return adaptive_arclength(c, a, mid, left, depth + 1) +
           adaptive_arclength(c, mid, b, right, depth + 1);
}

int find_span(const BSpline& s, double t) {
    const int p = s.degree;
    const int n = static_cast<int>(s.control.size()) - 1;
    // span k such that knots[k] <= t < knots[k+1]; clamp to valid interval
    if (t >= s.knots[static_cast<std::size_t>(n + 1)]) return n;
    if (t <= s.knots[static_cast<std::size_t>(p)]) return p;
    int lo = p, hi = n + 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (t < s.knots[static_cast<std::size_t>(mid)])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

BSpline derivative_spline(const BSpline& s) {
    const int p = s.degree;
    BSpline d;
    d.degree = p - 1;
    d.control.resize(s.control.size() - 1);
    for (std::size_t i = 0; i + 1 < s.control.size(); ++i) {
        const double dk = s.knots[i + static_cast<std::size_t>(p) + 1] - s.knots[i + 1];
        d.control[i] = dk > 0.0 ? (s.control[i + 1] - s.control[i]) * (static_cast<double>(p) / dk)
                                : Vec2{0.0, 0.0};
    }
    d.knots.assign(s.knots.begin() + 1, s.knots.end() - 1);
    return d;
}

}  // namespace

Vec2 de_boor(const BSpline& s, double t) {
    const int p = s.degree;
    const int k = find_span(s, t);
    std::vector<Vec2> d(static_cast<std::size_t>(p) + 1);
    for (int j = 0; j <= p; ++j) d[static_cast<std::size_t>(j)] = s.control[static_cast<std::size_t>(j + k - p)];
    for (int r = 1; r <= p; ++r) {
        for (int j = p; j >= r; --j) {
            const std::size_t i = static_cast<std::size_t>(j + k - p);
            const double den = s.knots[i + static_cast<std::size_t>(p - r) + 1] - s.knots[i];
            const double alpha = den > 0.0 ? (t - s.knots[i]) / den : 0.0;
            d[static_cast<std::size_t>(j)] =
                d[static_cast<std::size_t>(j - 1)] * (1.0 - alpha) + d[static_cast<std::size_t>(j)] * alpha;
        }
    }
    return d[static_cast<std::size_t>(p)];
}

ParamRange param_range(const Curve2D& c) {
    return std::visit(Overload{
                          [](const Line& l) { return ParamRange{l.t0, l.t1}; },
                          [](const CircleArc& a) { return ParamRange{a.t0, a.t1}; },
                          [](const EllipseArc& e) { return ParamRange{e.t0, e.t1}; },
                          [](const BSpline& s) { return ParamRange{s.t_min(), s.t_max()}; },
                      },
                      c);
}

Vec2 eval_curve(const Curve2D& c, double t) {
    return std::visit(Overload{
                          [&](const Line& l) {
                              check_range(t, l.t0, l.t1);
                              return l.origin + l.direction * t;
                          },
                          [&](const CircleArc& a) {
                              check_range(t, a.t0, a.t1);
                              return a.center + Vec2{a.radius * std::cos(t), a.radius * std::sin(t)};
                          },
                          [&](const EllipseArc& e) {
                              check_range(t, e.t0, e.t1);
                              const double cr = std::cos(e.rotation), sr = std::sin(e.rotation);
                              const double px = e.a * std::cos(t), py = e.b * std::sin(t);
                              return e.center + Vec2{cr * px - sr * py, sr * px + cr * py};
                          },
                          [&](const BSpline& s) {
                              check_range(t, s.t_min(), s.t_max());
                              return de_boor(s, std::clamp(t, s.t_min(), s.t_max()));
                          },
                      },
                      c);
}

Vec2 eval_derivative(const Curve2D& c, double t) {
    return std::visit(Overload{
                          [&](const Line& l) { return l.direction; },
                          [&](const CircleArc& a) {
                              return Vec2{-a.radius * std::sin(t), a.radius * std::cos(t)};
                          },
                          [&](const EllipseArc& e) {
                              const double cr = std::cos(e.rotation), sr = std::sin(e.rotation);
                              const double px = -e.a * std::sin(t), py = e.b * std::cos(t);
                              return Vec2{cr * px - sr * py, sr * px + cr * py};
                          },
                          [&](const BSpline& s) {
                              return de_boor(derivative_spline(s), std::clamp(t, s.t_min(), s.t_max()));
                          },
                      },
                      c);
}

Vec2 eval_second_derivative(const Curve2D& c, double t) {
    return std::visit(Overload{
                          [&](const Line&) { return Vec2{0.0, 0.0}; },
                          [&](const CircleArc& a) {
                              return Vec2{-a.radius * std::cos(t), -a.radius * std::sin(t)};
                          },
                          [&](const EllipseArc& e) {
                              const double cr = std::cos(e.rotation), sr = std::sin(e.rotation);
                              const double px = -e.a * std::cos(t), py = -e.b * std::sin(t);
                              return Vec2{cr * px - sr * py, sr * px + cr * py};
                          },
                          [&](const BSpline& s) {
                              if (s.degree < 2) return Vec2{0.0, 0.0};
                              return de_boor(derivative_spline(derivative_spline(s)),
                                             std::clamp(t, s.t_min(), s.t_max()));
                          },
                      },
                      c);
}

double arclength(const Curve2D& c, double t0, double t1) {
    if (t1 <= t0) return 0.0;
    if (const auto* l = std::get_if<Line>(&c)) return (t1 - t0) * l->direction.norm();
    if (const auto* a = std::get_if<CircleArc>(&c)) return (t1 - t0) * a->radius;
    return adaptive_arclength(c, t0, t1, gauss_speed(c, t0, t1), 0);
}

double param_at_arclength(const Curve2D& c, double s) {
    const auto [t0, t1] = param_range(c);
    const double total = arclength(c, t0, t1);
    if (s <= 0.0) return t0;
    if (s >= total) return t1;
    // Newton on F(t) = arclength(t0, t) - s, F'(t) = |C'(t)|, bisection-bracketed.
    double lo = t0, hi = t1;
    double t = t0 + (t1 - t0) * (s / total);
    for (int it = 0; it < 64; ++it) {
        const double f = arclength(c, t0, t) - s;
        if (std::abs(f) < 1e-13 * (1.0 + total)) break;
        if (f > 0.0)
            hi = t;
        else
            lo = t;
        const double speed = eval_derivative(c, t).norm();
        double next = speed > 0.0 ? t - f / speed : 0.5 * (lo + hi);
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
        t = next;
    }
    return t;
}

CurveProjection project_to_curve(const Curve2D& c, const Vec2& p) {
    const auto [t0, t1] = param_range(c);

    if (const auto* l = std::get_if<Line>(&c)) {
        const double len2 = l->direction.squared_norm();
        double t = len2 > 0.0 ? dot(p - l->origin, l->direction) / len2 : t0;
        t = std::clamp(t, t0, t1);
        const Vec2 q = l->origin + l->direction * t;
        return {t, q, distance(p, q)};
    }
    if (const auto* a = std::get_if<CircleArc>(&c)) {
        const Vec2 d = p - a->center;
        double ang = std::atan2(d.y, d.x);
        // shift angle into [t0, t0 + 2pi)
        while (ang < a->t0) ang += 2.0 * kPi;
        while (ang >= a->t0 + 2.0 * kPi) ang -= 2.0 * kPi;
        double best_t;
        if (ang <= a->t1) {
            best_t = ang;
        } else {
            // closest endpoint
            const Vec2 q0 = eval_curve(c, a->t0), q1 = eval_curve(c, a->t1);
            best_t = distance(p, q0) <= distance(p, q1) ? a->t0 : a->t1;
        }
        const Vec2 q = eval_curve(c, best_t);
        return {best_t, q, distance(p, q)};
    }

    // Ellipse arc / B-spline: Newton on g(t) = (C(t) - p) . C'(t), multi-seeded.
    const int n_seed = 32;
    double best_t = t0;
    double best_d2 = std::numeric_limits<double>::max();
    auto consider = [&](double t) {
        t = std::clamp(t, t0, t1);
        const double d2 = (eval_curve(c, t) - p).squared_norm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best_t = t;
        }
    };
    for (int i = 0; i <= n_seed; ++i) {
        const double ts = t0 + (t1 - t0) * static_cast<double>(i) / n_seed;
        double t = ts;
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
            const Vec2 r = eval_curve(c, t) - p;
            const Vec2 d1 = eval_derivative(c, t);
            const Vec2 d2v = eval_second_derivative(c, t);
            const double g = dot(r, d1);
            const double gp = d1.squared_norm() + dot(r, d2v);
            if (std::abs(gp) < 1e-300) break;
            const double step = g / gp;
            t = std::clamp(t - step, t0, t1);
            if (std::abs(step) < 1e-14 * (1.0 + std::abs(t1 - t0))) {
                converged = true;
                break;
            }
        }
        if (converged) consider(t);
        // Golden-section fallback on the seed interval.
        if (!converged) {
            double a = std::max(t0, ts - (t1 - t0) / n_seed);
            double b = std::min(t1, ts + (t1 - t0) / n_seed);
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
            double f1 = (eval_curve(c, x1) - p).squared_norm();
            double f2 = (eval_curve(c, x2) - p).squared_norm();
            for (int it = 0; it < 80; ++it) {
                if (f1 < f2) {
                    b = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = b - phi * (b - a);
                    f1 = (eval_curve(c, x1) - p).squared_norm();
                } else {
                    a = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = a + phi * (b - a);
                    f2 = (eval_curve(c, x2) - p).squared_norm();
                }
            }
            consider(0.5 * (a + b));
        }
    }
    consider(t0);
    consider(t1);
    const Vec2 q = eval_curve(c, best_t);
    return {best_t, q, distance(p, q)};
}

}  // namespace sc::geom

#include "sc/bench/exact.hpp"

#include <cmath>
#include <complex>

namespace sc::bench {

using geom::Vec2;

namespace {

using cplx = std::complex<double>;

double kolosov_kappa(const gfd::MaterialModel& mat) {
    return mat.plane == gfd::Plane::Strain ? 3.0 - 4.0 * mat.nu
                                           : (3.0 - mat.nu) / (1.0 + mat.nu);
}

}  // namespace

ExactSolution kirsch_solution(double a, double S, const gfd::MaterialModel& mat) {
    const double mu = mat.mu();
    const double kappa = kolosov_kappa(mat);

    ExactSolution sol;
    sol.stress = [a, S](const Vec2& p) -> std::array<double, 3> {
        const double r2 = p.squared_norm();
        const double r = std::sqrt(r2);
        const double th = std::atan2(p.y, p.x);
        const double q = a * a / r2;
        const double q2 = q * q;
        const double c2 = std::cos(2.0 * th), s2 = std::sin(2.0 * th);
        const double srr = 0.5 * S * (1.0 - q) + 0.5 * S * (1.0 - 4.0 * q + 3.0 * q2) * c2;
        const double stt = 0.5 * S * (1.0 + q) - 0.5 * S * (1.0 + 3.0 * q2) * c2;
        const double srt = -0.5 * S * (1.0 + 2.0 * q - 3.0 * q2) * s2;
        const double c = std::cos(th), s = std::sin(th);
        const double sxx = srr * c * c + stt * s * s - 2.0 * srt * s * c;
        const double syy = srr * s * s + stt * c * c + 2.0 * srt * s * c;
        const double sxy = (srr - stt) * s * c + srt * (c * c - s * s);
        return {sxx, syy, sxy};
    };
    sol.displacement = [a, S, mu, kappa](const Vec2& p) -> Vec2 {
        const cplx z(p.x, p.y);
        const cplx a2 = cplx(a * a, 0.0);
        const cplx phi = 0.25 * S * (z + 2.0 * a2 / z);
        const cplx dphi = 0.25 * S * (1.0 - 2.0 * a2 / (z * z));
        const cplx psi = -0.5 * S * (z + a2 / z - a2 * a2 / (z * z * z));
        const cplx w = kappa * phi - z * std::conj(dphi) - std::conj(psi);
        return {w.real() / (2.0 * mu), w.imag() / (2.0 * mu)};
    };
    return sol;
}

ExactSolution inglis_solution(double a, double b, double Nx, double Ny,
                              const gfd::MaterialModel& mat) {
    const double mu = mat.mu();
    const double kappa = kolosov_kappa(mat);
    const double R = 0.5 * (a + b);
    const double m = (a - b) / (a + b);
    const double c2 = a * a - b * b;  // (2R)^2 m

    const double gamma = 0.25 * (Nx + Ny);
    const cplx gamma_p(0.5 * (Ny - Nx), 0.0);  // no remote shear
    const cplx A = -R * (2.0 * gamma * m + std::conj(gamma_p));

    // map z = omega(s) = R (s + m / s); inverse picks |s| >= 1
    auto s_of_z = [R, c2](const cplx& z) {
        const cplx w = std::sqrt(z * z - c2);
        const cplx s1 = (z + w) / (2.0 * R);
        const cplx s2 = (z - w) / (2.0 * R);
        return std::abs(s1) >= std::abs(s2) ? s1 : s2;
    };

    auto phi_s = [=](const cplx& s) { return gamma * R * (s + m / s) + A / s; };
    auto dphi_s = [=](const cplx& s) { return gamma * R * (1.0 - m / (s * s)) - A / (s * s); };
    auto ddphi_s = [=](const cplx& s) {
        return 2.0 * gamma * R * m / (s * s * s) + 2.0 * A / (s * s * s);
    };
    auto psi_s = [=](const cplx& s) {
        return -2.0 * gamma * R * (1.0 / s + m * s) - std::conj(A) * s +
               A * (1.0 + m * s * s) / (s * (s * s - m));
    };
    auto dpsi_s = [=](const cplx& s) {
        const cplx num = 1.0 + m * s * s;
        const cplx den = s * s * s - m * s;
        const cplx dnum = 2.0 * m * s;
        const cplx dden = 3.0 * s * s - m;
        return -2.0 * gamma * R * (-1.0 / (s * s) + m) - std::conj(A) +
               A * (dnum * den - num * dden) / (den * den);
    };
    auto omega_s = [=](const cplx& s) { return R * (1.0 - m / (s * s)); };
    auto omega_ss = [=](const cplx& s) { return 2.0 * R * m / (s * s * s); };

    ExactSolution sol;
    sol.stress = [=](const Vec2& p) -> std::array<double, 3> {
        const cplx z(p.x, p.y);
        const cplx s = s_of_z(z);
        const cplx os = omega_s(s);
        const cplx dphi = dphi_s(s) / os;                          // phi'(z)
        const cplx ddphi = (ddphi_s(s) * os - dphi_s(s) * omega_ss(s)) / (os * os * os);
        const cplx dpsi = dpsi_s(s) / os;                          // psi'(z)
        const double trace = 4.0 * dphi.real();                    // sxx + syy
        const cplx dev = 2.0 * (std::conj(z) * ddphi + dpsi);      // syy - sxx + 2i sxy
        const double sxx = 0.5 * (trace - dev.real());
        const double syy = 0.5 * (trace + dev.real());
        const double sxy = 0.5 * dev.imag();
        return {sxx, syy, sxy};
    };
    sol.displacement = [=](const Vec2& p) -> Vec2 {
        const cplx z(p.x, p.y);
        const cplx s = s_of_z(z);
        const cplx dphi = dphi_s(s) / omega_s(s);
        const cplx w = kappa * phi_s(s) - z * std::conj(dphi) - std::conj(psi_s(s));
        return {w.real() / (2.0 * mu), w.imag() / (2.0 * mu)};
    };
    return sol;
}

ind::ErrorField exact_error_field(const cloud::SmartCloud& cloud, const gfd::SolutionField& sol,
                                  const ExactSolution& exact, const gfd::MaterialModel& mat) {
    ind::ErrorField out;
    out.kind = ind::ErrorKind::Exact;
    out.e.resize(cloud.nodes.size());
    for (std::size_t i = 0; i < cloud.nodes.size(); ++i) {
        const double vm_exact = exact.von_mises_at(cloud.nodes[i].position, mat);
        out.e[i] = std::abs(vm_exact - sol.von_mises[i]);
    }
    return out;
}

}  // namespace sc::bench

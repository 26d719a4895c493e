#pragma once

#include <functional>

#include "sc/gfd/gfd.hpp"
#include "sc/ind/indicators.hpp"

namespace sc::bench {

/// Closed-form reference solution: displacement and in-plane stress fields.
struct ExactSolution {
    std::function<geom::Vec2(const geom::Vec2&)> displacement;
    std::function<std::array<double, 3>(const geom::Vec2&)> stress;  // s11, s22, s12

    double von_mises_at(const geom::Vec2& p, const gfd::MaterialModel& mat) const {
        return ind::von_mises(stress(p), mat.plane == gfd::Plane::Strain, mat.nu);
    }
};

/// Infinite body with a traction-free circular hole of radius a under remote
/// uniaxial tension S along x. Stresses from the classical polar closed form,
/// displacements from the Kolosov-Muskhelishvili potentials.
ExactSolution kirsch_solution(double a, double S, const gfd::MaterialModel& mat);

/// Infinite plate with a traction-free elliptical hole (semi-axes a > b along
/// x/y) under remote biaxial tension (Nx, Ny). Complex potentials on the
/// conformal map to the exterior of the unit circle.
ExactSolution inglis_solution(double a, double b, double Nx, double Ny,
                              const gfd::MaterialModel& mat);

/// Pointwise |exact - computed| of the von Mises stress.
ind::ErrorField exact_error_field(const cloud::SmartCloud& cloud, const gfd::SolutionField& sol,
                                  const ExactSolution& exact, const gfd::MaterialModel& mat);

}  // namespace sc::bench

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <vector>

#include "sc/cloud/cloud.hpp"

namespace sc::gfd {

struct InsufficientNodes : std::runtime_error {
    explicit InsufficientNodes(const std::string& what) : std::runtime_error(what) {}
};
struct SingularStencil : std::runtime_error {
    explicit SingularStencil(const std::string& what) : std::runtime_error(what) {}
};
struct MissingBC : std::runtime_error {
    explicit MissingBC(const std::string& what) : std::runtime_error(what) {}
};
struct SingularSystem : std::runtime_error {
    explicit SingularSystem(const std::string& what) : std::runtime_error(what) {}
};
struct ResidualTooLarge : std::runtime_error {
    explicit ResidualTooLarge(const std::string& what) : std::runtime_error(what) {}
};

enum class Plane { Stress, Strain };

struct MaterialModel {
    double E = 1.0;
    double nu = 0.3;
    Plane plane = Plane::Strain;
    geom::Vec2 body_force{0.0, 0.0};

    double mu() const { return E / (2.0 * (1.0 + nu)); }
    // sigma_11 = c11 e11 + c12 e22 (tensor strains), sigma_12 = 2 mu e12
    double c11() const {
        return plane == Plane::Stress ? E / (1.0 - nu * nu)
                                      : E * (1.0 - nu) / ((1.0 + nu) * (1.0 - 2.0 * nu));
    }
    double c12() const {
        return plane == Plane::Stress ? nu * E / (1.0 - nu * nu)
                                      : E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    }
};

/// 4th-order spline weight, w(s) = 1 - 6 s^2 + 8 s^3 - 3 s^4 for s <= 1.
double spline4_weight(double s);

/// Derivative weight rows of one collocation center.
/// D_d u ~= sum_j W(d, j) * (u_j - u_c); rows ordered {dx, dy, dxx, dxy, dyy}.
struct Stencil {
    std::uint32_t center = 0;
    std::vector<std::uint32_t> support;
    double radius = 0.0;  // max included distance
    Eigen::Matrix<double, 5, Eigen::Dynamic> weights;
    double kappa = 0.0;  // condition number of the local normal equations
};

struct StencilConfig {
    // One-sided boundary stencils lose their outermost (zero-weight) shell to
    // the spline; 16 keeps the effective support comfortably above the basis.
    int m_min = 16;
    double scale = 1.0;
    double visibility_angle_deg = 5.0;
    bool weighted = true;
    double kappa_max = 1e12;
    int threads = 1;
};

/// Distance-criterion support selection with the visibility criterion (a
/// candidate is excluded when its sight line crosses a boundary-element chord
/// transversally): grow a radius until m_min visible nodes are reached, then
/// keep every visible node within scale times that radius. Deterministic:
/// ties sorted by node id.
std::vector<std::uint32_t> select_support(const cloud::SmartCloud& cloud,
                                          const geom::PointGrid& grid,
                                          const cloud::ElementChords& chords,
                                          const geom::Vec2& center, std::uint32_t center_id,
                                          const StencilConfig& cfg, double* radius_out = nullptr);

Stencil compute_gfd_weights(const cloud::SmartCloud& cloud,
                            const std::vector<std::uint32_t>& support, std::uint32_t center_id,
                            const StencilConfig& cfg);

/// Stencils for every node of the cloud (parallel, deterministic per node).
std::vector<Stencil> build_stencils(const cloud::SmartCloud& cloud, const StencilConfig& cfg);

/// First-derivative weights at an arbitrary point (six-term basis fitted to
/// nodal values): d/dx f ~= sum_j wx[j] f_j, likewise wy. Used to evaluate
/// PDE residuals away from collocation nodes.
struct PointDerivativeFit {
    std::vector<std::uint32_t> support;
    std::vector<double> wx;
    std::vector<double> wy;
};
PointDerivativeFit fit_point_derivatives(const cloud::SmartCloud& cloud,
                                         const geom::PointGrid& grid,
                                         const cloud::ElementChords& chords,
                                         const geom::Vec2& point, const StencilConfig& cfg);

enum class RowKind : std::uint8_t { PDE, Dirichlet, Traction };

struct CollocationSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd rhs;
    std::vector<RowKind> row_kinds;  // 2n entries
};

CollocationSystem assemble(const cloud::SmartCloud& cloud, const std::vector<Stencil>& stencils,
                           const MaterialModel& mat);

struct SolveResult {
    std::vector<geom::Vec2> u;
    double residual = 0.0;  // ||Ax-b||_inf / ||b||_inf
};

SolveResult solve(const CollocationSystem& system);

struct SolutionField {
    std::vector<geom::Vec2> u;
    std::vector<std::array<double, 3>> strain;  // e11, e22, e12 (tensor)
    std::vector<std::array<double, 3>> stress;  // s11, s22, s12
    std::vector<double> von_mises;
    double residual = 0.0;
};

/// Strain/stress/von Mises recovery from the displacement solution.
SolutionField compute_stress(const cloud::SmartCloud& cloud, const std::vector<Stencil>& stencils,
                             const std::vector<geom::Vec2>& u, const MaterialModel& mat,
                             int threads = 1);

double max_kappa(const std::vector<Stencil>& stencils);

}  // namespace sc::gfd

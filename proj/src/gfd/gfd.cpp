#include "sc/gfd/gfd.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

#include "sc/core/parallel.hpp"
#include "sc/ind/vonmises.hpp"

namespace sc::gfd {

using geom::Vec2;

double spline4_weight(double s) {
    if (s > 1.0) return 0.0;
    const double s2 = s * s;
    return 1.0 - 6.0 * s2 + 8.0 * s2 * s - 3.0 * s2 * s2;
}

std::vector<std::uint32_t> select_support(const cloud::SmartCloud& cloud,
                                          const geom::PointGrid& grid,
                                          const cloud::ElementChords& chords, const Vec2& center,
                                          std::uint32_t center_id, const StencilConfig& cfg,
                                          double* radius_out) {
    const std::size_t n = cloud.nodes.size();
    if (n < static_cast<std::size_t>(cfg.m_min) + 1)
        throw InsufficientNodes("cloud smaller than stencil size");

    const double wall_dist = chords.distance(center);

    auto visible = [&](const Vec2& q, double dist) {
        if (dist < wall_dist) return true;  // segment cannot reach the boundary
        return !chords.blocks(center, q, cfg.visibility_angle_deg);
    };

    // Expand the candidate radius until m_min visible nodes are in range.
    double r = cloud.h > 0.0 ? 2.0 * cloud.h : 1.0;
    std::vector<std::pair<double, std::uint32_t>> cands;
    double r0 = -1.0;
    for (int iter = 0; iter < 64; ++iter) {
        cands.clear();
        for (std::size_t j : grid.query_radius(center, r)) {
            if (j == center_id) continue;
            cands.emplace_back((grid.point(j) - center).norm(), static_cast<std::uint32_t>(j));
        }
        std::sort(cands.begin(), cands.end());
        int vis = 0;
        for (const auto& [dist, j] : cands) {
            if (!visible(grid.point(j), dist)) continue;
            if (++vis == cfg.m_min) {
                r0 = dist;
                break;
            }
        }
        if (r0 >= 0.0) break;
        if (cands.size() >= n - 1) break;
        r *= 2.0;
    }
    if (r0 < 0.0) throw InsufficientNodes("not enough visible nodes around center");

    const double r_take = cfg.scale * r0;
    std::vector<std::uint32_t> support;
    cands.clear();
    for (std::size_t j : grid.query_radius(center, r_take * (1.0 + 1e-12))) {
        if (j == center_id) continue;
        cands.emplace_back((grid.point(j) - center).norm(), static_cast<std::uint32_t>(j));
    }
    std::sort(cands.begin(), cands.end());
    double r_max = 0.0;
    for (const auto& [dist, j] : cands) {
        if (dist > r_take * (1.0 + 1e-12)) break;
        if (!visible(grid.point(j), dist)) continue;
        support.push_back(j);
        r_max = std::max(r_max, dist);
    }
    if (radius_out) *radius_out = r_max;
    return support;
}

Stencil compute_gfd_weights(const cloud::SmartCloud& cloud,
                            const std::vector<std::uint32_t>& support, std::uint32_t center_id,
                            const StencilConfig& cfg) {
    const std::size_t m = support.size();
    if (m < 5) throw InsufficientNodes("stencil needs at least 5 support nodes");
    const Vec2 xc = cloud.nodes[center_id].position;

    double radius = 0.0;
    for (std::uint32_t j : support)
        radius = std::max(radius, (cloud.nodes[j].position - xc).norm());
    if (radius <= 0.0) throw SingularStencil("coincident support");

    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 5);
    Eigen::VectorXd sqw(static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        const Vec2 d = (cloud.nodes[support[j]].position - xc) / radius;
        const double s = d.norm();
        const double w = cfg.weighted ? spline4_weight(s) : 1.0;
        const double sw = std::sqrt(std::max(w, 0.0));
        sqw(static_cast<Eigen::Index>(j)) = sw;
        A(static_cast<Eigen::Index>(j), 0) = sw * d.x;
        A(static_cast<Eigen::Index>(j), 1) = sw * d.y;
        A(static_cast<Eigen::Index>(j), 2) = sw * 0.5 * d.x * d.x;
        A(static_cast<Eigen::Index>(j), 3) = sw * d.x * d.y;
        A(static_cast<Eigen::Index>(j), 4) = sw * 0.5 * d.y * d.y;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    const double kappa = smin > 0.0 ? (smax / smin) * (smax / smin)
                                    : std::numeric_limits<double>::infinity();
    if (!(kappa <= cfg.kappa_max))
        throw SingularStencil("stencil condition number " + std::to_string(kappa));

    // pinv(A) * diag(sqw): rows are the scaled derivative weights.
    Eigen::MatrixXd pinv =
        svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    Stencil st;
    st.center = center_id;
    st.support = support;
    st.radius = radius;
    st.kappa = kappa;
    st.weights.resize(5, static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        const double sw = sqw(static_cast<Eigen::Index>(j));
        for (int d = 0; d < 5; ++d) st.weights(d, static_cast<Eigen::Index>(j)) = pinv(d, static_cast<Eigen::Index>(j)) * sw;
    }
    // undo the 1/radius coordinate scaling
    st.weights.row(0) /= radius;
    st.weights.row(1) /= radius;
    st.weights.row(2) /= radius * radius;
    st.weights.row(3) /= radius * radius;
    st.weights.row(4) /= radius * radius;
    return st;
}

std::vector<Stencil> build_stencils(const cloud::SmartCloud& cloud, const StencilConfig& cfg) {
    const std::size_t n = cloud.nodes.size();
    std::vector<Stencil> out(n);
    const geom::PointGrid grid = cloud.make_grid();
    const cloud::ElementChords chords(cloud);
    core::parallel_for(n, cfg.threads, [&](std::size_t i) {
        StencilConfig attempt_cfg = cfg;
        for (int attempt = 0;; ++attempt) {
            const auto support = select_support(cloud, grid, chords, cloud.nodes[i].position,
                                                static_cast<std::uint32_t>(i), attempt_cfg);
            try {
                out[i] = compute_gfd_weights(cloud, support, static_cast<std::uint32_t>(i),
                                             attempt_cfg);
                break;
            } catch (const SingularStencil&) {
                if (attempt >= 3) throw;
                attempt_cfg.scale *= 1.3;
            }
        }
    });
    return out;
}

PointDerivativeFit fit_point_derivatives(const cloud::SmartCloud& cloud,
                                         const geom::PointGrid& grid,
                                         const cloud::ElementChords& chords, const Vec2& point,
                                         const StencilConfig& cfg) {
    // Zero-weight outer shells can leave a rank-deficient effective support
    // (cocircular lattice shells); grow the selection radius until the fit is
    // well posed.
    StencilConfig attempt_cfg = cfg;
    for (int attempt = 0;; ++attempt) {
        const auto support =
            select_support(cloud, grid, chords, point, geom::PointGrid::npos, attempt_cfg);
        const std::size_t m = support.size();
        if (m < 6) throw InsufficientNodes("point fit needs at least 6 support nodes");

        double radius = 0.0;
        for (std::uint32_t j : support)
            radius = std::max(radius, (cloud.nodes[j].position - point).norm());

        Eigen::MatrixXd A(static_cast<Eigen::Index>(m), 6);
        Eigen::VectorXd sqw(static_cast<Eigen::Index>(m));
        for (std::size_t j = 0; j < m; ++j) {
            const Vec2 d = (cloud.nodes[support[j]].position - point) / radius;
            const double w = cfg.weighted ? spline4_weight(d.norm()) : 1.0;
            const double sw = std::sqrt(std::max(w, 0.0));
            sqw(static_cast<Eigen::Index>(j)) = sw;
            A(static_cast<Eigen::Index>(j), 0) = sw;
            A(static_cast<Eigen::Index>(j), 1) = sw * d.x;
            A(static_cast<Eigen::Index>(j), 2) = sw * d.y;
            A(static_cast<Eigen::Index>(j), 3) = sw * 0.5 * d.x * d.x;
            A(static_cast<Eigen::Index>(j), 4) = sw * d.x * d.y;
            A(static_cast<Eigen::Index>(j), 5) = sw * 0.5 * d.y * d.y;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        const double rcond = sv(0) > 0.0 ? sv(sv.size() - 1) / sv(0) : 0.0;
        if (rcond < 1e-10) {
            if (attempt >= 4) throw SingularStencil("degenerate point fit");
            attempt_cfg.scale *= 1.3;
            continue;
        }
        Eigen::MatrixXd pinv = svd.matrixV() * sv.cwiseInverse().asDiagonal() *
                               svd.matrixU().transpose();
        PointDerivativeFit fit;
        fit.support = support;
        fit.wx.resize(m);
        fit.wy.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double sw = sqw(static_cast<Eigen::Index>(j));
            fit.wx[j] = pinv(1, static_cast<Eigen::Index>(j)) * sw / radius;
            fit.wy[j] = pinv(2, static_cast<Eigen::Index>(j)) * sw / radius;
        }
        return fit;
    }
}

CollocationSystem assemble(const cloud::SmartCloud& cloud, const std::vector<Stencil>& stencils,
                           const MaterialModel& mat) {
    const std::size_t n = cloud.nodes.size();
    const double c11 = mat.c11(), c12 = mat.c12(), mu = mat.mu();

    CollocationSystem sys;
    sys.A.resize(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * n));
    sys.row_kinds.assign(2 * n, RowKind::PDE);

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * n * 16);

    auto add = [&](std::size_t row, std::size_t node, int dof, double v) {
        if (v == 0.0) return;
        trips.emplace_back(static_cast<int>(row), static_cast<int>(2 * node + static_cast<std::size_t>(dof)), v);
    };

    for (std::size_t i = 0; i < n; ++i) {
        const auto& node = cloud.nodes[i];
        const auto& st = stencils[i];
        const std::size_t m = st.support.size();
        const std::size_t rx = 2 * i, ry = 2 * i + 1;

        const bool pde = !node.is_boundary() || node.pde_override;
        if (pde) {
            // x: c11 u1,xx + mu u1,yy + (c12 + mu) u2,xy = -b1
            // y: (c12 + mu) u1,xy + mu u2,xx + c11 u2,yy = -b2
            double cx1 = 0.0, cx2 = 0.0, cy1 = 0.0, cy2 = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double wxx = st.weights(2, static_cast<Eigen::Index>(j));
                const double wxy = st.weights(3, static_cast<Eigen::Index>(j));
                const double wyy = st.weights(4, static_cast<Eigen::Index>(j));
                const double a1 = c11 * wxx + mu * wyy;
                const double a2 = (c12 + mu) * wxy;
                const double b1 = (c12 + mu) * wxy;
                const double b2 = mu * wxx + c11 * wyy;
                add(rx, st.support[j], 0, a1);
                add(rx, st.support[j], 1, a2);
                add(ry, st.support[j], 0, b1);
                add(ry, st.support[j], 1, b2);
                cx1 -= a1;
                cx2 -= a2;
                cy1 -= b1;
                cy2 -= b2;
            }
            add(rx, i, 0, cx1);
            add(rx, i, 1, cx2);
            add(ry, i, 0, cy1);
            add(ry, i, 1, cy2);
            sys.rhs(static_cast<Eigen::Index>(rx)) = -mat.body_force.x;
            sys.rhs(static_cast<Eigen::Index>(ry)) = -mat.body_force.y;
            sys.row_kinds[rx] = RowKind::PDE;
            sys.row_kinds[ry] = RowKind::PDE;
            continue;
        }

        for (int d = 0; d < 2; ++d) {
            const std::size_t row = 2 * i + static_cast<std::size_t>(d);
            const cloud::DofBC& bc = node.bc[static_cast<std::size_t>(d)];
            if (bc.kind == cloud::DofBC::Kind::None)
                throw MissingBC("boundary node " + std::to_string(i) + " dof " +
                                std::to_string(d) + " has no boundary condition");
            if (bc.kind == cloud::DofBC::Kind::Dirichlet) {
                add(row, i, d, 1.0);
                sys.rhs(static_cast<Eigen::Index>(row)) = bc.value;
                sys.row_kinds[row] = RowKind::Dirichlet;
                continue;
            }
            // Traction row with the exact normal of the edge backing this dof.
            Vec2 nrm = node.normal;
            if (bc.edge_id >= 0) {
                for (const auto& par : node.parents) {
                    if (par.edge_id == bc.edge_id) {
                        nrm = cloud.brep->normal_at(par.edge_id, par.param);
                        break;
                    }
                }
            }
            double cu1 = 0.0, cu2 = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double wx = st.weights(0, static_cast<Eigen::Index>(j));
                const double wy = st.weights(1, static_cast<Eigen::Index>(j));
                double a1, a2;
                if (d == 0) {
                    a1 = c11 * nrm.x * wx + mu * nrm.y * wy;
                    a2 = c12 * nrm.x * wy + mu * nrm.y * wx;
                } else {
                    a1 = mu * nrm.x * wy + c12 * nrm.y * wx;
                    a2 = mu * nrm.x * wx + c11 * nrm.y * wy;
                }
                add(row, st.support[j], 0, a1);
                add(row, st.support[j], 1, a2);
                cu1 -= a1;
                cu2 -= a2;
            }
            add(row, i, 0, cu1);
            add(row, i, 1, cu2);
            sys.rhs(static_cast<Eigen::Index>(row)) = bc.value;
            sys.row_kinds[row] = RowKind::Traction;
        }
    }

    sys.A.setFromTriplets(trips.begin(), trips.end());
    sys.A.makeCompressed();
    return sys;
}

SolveResult solve(const CollocationSystem& system) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(system.A);
    lu.factorize(system.A);
    if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU factorization failed");
    Eigen::VectorXd x = lu.solve(system.rhs);
    if (lu.info() != Eigen::Success) throw SingularSystem("sparse LU solve failed");

    const double bnorm = system.rhs.lpNorm<Eigen::Infinity>();
    const double rnorm = (system.A * x - system.rhs).lpNorm<Eigen::Infinity>();
    const double rel = bnorm > 0.0 ? rnorm / bnorm : rnorm;
    if (rel > 1e-6) throw ResidualTooLarge("relative residual " + std::to_string(rel));

    SolveResult res;
    res.residual = rel;
    res.u.resize(static_cast<std::size_t>(x.size() / 2));
    for (std::size_t i = 0; i < res.u.size(); ++i)
        res.u[i] = {x(static_cast<Eigen::Index>(2 * i)), x(static_cast<Eigen::Index>(2 * i + 1))};
    return res;
}

SolutionField compute_stress(const cloud::SmartCloud& cloud, const std::vector<Stencil>& stencils,
                             const std::vector<Vec2>& u, const MaterialModel& mat, int threads) {
    const std::size_t n = cloud.nodes.size();
    SolutionField f;
    f.u = u;
    f.strain.resize(n);
    f.stress.resize(n);
    f.von_mises.resize(n);
    const double c11 = mat.c11(), c12 = mat.c12(), mu = mat.mu();

    core::parallel_for(n, threads, [&](std::size_t i) {
        const auto& st = stencils[i];
        const Vec2 uc = u[i];
        double dux = 0.0, duy = 0.0, dvx = 0.0, dvy = 0.0;
        for (std::size_t j = 0; j < st.support.size(); ++j) {
            const Vec2 du = u[st.support[j]] - uc;
            const double wx = st.weights(0, static_cast<Eigen::Index>(j));
            const double wy = st.weights(1, static_cast<Eigen::Index>(j));
            dux += wx * du.x;
            duy += wy * du.x;
            dvx += wx * du.y;
            dvy += wy * du.y;
        }
        const double e11 = dux;
        const double e22 = dvy;
        const double e12 = 0.5 * (duy + dvx);
        const double s11 = c11 * e11 + c12 * e22;
        const double s22 = c12 * e11 + c11 * e22;
        const double s12 = 2.0 * mu * e12;
        f.strain[i] = {e11, e22, e12};
        f.stress[i] = {s11, s22, s12};
        f.von_mises[i] = ind::von_mises({s11, s22, s12}, mat.plane == Plane::Strain, mat.nu);
    });
    return f;
}

double max_kappa(const std::vector<Stencil>& stencils) {
    double k = 0.0;
    for (const auto& s : stencils) k = std::max(k, s.kappa);
    return k;
}

}  // namespace sc::gfd

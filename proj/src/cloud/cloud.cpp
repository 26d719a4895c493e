#include "sc/cloud/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

namespace sc::cloud {

using geom::Vec2;

std::size_t SmartCloud::boundary_count() const {
    std::size_t n = 0;
    for (const auto& nd : nodes)
        if (nd.is_boundary()) ++n;
    return n;
}

std::vector<Vec2> SmartCloud::positions() const {
    std::vector<Vec2> p;
    p.reserve(nodes.size());
    for (const auto& nd : nodes) p.push_back(nd.position);
    return p;
}

geom::PointGrid SmartCloud::make_grid(double cell) const {
    return geom::PointGrid(positions(), cell > 0.0 ? cell : (h > 0.0 ? h : 1.0));
}

double choose_h(const geom::BRepModel2D& m, std::optional<double> explicit_h,
                std::optional<std::size_t> target_n, Lattice lattice) {
    if (explicit_h) {
        if (*explicit_h <= 0.0) throw InvalidTarget("h must be positive");
        return *explicit_h;
    }
    if (!target_n || *target_n < 16) throw InvalidTarget("target node count must be >= 16");
    const double area = m.bbox().area();
    const double h_sq = std::sqrt(area / static_cast<double>(*target_n));
    if (lattice == Lattice::Square) return h_sq;
    // Triangular rows are h*sqrt(3)/2 apart, so the same count needs a wider pitch.
    return h_sq * std::sqrt(2.0 / std::sqrt(3.0));
}

BoundaryDiscretization discretize_boundary(const geom::BRepModel2D& m, double h) {
    if (h <= 0.0) throw InvalidTarget("h must be positive");
    BoundaryDiscretization out;
    const double tol = m.tol_geom();

    for (std::size_t li = 0; li < m.loop_count(); ++li) {
        const geom::EdgeLoop& loop = m.loop(li);
        const double L = geom::loop_length(loop);
        if (h >= L / 3.0)
            throw InvalidTarget("h too large for loop of length " + std::to_string(L));

        const std::size_t first_node_of_loop = out.nodes.size();
        // edge id of the element that starts at each emitted node
        std::vector<int> elem_edge;
        for (const auto& e : loop.edges) {
            const auto [t0, t1] = geom::param_range(e.curve);
            const double arclen = geom::arclength(e.curve, t0, t1);
            if (arclen < tol) throw DegenerateEdge("edge " + std::to_string(e.id));
            const std::size_t k =
                std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(arclen / h)));
            for (std::size_t j = 0; j < k; ++j) {
                const double s_traversal = arclen * static_cast<double>(j) / static_cast<double>(k);
                const double s = e.reversed ? arclen - s_traversal : s_traversal;
                const double t = geom::param_at_arclength(e.curve, s);
                const Vec2 p = geom::eval_curve(e.curve, t);

                if (out.nodes.size() > first_node_of_loop) {
                    // corner duplicate of the previous edge's tail sample
                    SmartNode& prev = out.nodes.back();
                    if (geom::distance(prev.position, p) < 10.0 * tol) {
                        prev.parents.push_back({e.id, t});
                        elem_edge.back() = e.id;  // next element lies on this edge
                        continue;
                    }
                }
                SmartNode n;
                n.id = static_cast<std::uint32_t>(out.nodes.size());
                n.position = p;
                n.kind = NodeKind::Boundary;
                n.parents.push_back({e.id, t});
                if (j == 0) {
                    // junction with the previous edge in the loop
                    auto pos_in_loop = [&]() {
                        for (std::size_t q = 0; q < loop.edges.size(); ++q)
                            if (&loop.edges[q] == &e) return q;
                        return std::size_t{0};
                    }();
                    const auto& prev_edge =
                        loop.edges[(pos_in_loop + loop.edges.size() - 1) % loop.edges.size()];
                    if (prev_edge.id != e.id &&
                        geom::distance(prev_edge.end_point(), p) < 10.0 * tol)
                        n.parents.push_back({prev_edge.id, prev_edge.traversal_end()});
                }
                n.normal = m.normal_at(e.id, t);
                out.nodes.push_back(std::move(n));
                elem_edge.push_back(e.id);
            }
        }
        // wrap-around duplicate: last sample may coincide with the loop head
        if (out.nodes.size() - first_node_of_loop >= 2) {
            SmartNode& head = out.nodes[first_node_of_loop];
            SmartNode& tail = out.nodes.back();
            if (geom::distance(head.position, tail.position) < 10.0 * tol) {
                for (const auto& par : tail.parents) head.parents.push_back(par);
                out.nodes.pop_back();
                elem_edge.pop_back();
            }
        }

        // chain elements around the loop
        const std::size_t loop_n = out.nodes.size() - first_node_of_loop;
        for (std::size_t j = 0; j < loop_n; ++j) {
            const std::size_t a = first_node_of_loop + j;
            const std::size_t b = first_node_of_loop + (j + 1) % loop_n;
            BoundaryElement el;
            el.id = static_cast<std::uint32_t>(out.elements.size());
            el.nodes = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
            el.parent_edge = elem_edge[j];
            const Vec2 chord = out.nodes[b].position - out.nodes[a].position;
            el.normal = Vec2{chord.y, -chord.x}.normalized();
            out.elements.push_back(el);
            out.nodes[a].incident_elements.push_back(el.id);
            out.nodes[b].incident_elements.push_back(el.id);
        }
    }
    return out;
}

std::vector<Vec2> generate_lattice(const geom::AABB& bbox, double h, Lattice kind) {
    if (h <= 0.0) throw InvalidTarget("h must be positive");
    std::vector<Vec2> pts;
    const double eps = 1e-9 * h;
    if (kind == Lattice::Square) {
        for (double y = bbox.lo.y; y <= bbox.hi.y + eps; y += h)
            for (double x = bbox.lo.x; x <= bbox.hi.x + eps; x += h) pts.push_back({x, y});
        return pts;
    }
    const double dy = h * std::sqrt(3.0) / 2.0;
    std::size_t row = 0;
    for (double y = bbox.lo.y; y <= bbox.hi.y + eps; y += dy, ++row) {
        const double x0 = bbox.lo.x + ((row % 2 == 1) ? 0.5 * h : 0.0);
        for (double x = x0; x <= bbox.hi.x + eps; x += h) pts.push_back({x, y});
    }
    return pts;
}

std::vector<Vec2> filter_interior(const std::vector<Vec2>& pts,
                                  const std::vector<SmartNode>& boundary_nodes,
                                  const geom::BRepModel2D& m, double t, double h,
                                  geom::BRepModel2D::BatchStats* stats) {
    if (t < 0.0 || t >= 1.0) throw InvalidTarget("threshold t must be in [0, 1)");
    std::vector<Vec2> bpos;
    bpos.reserve(boundary_nodes.size());
    for (const auto& n : boundary_nodes) bpos.push_back(n.position);
    geom::PointGrid bgrid(bpos, h);

    const auto labels = m.classify_batch(pts, stats);
    std::vector<Vec2> kept;
    kept.reserve(pts.size());
    const double th = t * h;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (labels[i] != geom::PointClass::Inside) continue;
        bool close = false;
        for (std::size_t j : bgrid.query_radius(pts[i], th)) {
            (void)j;
            close = true;
            break;
        }
        // Nodes hugging the curve between boundary nodes ill-condition their
        // stencils once local refinement shrinks the spacing around them.
        // An eighth of the node threshold covers four rounds of h-adaptivity
        // (local spacing contracts by ~0.58 per round).
        if (!close && th > 0.0 && m.chord_distance(pts[i]) <= 0.125 * th) close = true;
        if (!close) kept.push_back(pts[i]);
    }
    return kept;
}

namespace {

enum class Rank { NonzeroNeumann = 0, Dirichlet = 1, HomNeumann = 2 };

Rank spec_rank(const BCSpec& s) {
    if (s.type == BCSpec::Type::Traction) {
        const double fx = s.value[0].value_or(0.0);
        const double fy = s.value[1].value_or(0.0);
        return (fx != 0.0 || fy != 0.0) ? Rank::NonzeroNeumann : Rank::HomNeumann;
    }
    if (s.type == BCSpec::Type::Dirichlet) return Rank::Dirichlet;
    return Rank::HomNeumann;
}

}  // namespace

void assign_boundary_conditions(SmartCloud& cloud, const std::vector<BCSpec>& specs) {
    std::map<int, BCSpec> by_edge;
    for (const auto& s : specs) {
        if (!cloud.brep->has_edge(s.entity)) throw UnknownEntity(s.entity);
        by_edge[s.entity] = s;
    }

    for (auto& node : cloud.nodes) {
        if (!node.is_boundary()) {
            node.bc = {};
            continue;
        }
        for (int d = 0; d < 2; ++d) {
            // candidate per parent edge: (rank, edge id, resolved dof bc)
            int best_rank = 99;
            int best_edge = std::numeric_limits<int>::max();
            DofBC chosen;
            for (const auto& par : node.parents) {
                BCSpec spec;  // default: free edge
                spec.type = BCSpec::Type::Free;
                spec.entity = par.edge_id;
                if (auto it = by_edge.find(par.edge_id); it != by_edge.end()) spec = it->second;

                Rank cat = spec_rank(spec);
                DofBC dof;
                dof.edge_id = par.edge_id;
                int rank = static_cast<int>(cat);
                switch (spec.type) {
                    case BCSpec::Type::Traction:
                        dof.kind = DofBC::Kind::Traction;
                        dof.value = spec.value[static_cast<std::size_t>(d)].value_or(0.0);
                        break;
                    case BCSpec::Type::Dirichlet:
                        if (spec.value[static_cast<std::size_t>(d)].has_value()) {
                            dof.kind = DofBC::Kind::Dirichlet;
                            dof.value = *spec.value[static_cast<std::size_t>(d)];
                        } else {  // free dof of a Dirichlet edge: homogeneous Neumann
                            dof.kind = DofBC::Kind::Traction;
                            dof.value = 0.0;
                            rank = static_cast<int>(Rank::HomNeumann);
                        }
                        break;
                    case BCSpec::Type::Free:
                        dof.kind = DofBC::Kind::Traction;
                        dof.value = 0.0;
                        break;
                }
                if (rank < best_rank || (rank == best_rank && par.edge_id < best_edge)) {
                    best_rank = rank;
                    best_edge = par.edge_id;
                    chosen = dof;
                }
            }
            node.bc[static_cast<std::size_t>(d)] = chosen;
        }
    }
}

void compute_h_loc(SmartCloud& cloud) {
    if (cloud.nodes.size() < 2) throw InvalidTarget("h_loc needs at least two nodes");
    auto grid = cloud.make_grid();
    for (auto& node : cloud.nodes) {
        const auto nn = grid.nearest_k(node.position, 1, node.id);
        node.h_loc = nn.empty() ? cloud.h : geom::distance(node.position, grid.point(nn[0]));
    }
}

ElementChords::ElementChords(const SmartCloud& cloud) {
    std::vector<std::pair<Vec2, Vec2>> segs;
    segs.reserve(cloud.elements.size());
    double total = 0.0;
    for (const auto& el : cloud.elements) {
        const Vec2 a = cloud.nodes[el.nodes[0]].position;
        const Vec2 b = cloud.nodes[el.nodes[1]].position;
        segs.emplace_back(a, b);
        total += geom::distance(a, b);
    }
    cell_ = segs.empty() ? 1.0 : std::max(total / static_cast<double>(segs.size()), 1e-12);
    grid_.rebuild(segs, cell_);
}

bool ElementChords::blocks(const Vec2& a, const Vec2& b, double threshold_deg) const {
    const Vec2 ab = b - a;
    const double seg_len = ab.norm();
    if (seg_len == 0.0 || grid_.size() == 0) return false;
    const Vec2 lo{std::min(a.x, b.x), std::min(a.y, b.y)};
    const Vec2 hi{std::max(a.x, b.x), std::max(a.y, b.y)};
    const double sin_thresh = std::sin(threshold_deg * 3.14159265358979323846 / 180.0);
    constexpr double eps_s = 1e-9;

    for (std::size_t ci : grid_.query_box(lo, hi)) {
        const auto& [ca, cb] = grid_.segment(ci);
        const Vec2 cd = cb - ca;
        const double den = cross(ab, cd);
        if (std::abs(den) < 1e-14 * seg_len * cd.norm()) continue;  // parallel
        const Vec2 ac = ca - a;
        const double s = cross(ac, cd) / den;
        const double t = cross(ac, ab) / den;
        if (s <= eps_s || s >= 1.0 - eps_s) continue;  // open segment
        if (t < -eps_s || t > 1.0 + eps_s) continue;
        const double sin_angle = std::abs(den) / (seg_len * cd.norm());
        if (sin_angle > sin_thresh) return true;
    }
    return false;
}

double ElementChords::distance(const Vec2& p) const {
    if (grid_.size() == 0) return std::numeric_limits<double>::max();
    double r = cell_;
    for (int it = 0; it < 64; ++it) {
        auto ids = grid_.query_box({p.x - r, p.y - r}, {p.x + r, p.y + r});
        double best = std::numeric_limits<double>::max();
        for (std::size_t i : ids) {
            const auto& [a, b] = grid_.segment(i);
            const Vec2 d = b - a;
            const double len2 = d.squared_norm();
            const double t = len2 > 0.0 ? std::clamp(dot(p - a, d) / len2, 0.0, 1.0) : 0.0;
            best = std::min(best, geom::distance(p, a + d * t));
        }
        if (best <= r) return best;
        r *= 2.0;
    }
    return std::numeric_limits<double>::max();
}

SmartCloud build_cloud(std::shared_ptr<const geom::BRepModel2D> brep, const CloudParams& params) {
    SmartCloud cloud;
    cloud.brep = brep;
    cloud.lattice = params.lattice;
    cloud.t = params.t;
    cloud.h = choose_h(*brep, params.h, params.target_n, params.lattice);

    BoundaryDiscretization bd = discretize_boundary(*brep, cloud.h);
    const auto lattice_pts = generate_lattice(brep->bbox(), cloud.h, params.lattice);
    const auto interior = filter_interior(lattice_pts, bd.nodes, *brep, params.t, cloud.h);

    cloud.nodes = std::move(bd.nodes);
    cloud.elements = std::move(bd.elements);
    cloud.nodes.reserve(cloud.nodes.size() + interior.size());
    for (const Vec2& p : interior) {
        SmartNode n;
        n.id = static_cast<std::uint32_t>(cloud.nodes.size());
        n.position = p;
        n.kind = NodeKind::Interior;
        cloud.nodes.push_back(std::move(n));
    }
    compute_h_loc(cloud);
    return cloud;
}

}  // namespace sc::cloud

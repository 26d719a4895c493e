#include <doctest.h>

#include <random>
#include <set>

#include "sc/adapt/adapt.hpp"

using namespace sc;
using geom::Vec2;

namespace {

constexpr double kPi = 3.14159265358979323846;

geom::BRepEdge line_edge(int id, Vec2 a, Vec2 b) {
    geom::BRepEdge e;
    e.id = id;
    e.curve = geom::Line{a, (b - a).normalized(), 0.0, (b - a).norm()};
    return e;
}

std::shared_ptr<geom::BRepModel2D> square_domain(double w) {
    geom::EdgeLoop outer;
    outer.edges.push_back(line_edge(1, {0, 0}, {w, 0}));
    outer.edges.push_back(line_edge(2, {w, 0}, {w, w}));
    outer.edges.push_back(line_edge(3, {w, w}, {0, w}));
    outer.edges.push_back(line_edge(4, {0, w}, {0, 0}));
    return std::make_shared<geom::BRepModel2D>(std::move(outer), std::vector<geom::EdgeLoop>{});
}

std::shared_ptr<geom::BRepModel2D> plate_with_hole(double half, double r) {
    geom::EdgeLoop outer;
    outer.edges.push_back(line_edge(1, {-half, -half}, {half, -half}));
    outer.edges.push_back(line_edge(2, {half, -half}, {half, half}));
    outer.edges.push_back(line_edge(3, {half, half}, {-half, half}));
    outer.edges.push_back(line_edge(4, {-half, half}, {-half, -half}));
    geom::EdgeLoop hole;
    geom::BRepEdge c;
    c.id = 5;
    c.curve = geom::CircleArc{{0.0, 0.0}, r, 0.0, 2.0 * kPi};
    hole.edges.push_back(c);
    return std::make_shared<geom::BRepModel2D>(std::move(outer),
                                               std::vector<geom::EdgeLoop>{hole});
}

cloud::SmartCloud make_cloud(std::shared_ptr<const geom::BRepModel2D> brep, double h,
                             cloud::Lattice lat = cloud::Lattice::Square) {
    cloud::CloudParams p;
    p.h = h;
    p.lattice = lat;
    p.t = 0.3;
    return cloud::build_cloud(std::move(brep), p);
}

std::vector<cloud::BCSpec> free_specs(const geom::BRepModel2D& brep) {
    std::vector<cloud::BCSpec> specs;
    for (std::size_t li = 0; li < brep.loop_count(); ++li)
        for (const auto& e : brep.loop(li).edges)
            specs.push_back({cloud::BCSpec::Type::Free, {std::nullopt, std::nullopt}, e.id});
    return specs;
}

}  // namespace

TEST_CASE("marking: counts, tie-breaking, closure") {
    // synthetic stencils: node i supports {i-1, i+1}
    const std::size_t n = 100;
    std::vector<gfd::Stencil> stencils(n);
    for (std::size_t i = 0; i < n; ++i) {
        stencils[i].center = static_cast<std::uint32_t>(i);
        if (i > 0) stencils[i].support.push_back(static_cast<std::uint32_t>(i - 1));
        if (i + 1 < n) stencils[i].support.push_back(static_cast<std::uint32_t>(i + 1));
    }

    SUBCASE("ceil arithmetic") {
        ind::ErrorField e;
        e.e.resize(n);
        for (std::size_t i = 0; i < n; ++i) e.e[i] = static_cast<double>(i);
        const auto marks = adapt::mark_nodes(e, stencils, 0.05);
        CHECK(marks.seeds.size() == 5);
        // the five highest errors are nodes 95..99
        for (std::uint32_t s : marks.seeds) CHECK(s >= 95);
    }

    SUBCASE("uniform error marks the lowest ids") {
        ind::ErrorField e;
        e.e.assign(n, 1.0);
        const auto marks = adapt::mark_nodes(e, stencils, 0.05);
        REQUIRE(marks.seeds.size() == 5);
        for (std::uint32_t i = 0; i < 5; ++i) CHECK(marks.seeds[i] == i);
    }

    SUBCASE("closure is the set union of seeds and their supports") {
        ind::ErrorField e;
        e.e.assign(n, 0.0);
        e.e[50] = 1.0;
        const auto marks = adapt::mark_nodes(e, stencils, 0.01);
        REQUIRE(marks.seeds.size() == 1);
        CHECK(marks.seeds[0] == 50);
        std::set<std::uint32_t> oracle{50, 49, 51};
        CHECK(std::set<std::uint32_t>(marks.closure.begin(), marks.closure.end()) == oracle);
    }
}

TEST_CASE("boundary refinement: exact projection and single split") {
    const auto brep = plate_with_hole(2.5, 1.0);
    auto c = make_cloud(brep, 0.25);
    cloud::assign_boundary_conditions(c, free_specs(*brep));
    cloud::compute_h_loc(c);
    const auto initial_grid = c.make_grid();
    std::vector<double> h_loc(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) h_loc[i] = c.nodes[i].h_loc;

    // mark every node on the hole rim plus one straight-edge node
    adapt::MarkSet marks;
    std::uint32_t straight_node = 0;
    for (const auto& n : c.nodes) {
        if (!n.is_boundary()) continue;
        if (n.parents.front().edge_id == 5) marks.closure.push_back(n.id);
        if (n.parents.front().edge_id == 1 && straight_node == 0 && n.parents.size() == 1)
            straight_node = n.id;
    }
    marks.closure.push_back(straight_node);
    std::sort(marks.closure.begin(), marks.closure.end());
    marks.seeds = marks.closure;

    const std::size_t elements_before = c.elements.size();
    const std::size_t nodes_before = c.nodes.size();
    std::size_t rim_before = 0;
    for (const auto& el : c.elements)
        if (el.parent_edge == 5) ++rim_before;
    const auto new_ids = adapt::refine_boundary(c, marks, initial_grid, h_loc, 3.0);
    CHECK(!new_ids.empty());
    // each split adds one node and one element
    CHECK(c.nodes.size() - nodes_before == c.elements.size() - elements_before);

    for (std::uint32_t id : new_ids) {
        const auto& n = c.nodes[id];
        REQUIRE(n.is_boundary());
        if (n.parents.front().edge_id == 5) {
            // on the exact circle, not at the chord midpoint
            CHECK(std::abs(n.position.norm() - 1.0) < 1e-12);
        } else {
            // straight edges: the projected midpoint is the chord midpoint
            const auto& el_a = c.elements[n.incident_elements[0]];
            const auto& el_b = c.elements[n.incident_elements[1]];
            const Vec2 left = c.nodes[el_a.nodes[0]].position;
            const Vec2 right = c.nodes[el_b.nodes[1]].position;
            const Vec2 mid = (left + right) * 0.5;
            CHECK(geom::distance(n.position, mid) < 1e-12);
        }
        // inherited h_loc from the nearest pre-refinement node
        CHECK(n.h_loc > 0.0);
    }

    // each accepted midpoint splits its element exactly once per step
    std::size_t rim_elements = 0;
    for (const auto& el : c.elements)
        if (el.parent_edge == 5) ++rim_elements;
    std::size_t rim_new = 0;
    for (std::uint32_t id : new_ids)
        if (c.nodes[id].parents.front().edge_id == 5) ++rim_new;
    CHECK(rim_elements == rim_before + rim_new);
    CHECK(rim_new >= rim_before * 8 / 10);  // the spacing gate may veto a few
}

TEST_CASE("interior refinement candidates from voronoi corners") {
    const auto brep = square_domain(1.0);
    auto c = make_cloud(brep, 0.1);
    cloud::compute_h_loc(c);
    const auto grid = c.make_grid();
    std::vector<double> h_loc(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) h_loc[i] = c.nodes[i].h_loc;

    // single marked interior node in the lattice bulk
    std::uint32_t center = 0;
    for (const auto& n : c.nodes)
        if ((n.position - Vec2{0.5, 0.5}).norm() < 1e-9) center = n.id;
    REQUIRE(center != 0);
    adapt::MarkSet marks;
    marks.seeds = {center};
    marks.closure = {center};

    const auto cands = adapt::refine_interior(c, marks, grid, h_loc, 3.0, 24);
    CHECK(cands.size() == 4);
    for (const auto& p : cands) {
        CHECK(std::abs(std::abs(p.x - 0.5) - 0.05) < 1e-9);
        CHECK(std::abs(std::abs(p.y - 0.5) - 0.05) < 1e-9);
    }

    // two adjacent marked nodes share corners; shared corners appear once
    std::uint32_t right = 0;
    for (const auto& n : c.nodes)
        if ((n.position - Vec2{0.6, 0.5}).norm() < 1e-9) right = n.id;
    REQUIRE(right != 0);
    adapt::MarkSet marks2;
    marks2.seeds = {center, right};
    marks2.closure = {center, right};
    const auto cands2 = adapt::refine_interior(c, marks2, grid, h_loc, 3.0, 24);
    CHECK(cands2.size() == 6);  // 8 corners, 2 shared

    // oracle: distinct corners of cells built against the whole cloud
    std::vector<Vec2> oracle;
    const auto cells = ind::voronoi_cells(c, marks2.closure, grid, c.nodes.size() - 1, false);
    for (const auto& cell : cells)
        for (const auto& corner : cell.corners) {
            bool dup = false;
            for (const auto& q : oracle)
                if (geom::distance(q, corner) < 1e-7) dup = true;
            if (!dup && brep->classify_point(corner) == geom::PointClass::Inside)
                oracle.push_back(corner);
        }
    CHECK(cands2.size() == oracle.size());
}

TEST_CASE("pruning respects the minimum spacing rule") {
    const auto brep = square_domain(1.0);
    auto c = make_cloud(brep, 0.1);
    cloud::compute_h_loc(c);
    const auto grid = c.make_grid();
    std::vector<double> h_loc(c.nodes.size());
    for (std::size_t i = 0; i < c.nodes.size(); ++i) h_loc[i] = c.nodes[i].h_loc;

    // candidates at h_loc/4 and h_loc/2 from the node at (0.5, 0.5); h_loc = 0.1
    const Vec2 base{0.5, 0.5};
    const auto kept_quarter =
        adapt::prune_close(c, {base + Vec2{0.025, 0.0}}, grid, h_loc, 3.0);
    CHECK(kept_quarter.empty());  // 0.025 < h_min = 0.1/3

    const auto kept_half = adapt::prune_close(c, {base + Vec2{0.05, 0.0}}, grid, h_loc, 3.0);
    CHECK(kept_half.size() == 1);

    // random candidate swarm: the surviving cloud violates no h_min pair
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<Vec2> cands;
    for (int i = 0; i < 400; ++i) cands.push_back({u(rng), u(rng)});
    const auto kept = adapt::prune_close(c, cands, grid, h_loc, 3.0);

    std::vector<Vec2> all = c.positions();
    std::vector<double> hmin(all.size(), 0.1 / 3.0);
    for (const auto& p : kept) {
        all.push_back(p);
        hmin.push_back(h_loc[grid.nearest(p)] / 3.0);
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const double d = geom::distance(all[i], all[j]);
            CHECK(d >= std::min(hmin[i], hmin[j]) - 1e-12);
        }
    }
}

TEST_CASE("full adapt step: growth, hierarchy, determinism, bc inheritance") {
    const auto brep = plate_with_hole(2.5, 1.0);
    auto specs = free_specs(*brep);
    specs[0] = {cloud::BCSpec::Type::Dirichlet, {0.0, 0.0}, 1};
    specs[1] = {cloud::BCSpec::Type::Traction, {1.0, 0.0}, 2};

    auto base = make_cloud(brep, 0.25, cloud::Lattice::Triangular);
    cloud::assign_boundary_conditions(base, specs);
    const auto stencils = gfd::build_stencils(base, gfd::StencilConfig{});

    SUBCASE("uniform error with f=1 refines everywhere") {
        auto c = base;
        ind::ErrorField err;
        err.e.assign(c.nodes.size(), 1.0);
        adapt::AdaptConfig cfg;
        cfg.f = 1.0;
        const auto rep = adapt::adapt_step(c, stencils, err, cfg, specs);
        const double growth =
            static_cast<double>(rep.nodes_after) / static_cast<double>(rep.nodes_before);
        CHECK(growth > 1.5);
        CHECK(growth < 4.0);
    }

    SUBCASE("hierarchy: existing nodes survive with ids and positions") {
        auto c = base;
        ind::ErrorField err;
        err.e.assign(c.nodes.size(), 0.0);
        for (std::size_t i = 0; i < c.nodes.size(); ++i)
            err.e[i] = 1.0 / (1.0 + c.nodes[i].position.squared_norm());
        adapt::AdaptConfig cfg;
        const auto rep = adapt::adapt_step(c, stencils, err, cfg, specs);
        CHECK(rep.nodes_after > rep.nodes_before);
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            CHECK(c.nodes[i].id == base.nodes[i].id);
            CHECK(c.nodes[i].position == base.nodes[i].position);
        }
    }

    SUBCASE("determinism: identical inputs give identical refined clouds") {
        auto c1 = base;
        auto c2 = base;
        ind::ErrorField err;
        err.e.assign(base.nodes.size(), 0.0);
        for (std::size_t i = 0; i < base.nodes.size(); ++i)
            err.e[i] = std::sin(13.0 * static_cast<double>(i));
        adapt::AdaptConfig cfg;
        adapt::adapt_step(c1, stencils, err, cfg, specs);
        adapt::adapt_step(c2, stencils, err, cfg, specs);
        REQUIRE(c1.nodes.size() == c2.nodes.size());
        for (std::size_t i = 0; i < c1.nodes.size(); ++i)
            CHECK(c1.nodes[i].position == c2.nodes[i].position);
    }

    SUBCASE("new boundary nodes inherit the precedence-resolved bc") {
        auto c = base;
        ind::ErrorField err;
        err.e.assign(c.nodes.size(), 0.0);
        for (const auto& n : c.nodes)
            if (n.is_boundary()) err.e[n.id] = 1.0;
        adapt::AdaptConfig cfg;
        cfg.f = 0.3;
        const std::size_t before = c.nodes.size();
        adapt::adapt_step(c, stencils, err, cfg, specs);

        auto fresh = c;
        cloud::assign_boundary_conditions(fresh, specs);
        for (std::size_t i = before; i < c.nodes.size(); ++i) {
            for (int d = 0; d < 2; ++d) {
                CHECK(c.nodes[i].bc[d].kind == fresh.nodes[i].bc[d].kind);
                CHECK(c.nodes[i].bc[d].value == fresh.nodes[i].bc[d].value);
                CHECK(c.nodes[i].bc[d].edge_id == fresh.nodes[i].bc[d].edge_id);
            }
        }
    }
}

TEST_CASE("relaxation: band rule and spacing statistics") {
    const auto brep = square_domain(1.0);
    auto c = make_cloud(brep, 0.08, cloud::Lattice::Triangular);
    cloud::compute_h_loc(c);

    SUBCASE("no fine nodes, no movement") {
        auto copy = c;
        std::set<std::uint32_t> fine;
        const auto moved = adapt::relax_local(copy, fine, 5);
        CHECK(moved.empty());
        for (std::size_t i = 0; i < c.nodes.size(); ++i)
            CHECK(copy.nodes[i].position == c.nodes[i].position);
    }

    SUBCASE("fully fine patches are untouched") {
        auto copy = c;
        std::set<std::uint32_t> fine;  // everything fine: fraction 1.0 > 0.8
        for (const auto& n : c.nodes) fine.insert(n.id);
        const auto moved = adapt::relax_local(copy, fine, 5);
        CHECK(moved.empty());
    }

    SUBCASE("interface smoothing does not worsen local spacing ratios") {
        // perturb and mark a square patch as fine, then relax the interface
        auto copy = c;
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> jitter(-0.012, 0.012);
        std::set<std::uint32_t> fine;
        for (auto& n : copy.nodes) {
            if (n.is_boundary()) continue;
            if (n.position.x < 0.5) fine.insert(n.id);
            n.position.x += jitter(rng);
            n.position.y += jitter(rng);
        }
        auto spacing_ratio = [](const cloud::SmartCloud& cl) {
            const auto grid = cl.make_grid();
            double min_d = 1e9, sum = 0.0;
            std::size_t cnt = 0;
            for (const auto& n : cl.nodes) {
                if (n.is_boundary()) continue;
                const auto nn = grid.nearest_k(n.position, 1, n.id);
                if (nn.empty()) continue;
                const double d = geom::distance(n.position, cl.nodes[nn[0]].position);
                min_d = std::min(min_d, d);
                sum += d;
                ++cnt;
            }
            return min_d / (sum / static_cast<double>(cnt));
        };
        const double before = spacing_ratio(copy);
        const auto moved = adapt::relax_local(copy, fine, 5);
        CHECK(!moved.empty());
        const double after = spacing_ratio(copy);
        CHECK(after >= before - 1e-12);
        // moved nodes left the fine region
        for (std::uint32_t id : moved) CHECK(fine.count(id) == 0);
        // boundary nodes never move
        for (const auto& n : copy.nodes)
            if (n.is_boundary()) CHECK(n.position == c.nodes[n.id].position);
    }
}

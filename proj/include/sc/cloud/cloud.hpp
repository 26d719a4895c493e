#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sc/geom/brep.hpp"
#include "sc/geom/grid.hpp"

namespace sc::cloud {

struct InvalidTarget : std::runtime_error {
    explicit InvalidTarget(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateEdge : std::runtime_error {
    explicit DegenerateEdge(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownEntity : std::runtime_error {
    int id;
    explicit UnknownEntity(int id_)
        : std::runtime_error("boundary condition references unknown entity id " +
                             std::to_string(id_)),
          id(id_) {}
};

enum class Lattice { Square, Triangular };
enum class NodeKind { Interior, Boundary };

/// Per-dof boundary condition resolved onto a node.
struct DofBC {
    enum class Kind { None, Dirichlet, Traction };
    Kind kind = Kind::None;
    double value = 0.0;
    int edge_id = -1;  // edge whose spec (and normal) backs this dof
};

struct SmartNode {
    struct Parent {
        int edge_id = -1;
        double param = 0.0;
    };

    std::uint32_t id = 0;
    geom::Vec2 position;
    NodeKind kind = NodeKind::Interior;
    geom::Vec2 normal;                   // boundary nodes only (primary parent)
    std::vector<Parent> parents;         // boundary nodes; primary first
    std::array<DofBC, 2> bc{};
    double h_loc = 0.0;
    bool fine = false;                   // refinement bookkeeping
    bool pde_override = false;           // boundary node collocated as interior
    std::vector<std::uint32_t> incident_elements;

    bool is_boundary() const { return kind == NodeKind::Boundary; }
};

struct BoundaryElement {
    std::uint32_t id = 0;
    std::array<std::uint32_t, 2> nodes{};  // traversal order
    int parent_edge = -1;
    geom::Vec2 normal;  // chord-based outward normal
};

/// Boundary condition attached to one CAD edge.
struct BCSpec {
    enum class Type { Dirichlet, Traction, Free };
    Type type = Type::Free;
    std::array<std::optional<double>, 2> value{};  // per dof; nullopt = free/zero
    int entity = -1;
};

struct SmartCloud {
    std::vector<SmartNode> nodes;
    std::vector<BoundaryElement> elements;
    double h = 0.0;
    double t = 0.3;
    Lattice lattice = Lattice::Triangular;
    std::shared_ptr<const geom::BRepModel2D> brep;

    std::size_t boundary_count() const;
    std::vector<geom::Vec2> positions() const;
    geom::PointGrid make_grid(double cell = 0.0) const;
};

/// Characteristic length from an explicit value or a target node count.
double choose_h(const geom::BRepModel2D& m, std::optional<double> explicit_h,
                std::optional<std::size_t> target_n, Lattice lattice);

struct BoundaryDiscretization {
    std::vector<SmartNode> nodes;
    std::vector<BoundaryElement> elements;
};

/// Samples every edge at (near-)equal arclength close to h, removes duplicated
/// corner nodes, attaches exact normals/parents and chains boundary elements.
BoundaryDiscretization discretize_boundary(const geom::BRepModel2D& m, double h);

std::vector<geom::Vec2> generate_lattice(const geom::AABB& bbox, double h, Lattice kind);

/// Inside nodes farther than t*h from every boundary node (classify_batch based).
std::vector<geom::Vec2> filter_interior(const std::vector<geom::Vec2>& pts,
                                        const std::vector<SmartNode>& boundary_nodes,
                                        const geom::BRepModel2D& m, double t, double h,
                                        geom::BRepModel2D::BatchStats* stats = nullptr);

void assign_boundary_conditions(SmartCloud& cloud, const std::vector<BCSpec>& specs);

/// h_loc(i) = min_j distance(i, j); subsequent nodes inherit from their nearest
/// node of the discretization this was computed on.
void compute_h_loc(SmartCloud& cloud);

struct CloudParams {
    std::optional<double> h;
    std::optional<std::size_t> target_n;
    Lattice lattice = Lattice::Triangular;
    double t = 0.3;
};

SmartCloud build_cloud(std::shared_ptr<const geom::BRepModel2D> brep, const CloudParams& params);

/// Boundary-element chords indexed for visibility queries: a segment is
/// blocked when it crosses an element chord transversally above the threshold
/// angle. Shared endpoints (stencil center on the boundary) do not block.
class ElementChords {
public:
    explicit ElementChords(const SmartCloud& cloud);

    bool blocks(const geom::Vec2& a, const geom::Vec2& b, double threshold_deg = 5.0) const;
    /// Distance to the nearest element chord (used to skip far-field tests).
    double distance(const geom::Vec2& p) const;
    bool empty() const { return grid_.size() == 0; }

private:
    geom::SegmentGrid grid_;
    double cell_ = 1.0;
};

}  // namespace sc::cloud

#include <cstdio>
#include <fstream>

#include "sc/io/io.hpp"

namespace sc::io {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_polydata_header(std::ofstream& os, const cloud::SmartCloud& cloud,
                           const std::string& title) {
    os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET POLYDATA\n";
    os << "POINTS " << cloud.nodes.size() << " double\n";
    for (const auto& n : cloud.nodes)
        os << g17(n.position.x) << ' ' << g17(n.position.y) << " 0\n";
    os << "VERTICES " << cloud.nodes.size() << ' ' << 2 * cloud.nodes.size() << '\n';
    for (std::size_t i = 0; i < cloud.nodes.size(); ++i) os << "1 " << i << '\n';
    if (!cloud.elements.empty()) {
        os << "LINES " << cloud.elements.size() << ' ' << 3 * cloud.elements.size() << '\n';
        for (const auto& el : cloud.elements) os << "2 " << el.nodes[0] << ' ' << el.nodes[1] << '\n';
    }
}

int bc_code(const cloud::DofBC& bc) {
    switch (bc.kind) {
        case cloud::DofBC::Kind::Dirichlet:
            return 1;
        case cloud::DofBC::Kind::Traction:
            return 2;
        default:
            return 0;
    }
}

void write_cloud_point_data(std::ofstream& os, const cloud::SmartCloud& cloud) {
    os << "POINT_DATA " << cloud.nodes.size() << '\n';
    os << "SCALARS kind int 1\nLOOKUP_TABLE default\n";
    for (const auto& n : cloud.nodes) os << (n.is_boundary() ? 1 : 0) << '\n';
    os << "SCALARS bc_x int 1\nLOOKUP_TABLE default\n";
    for (const auto& n : cloud.nodes) os << bc_code(n.bc[0]) << '\n';
    os << "SCALARS bc_y int 1\nLOOKUP_TABLE default\n";
    for (const auto& n : cloud.nodes) os << bc_code(n.bc[1]) << '\n';
    os << "SCALARS h_loc double 1\nLOOKUP_TABLE default\n";
    for (const auto& n : cloud.nodes) os << g17(n.h_loc) << '\n';
    os << "NORMALS normal double\n";
    for (const auto& n : cloud.nodes)
        os << g17(n.normal.x) << ' ' << g17(n.normal.y) << " 0\n";
}

}  // namespace

std::string format_g17(double v) { return g17(v); }

void write_cloud_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    write_polydata_header(os, cloud, "smart cloud");
    write_cloud_point_data(os, cloud);
}

void write_solution_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud,
                        const gfd::SolutionField& sol) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    write_polydata_header(os, cloud, "solution");
    os << "POINT_DATA " << cloud.nodes.size() << '\n';
    os << "VECTORS displacement double\n";
    for (const auto& u : sol.u) os << g17(u.x) << ' ' << g17(u.y) << " 0\n";
    os << "SCALARS von_mises double 1\nLOOKUP_TABLE default\n";
    for (double v : sol.von_mises) os << g17(v) << '\n';
    os << "SCALARS s11 double 1\nLOOKUP_TABLE default\n";
    for (const auto& s : sol.stress) os << g17(s[0]) << '\n';
    os << "SCALARS s22 double 1\nLOOKUP_TABLE default\n";
    for (const auto& s : sol.stress) os << g17(s[1]) << '\n';
    os << "SCALARS s12 double 1\nLOOKUP_TABLE default\n";
    for (const auto& s : sol.stress) os << g17(s[2]) << '\n';
}

void write_error_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud,
                     const ind::ErrorField& err) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    write_polydata_header(os, cloud, "error indicator");
    os << "POINT_DATA " << cloud.nodes.size() << '\n';
    os << "SCALARS error double 1\nLOOKUP_TABLE default\n";
    for (double v : err.e) os << g17(v) << '\n';
}

}  // namespace sc::io

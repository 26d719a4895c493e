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

}  // namespace

void write_cloud_csv(const std::filesystem::path& path, const cloud::SmartCloud& cloud) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "id,x,y,kind,parent_edge,param,nx,ny\n";
    for (const auto& n : cloud.nodes) {
        const bool b = n.is_boundary();
        os << n.id << ',' << g17(n.position.x) << ',' << g17(n.position.y) << ','
           << (b ? "boundary" : "interior") << ',';
        if (b && !n.parents.empty())
            os << n.parents.front().edge_id << ',' << g17(n.parents.front().param) << ','
               << g17(n.normal.x) << ',' << g17(n.normal.y);
        else
            os << "-1,0,0,0";
        os << '\n';
    }
}

void write_error_csv(const std::filesystem::path& path, const ind::ErrorField& err) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << "id,e\n";
    for (std::size_t i = 0; i < err.e.size(); ++i) os << i << ',' << g17(err.e[i]) << '\n';
}

void write_study_csv(const std::filesystem::path& path, const bench::StudyTable& table) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << bench::StudyTable::header << '\n';
    for (const auto& r : table.rows) {
        os << r.config << ',' << r.n_nodes << ',' << g17(r.l2r_vm_exact) << ','
           << g17(r.l2r_vm_zz) << ',' << g17(r.l2w_residual) << ',' << g17(r.kappa_max) << ','
           << g17(r.t_assemble_s) << ',' << g17(r.t_solve_s) << ',' << g17(r.t_indicator_s)
           << '\n';
    }
}

}  // namespace sc::io

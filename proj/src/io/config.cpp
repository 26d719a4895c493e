#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "sc/io/io.hpp"

namespace sc::io {

using nlohmann::json;

ProblemConfig read_problem_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open boundary-condition config " + path.string());
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
    }

    ProblemConfig cfg;
    try {
        const auto& mat = doc.at("material");
        cfg.material.E = mat.at("E").get<double>();
        cfg.material.nu = mat.at("nu").get<double>();
        const std::string plane = mat.at("plane").get<std::string>();
        if (plane == "stress")
            cfg.material.plane = gfd::Plane::Stress;
        else if (plane == "strain")
            cfg.material.plane = gfd::Plane::Strain;
        else
            throw ConfigError("material.plane must be 'stress' or 'strain'");
        if (cfg.material.E <= 0.0 || cfg.material.nu < 0.0 || cfg.material.nu >= 0.5)
            throw ConfigError("material constants out of range (E > 0, 0 <= nu < 0.5)");

        if (doc.contains("body_force")) {
            const auto& bf = doc.at("body_force");
            cfg.material.body_force = {bf.at(0).get<double>(), bf.at(1).get<double>()};
        }

        for (const auto& b : doc.at("bcs")) {
            cloud::BCSpec spec;
            spec.entity = b.at("entity").get<int>();
            const std::string type = b.at("type").get<std::string>();
            if (type == "dirichlet")
                spec.type = cloud::BCSpec::Type::Dirichlet;
            else if (type == "traction")
                spec.type = cloud::BCSpec::Type::Traction;
            else if (type == "free")
                spec.type = cloud::BCSpec::Type::Free;
            else
                throw ConfigError("bc type must be dirichlet, traction or free");
            if (b.contains("value")) {
                const auto& v = b.at("value");
                for (std::size_t d = 0; d < 2; ++d)
                    if (!v.at(d).is_null()) spec.value[d] = v.at(d).get<double>();
            }
            cfg.bcs.push_back(spec);
        }
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    return cfg;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) {
    f_ = std::fopen(path.string().c_str(), "w");
    if (!f_) throw ConfigError("cannot write " + path.string());
}

JsonlWriter::~JsonlWriter() {
    if (f_) std::fclose(f_);
}

void JsonlWriter::write_iteration(const bench::IterationRecord& rec) {
    json j{{"iteration", rec.iteration},
           {"n_nodes", rec.n_nodes},
           {"n_boundary", rec.n_boundary},
           {"l2r_vm_exact", rec.l2r_vm_exact},
           {"l2r_vm_zz", rec.l2r_vm_zz},
           {"l2w_indicator", rec.l2w_indicator},
           {"kappa_max", rec.kappa_max},
           {"residual", rec.residual},
           {"t_solve_s", rec.t_solve_s},
           {"t_indicator_s", rec.t_indicator_s},
           {"t_refine_s", rec.t_refine_s}};
    write_raw(j.dump());
}

void JsonlWriter::write_raw(const std::string& json_line) {
    std::fputs(json_line.c_str(), f_);
    std::fputc('\n', f_);
    std::fflush(f_);
}

}  // namespace sc::io

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "sc/bench/study.hpp"

namespace sc::io {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Legacy ASCII VTK POLYDATA of the cloud with point fields kind, bc codes,
/// h_loc (and the boundary elements as lines). Header carries no timestamp so
/// identical inputs produce identical bytes.
void write_cloud_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud);

/// Same polydata with solution fields (u, stress, von Mises) attached.
void write_solution_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud,
                        const gfd::SolutionField& sol);

/// Adds a named scalar field; pass error indicator values.
void write_error_vtk(const std::filesystem::path& path, const cloud::SmartCloud& cloud,
                     const ind::ErrorField& err);

/// CSV schema: id,x,y,kind,parent_edge,param,nx,ny (17 significant digits).
void write_cloud_csv(const std::filesystem::path& path, const cloud::SmartCloud& cloud);

/// CSV schema: id,e
void write_error_csv(const std::filesystem::path& path, const ind::ErrorField& err);

void write_study_csv(const std::filesystem::path& path, const bench::StudyTable& table);

/// Parsed {"material": ..., "bcs": [...], "body_force": [...]} document.
struct ProblemConfig {
    gfd::MaterialModel material;
    std::vector<cloud::BCSpec> bcs;
};

ProblemConfig read_problem_config(const std::filesystem::path& path);

/// Machine-readable stats channel: one JSON object per line.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path);
    ~JsonlWriter();
    JsonlWriter(const JsonlWriter&) = delete;
    JsonlWriter& operator=(const JsonlWriter&) = delete;

    void write_iteration(const bench::IterationRecord& rec);
    void write_raw(const std::string& json_line);

private:
    std::FILE* f_ = nullptr;
};

std::string format_g17(double v);

}  // namespace sc::io

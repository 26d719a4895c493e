#pragma once

#include "sc/geom/brep.hpp"
#include "sc/step/parse.hpp"

namespace sc::step {

struct UnsupportedEntity : std::runtime_error {
    std::string keyword;
    int id = 0;
    UnsupportedEntity(std::string keyword_, int id_, const std::string& detail = "")
        : std::runtime_error("unsupported entity " + keyword_ + " (#" + std::to_string(id_) + ")" +
                             (detail.empty() ? "" : ": " + detail)),
          keyword(std::move(keyword_)),
          id(id_) {}
};

struct NonPlanarGeometry : std::runtime_error {
    explicit NonPlanarGeometry(const std::string& what) : std::runtime_error(what) {}
};

/// Lower a parsed STEP model to a planar B-rep. The model must contain exactly
/// one planar ADVANCED_FACE built from the supported curve entities.
geom::BRepModel2D lower_to_brep(const StepModel& model, double tol_rel = 1e-9);

}  // namespace sc::step

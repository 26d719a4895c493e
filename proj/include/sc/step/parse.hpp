#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sc::step {

struct SyntaxError : std::runtime_error {
    int line = 0;
    int col = 0;
    SyntaxError(int line_, int col_, const std::string& what)
        : std::runtime_error("syntax error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + what),
          line(line_),
          col(col_) {}
};

struct DuplicateId : std::runtime_error {
    int id = 0;
    explicit DuplicateId(int id_)
        : std::runtime_error("duplicate entity id #" + std::to_string(id_)), id(id_) {}
};

struct UnresolvedReference : std::runtime_error {
    int id = 0;
    explicit UnresolvedReference(int id_)
        : std::runtime_error("unresolved entity reference #" + std::to_string(id_)), id(id_) {}
};

struct Value;
using ValueList = std::vector<Value>;

struct EnumValue {
    std::string name;  // without the dots
    bool operator==(const EnumValue& o) const { return name == o.name; }
};
struct EntityRef {
    int id = 0;
    bool operator==(const EntityRef& o) const { return id == o.id; }
};
struct Unset {
    bool operator==(const Unset&) const { return true; }
};
struct Derived {
    bool operator==(const Derived&) const { return true; }
};
struct TypedValue;

using ValueVariant =
    std::variant<double, std::string, EnumValue, EntityRef, Unset, Derived, ValueList,
                 std::shared_ptr<TypedValue>>;

struct Value : ValueVariant {
    using ValueVariant::ValueVariant;
    const ValueVariant& base() const { return *this; }
};

/// A parameter wrapped in a type name, e.g. LENGTH_MEASURE(12.).
struct TypedValue {
    std::string keyword;
    ValueList args;
};

bool value_equal(const Value& a, const Value& b);

struct StepEntity {
    int id = 0;
    std::string keyword;
    ValueList args;
};

/// One record of the HEADER section (FILE_DESCRIPTION, FILE_NAME, FILE_SCHEMA).
struct HeaderRecord {
    std::string keyword;
    ValueList args;
};

struct StepModel {
    std::vector<HeaderRecord> header;
    std::map<int, StepEntity> entities;  // ordered by id

    const StepEntity& at(int id) const;
    bool has(int id) const { return entities.count(id) > 0; }
};

/// Parse an ISO 10303-21 clear-text file. Comments are stripped, string
/// escapes kept verbatim, every entity reference checked to resolve.
StepModel parse_step(std::string_view bytes);

/// Re-serialize a model; parse_step(serialize(m)) produces an identical graph.
std::string serialize(const StepModel& model);

bool models_equal(const StepModel& a, const StepModel& b);

}  // namespace sc::step

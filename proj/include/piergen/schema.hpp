#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "piergen/expr.hpp"

namespace piergen {

enum class ParameterKind { Recognition, Counting, Composite };
enum class Unit { Millimeter, Count };
enum class ViewId { Front, Top, Side };

inline constexpr ViewId kAllViews[] = {ViewId::Front, ViewId::Top, ViewId::Side};

std::string_view to_string(ParameterKind kind);
std::string_view to_string(Unit unit);
std::string_view to_string(ViewId view);
ParameterKind parse_parameter_kind(std::string_view text);
Unit parse_unit(std::string_view text);
ViewId parse_view_id(std::string_view text);

struct IntRange {
    std::int64_t min = 0;
    std::int64_t max = 0;
    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct ParameterDef {
    std::string name;
    ParameterKind kind = ParameterKind::Recognition;
    Unit unit = Unit::Millimeter;
    std::optional<IntRange> sample_range;  // absent for composites
    std::int64_t grid_step = 1;

    /// Number of grid points in the sampling range (0 for composites).
    std::int64_t grid_size() const;
};

/// Ordered parameter definitions. Order is serialization order.
class ParameterSchema {
public:
    ParameterSchema() = default;
    ParameterSchema(std::string version, std::vector<ParameterDef> defs);

    const std::string& version() const noexcept { return version_; }
    const std::vector<ParameterDef>& defs() const noexcept { return defs_; }
    std::size_t size() const noexcept { return defs_.size(); }

    const ParameterDef* find(std::string_view name) const;
    const ParameterDef& at(std::string_view name) const;
    std::vector<std::string> names() const;
    std::vector<std::string> names_of_kind(ParameterKind kind) const;
    std::size_t count(ParameterKind kind) const;

private:
    std::string version_;
    std::vector<ParameterDef> defs_;
    std::unordered_map<std::string, std::size_t> index_;
};

using ValueMap = std::map<std::string, std::int64_t, std::less<>>;

/// One sampled design: a value per parameter name plus the schema version tag.
class ParameterVector {
public:
    ParameterVector() = default;
    explicit ParameterVector(std::string schema_version) : schema_version_(std::move(schema_version)) {}
    ParameterVector(std::string schema_version, ValueMap values)
        : schema_version_(std::move(schema_version)), values_(std::move(values)) {}

    const std::string& schema_version() const noexcept { return schema_version_; }
    const ValueMap& values() const noexcept { return values_; }

    bool contains(std::string_view name) const;
    std::optional<std::int64_t> get(std::string_view name) const;
    /// Throws UnknownParameter when absent.
    std::int64_t at(std::string_view name) const;
    void set(const std::string& name, std::int64_t value) { values_[name] = value; }
    void erase(std::string_view name);
    std::size_t size() const noexcept { return values_.size(); }

    /// Copy keeping only the given names (missing names are skipped).
    ParameterVector restricted_to(const std::vector<std::string>& names) const;

    friend bool operator==(const ParameterVector&, const ParameterVector&) = default;

private:
    std::string schema_version_;
    ValueMap values_;
};

/// Composite formulas in dependency (topological) order.
class FormulaTable {
public:
    FormulaTable() = default;
    /// Validates coverage of every composite, known references and acyclicity.
    FormulaTable(const ParameterSchema& schema, const std::vector<std::pair<std::string, Expr>>& formulas);

    /// Formulas ordered so that every formula only depends on earlier entries.
    const std::vector<std::pair<std::string, Expr>>& ordered() const noexcept { return ordered_; }
    const Expr& formula(std::string_view name) const;
    /// Non-composite names every evaluation needs.
    const std::vector<std::string>& inputs() const noexcept { return inputs_; }
    const std::string& schema_version() const noexcept { return schema_version_; }

private:
    std::vector<std::pair<std::string, Expr>> ordered_;
    std::vector<std::string> inputs_;
    std::string schema_version_;
};

enum class Relation { Less, LessEqual, Equal };
std::string_view to_string(Relation rel);
Relation parse_relation(std::string_view text);

struct Constraint {
    std::string id;
    std::optional<ViewId> view;  // nullopt: inter-view constraint
    Expr lhs;
    Relation relation = Relation::Less;
    Expr rhs;

    bool holds(std::int64_t l, std::int64_t r) const;
};

struct ConstraintSet {
    std::vector<Constraint> constraints;
};

struct Violation {
    std::string constraint_id;
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Parameter space, formulas and constraints as one unit.
struct DesignSpace {
    ParameterSchema schema;
    FormulaTable formulas;
    ConstraintSet constraints;
};

/// The built-in prefabricated pier design space.
DesignSpace default_schema();

/// Completes `partial` with every composite computed in dependency order.
///
/// Existing composite entries are overwritten, so re-evaluating a full vector
/// is idempotent.
ParameterVector eval_composites(const ParameterVector& partial, const FormulaTable& formulas);

/// Lists violated constraints in constraint order; empty iff all hold.
std::vector<Violation> check_constraints(const ParameterVector& v, const ConstraintSet& constraints);

/// True when every composite entry equals its formula evaluation.
bool is_self_consistent(const ParameterVector& v, const FormulaTable& formulas);

}  // namespace piergen

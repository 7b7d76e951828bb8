#include "piergen/schema.hpp"

#include <algorithm>
#include <set>

#include "piergen/errors.hpp"

namespace piergen {

std::string_view to_string(ParameterKind kind) {
    switch (kind) {
        case ParameterKind::Recognition: return "recognition";
        case ParameterKind::Counting: return "counting";
        case ParameterKind::Composite: return "composite";
    }
    return "?";
}

std::string_view to_string(Unit unit) { return unit == Unit::Millimeter ? "mm" : "count"; }

std::string_view to_string(ViewId view) {
    switch (view) {
        case ViewId::Front: return "front";
        case ViewId::Top: return "top";
        case ViewId::Side: return "side";
    }
    return "?";
}

ParameterKind parse_parameter_kind(std::string_view text) {
    if (text == "recognition") return ParameterKind::Recognition;
    if (text == "counting") return ParameterKind::Counting;
    if (text == "composite") return ParameterKind::Composite;
    throw SchemaError("unknown parameter kind '" + std::string(text) + "'");
}

Unit parse_unit(std::string_view text) {
    if (text == "mm") return Unit::Millimeter;
    if (text == "count") return Unit::Count;
    throw SchemaError("unknown unit '" + std::string(text) + "'");
}

ViewId parse_view_id(std::string_view text) {
    if (text == "front") return ViewId::Front;
    if (text == "top") return ViewId::Top;
    if (text == "side") return ViewId::Side;
    throw Error("unknown view '" + std::string(text) + "'");
}

std::string_view to_string(Relation rel) {
    switch (rel) {
        case Relation::Less: return "<";
        case Relation::LessEqual: return "<=";
        case Relation::Equal: return "=";
    }
    return "?";
}

Relation parse_relation(std::string_view text) {
    if (text == "<") return Relation::Less;
    if (text == "<=") return Relation::LessEqual;
    if (text == "=" || text == "==") return Relation::Equal;
    throw SchemaError("unknown relation '" + std::string(text) + "'");
}

std::int64_t ParameterDef::grid_size() const {
    if (!sample_range) return 0;
    return (sample_range->max - sample_range->min) / grid_step + 1;
}

ParameterSchema::ParameterSchema(std::string version, std::vector<ParameterDef> defs)
    : version_(std::move(version)), defs_(std::move(defs)) {
    for (std::size_t i = 0; i < defs_.size(); ++i) {
        const ParameterDef& d = defs_[i];
        if (d.name.empty()) throw SchemaError("parameter with empty name");
        if (!index_.emplace(d.name, i).second) throw SchemaError("duplicate parameter '" + d.name + "'");
        if (d.grid_step <= 0) throw SchemaError("grid step of '" + d.name + "' must be positive");
        if (d.kind == ParameterKind::Composite) {
            if (d.sample_range) throw SchemaError("composite '" + d.name + "' must not have a sample range");
        } else {
            if (!d.sample_range) throw SchemaError("'" + d.name + "' needs a sample range");
            if (d.sample_range->min <= 0 || d.sample_range->min > d.sample_range->max) {
                throw SchemaError("invalid sample range for '" + d.name + "'");
            }
        }
    }
}

const ParameterDef* ParameterSchema::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &defs_[it->second];
}

const ParameterDef& ParameterSchema::at(std::string_view name) const {
    const ParameterDef* d = find(name);
    if (!d) throw UnknownParameter(std::string(name));
    return *d;
}

std::vector<std::string> ParameterSchema::names() const {
    std::vector<std::string> out;
    out.reserve(defs_.size());
    for (const auto& d : defs_) out.push_back(d.name);
    return out;
}

std::vector<std::string> ParameterSchema::names_of_kind(ParameterKind kind) const {
    std::vector<std::string> out;
    for (const auto& d : defs_) {
        if (d.kind == kind) out.push_back(d.name);
    }
    return out;
}

std::size_t ParameterSchema::count(ParameterKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(defs_.begin(), defs_.end(), [kind](const ParameterDef& d) { return d.kind == kind; }));
}

bool ParameterVector::contains(std::string_view name) const { return values_.find(name) != values_.end(); }

std::optional<std::int64_t> ParameterVector::get(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::int64_t ParameterVector::at(std::string_view name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw UnknownParameter(std::string(name));
    return it->second;
}

void ParameterVector::erase(std::string_view name) {
    auto it = values_.find(name);
    if (it != values_.end()) values_.erase(it);
}

ParameterVector ParameterVector::restricted_to(const std::vector<std::string>& names) const {
    ParameterVector out(schema_version_);
    for (const auto& n : names) {
        if (auto v = get(n)) out.set(n, *v);
    }
    return out;
}

FormulaTable::FormulaTable(const ParameterSchema& schema,
                           const std::vector<std::pair<std::string, Expr>>& formulas)
    : schema_version_(schema.version()) {
    std::map<std::string, const Expr*> by_name;
    for (const auto& [name, expr] : formulas) {
        const ParameterDef* d = schema.find(name);
        if (!d) throw SchemaError("formula for unknown parameter '" + name + "'");
        if (d->kind != ParameterKind::Composite) {
            throw SchemaError("formula given for non-composite '" + name + "'");
        }
        if (!by_name.emplace(name, &expr).second) throw SchemaError("two formulas for '" + name + "'");
        for (const auto& ref : expr.variables()) {
            if (!schema.find(ref)) throw SchemaError("formula '" + name + "' references unknown '" + ref + "'");
        }
    }
    for (const auto& d : schema.defs()) {
        if (d.kind == ParameterKind::Composite && !by_name.count(d.name)) {
            throw SchemaError("composite '" + d.name + "' has no formula");
        }
        if (d.kind != ParameterKind::Composite) inputs_.push_back(d.name);
    }

    // Depth-first topological sort in schema order; grey marks detect cycles.
    enum class Mark { None, Grey, Black };
    std::map<std::string, Mark> marks;
    std::vector<std::string> order;
    auto visit = [&](auto&& self, const std::string& name) -> void {
        auto it = by_name.find(name);
        if (it == by_name.end()) return;  // non-composite leaf
        Mark& m = marks[name];
        if (m == Mark::Black) return;
        if (m == Mark::Grey) throw SchemaError("cyclic formula dependency through '" + name + "'");
        m = Mark::Grey;
        for (const auto& dep : it->second->variables()) self(self, dep);
        marks[name] = Mark::Black;
        order.push_back(name);
    };
    for (const auto& d : schema.defs()) {
        if (d.kind == ParameterKind::Composite) visit(visit, d.name);
    }
    for (const auto& name : order) ordered_.emplace_back(name, *by_name.at(name));
}

const Expr& FormulaTable::formula(std::string_view name) const {
    for (const auto& [n, e] : ordered_) {
        if (n == name) return e;
    }
    throw UnknownParameter(std::string(name));
}

bool Constraint::holds(std::int64_t l, std::int64_t r) const {
    switch (relation) {
        case Relation::Less: return l < r;
        case Relation::LessEqual: return l <= r;
        case Relation::Equal: return l == r;
    }
    return false;
}

ParameterVector eval_composites(const ParameterVector& partial, const FormulaTable& formulas) {
    for (const auto& name : formulas.inputs()) {
        if (!partial.contains(name)) throw MissingInput(name);
    }
    ParameterVector out = partial;
    for (const auto& [name, expr] : formulas.ordered()) out.erase(name);
    auto lookup = [&out](const std::string& n) { return out.get(n); };
    for (const auto& [name, expr] : formulas.ordered()) {
        Expr::Outcome r = expr.evaluate(lookup);
        switch (r.status) {
            case Expr::Outcome::Status::Missing: throw MissingInput(r.missing);
            case Expr::Outcome::Status::NonIntegral: throw NonIntegerResult(name);
            case Expr::Outcome::Status::Ok: break;
        }
        if (r.value <= 0) throw NonPositiveResult(name);
        out.set(name, r.value);
    }
    return out;
}

std::vector<Violation> check_constraints(const ParameterVector& v, const ConstraintSet& constraints) {
    std::vector<Violation> out;
    auto lookup = [&v](const std::string& n) { return v.get(n); };
    for (const auto& c : constraints.constraints) {
        Expr::Outcome l = c.lhs.evaluate(lookup);
        Expr::Outcome r = c.rhs.evaluate(lookup);
        if (l.status == Expr::Outcome::Status::Missing) throw UnknownParameter(l.missing);
        if (r.status == Expr::Outcome::Status::Missing) throw UnknownParameter(r.missing);
        if (l.status != Expr::Outcome::Status::Ok || r.status != Expr::Outcome::Status::Ok ||
            !c.holds(l.value, r.value)) {
            out.push_back({c.id, l.value, r.value});
        }
    }
    return out;
}

bool is_self_consistent(const ParameterVector& v, const FormulaTable& formulas) {
    try {
        return eval_composites(v, formulas) == v;
    } catch (const Error&) {
        return false;
    }
}

namespace {

ParameterDef dim(std::string name, std::int64_t lo, std::int64_t hi) {
    return {std::move(name), ParameterKind::Recognition, Unit::Millimeter, IntRange{lo, hi}, 100};
}

ParameterDef count(std::string name, std::int64_t lo, std::int64_t hi) {
    return {std::move(name), ParameterKind::Counting, Unit::Count, IntRange{lo, hi}, 1};
}

ParameterDef composite(std::string name) {
    return {std::move(name), ParameterKind::Composite, Unit::Millimeter, std::nullopt, 100};
}

Constraint constraint(std::string id, std::optional<ViewId> view, std::string_view lhs, Relation rel,
                      std::string_view rhs) {
    return {std::move(id), view, Expr::parse(lhs), rel, Expr::parse(rhs)};
}

}  // namespace

DesignSpace default_schema() {
    ParameterSchema schema("pier-v1",
                           {
                               dim("cap_beam_cross_dim", 6000, 20000),
                               dim("cap_beam_height", 1200, 2400),
                               dim("pier_column_cross_dim", 600, 1600),
                               dim("pier_column_height", 4000, 12000),
                               dim("pile_spacing", 1200, 4000),
                               dim("pile_cap_height", 1500, 3000),
                               count("num_pier_columns", 2, 5),
                               count("num_piles", 2, 6),
                               count("num_bearings", 2, 6),
                               composite("cross_bridge_pier_spacing"),
                               composite("total_structure_height"),
                               composite("column_envelope_width"),
                               composite("pile_row_extent"),
                               composite("cap_beam_overhang"),
                               composite("bearing_pitch"),
                           });

    FormulaTable formulas(
        schema,
        {
            {"cross_bridge_pier_spacing", Expr::parse("pier_column_cross_dim + pile_spacing")},
            {"total_structure_height", Expr::parse("pile_cap_height + pier_column_height + cap_beam_height")},
            {"column_envelope_width",
             Expr::parse("(num_pier_columns - 1) * cross_bridge_pier_spacing + pier_column_cross_dim")},
            {"pile_row_extent", Expr::parse("(num_piles - 1) * pile_spacing")},
            {"cap_beam_overhang", Expr::parse("(cap_beam_cross_dim - column_envelope_width) / 2")},
            {"bearing_pitch", Expr::parse("cap_beam_cross_dim / (num_bearings + 1)")},
        });

    ConstraintSet constraints;
    auto& cs = constraints.constraints;
    cs.push_back(constraint("spacing_lt_capbeam", ViewId::Front, "cross_bridge_pier_spacing", Relation::Less,
                            "cap_beam_cross_dim"));
    cs.push_back(constraint("envelope_lt_capbeam", ViewId::Front, "column_envelope_width", Relation::Less,
                            "cap_beam_cross_dim"));
    cs.push_back(constraint("column_lt_spacing", ViewId::Front, "pier_column_cross_dim", Relation::Less,
                            "pile_spacing"));
    cs.push_back(
        constraint("pile_row_lt_capbeam", ViewId::Top, "pile_row_extent", Relation::Less, "cap_beam_cross_dim"));
    cs.push_back(constraint("height_stack_matches", std::nullopt, "total_structure_height", Relation::Equal,
                            "pile_cap_height + pier_column_height + cap_beam_height"));
    for (const auto& d : schema.defs()) {
        if (d.unit != Unit::Millimeter) continue;
        ViewId view = d.name == "pile_row_extent" ? ViewId::Top : ViewId::Front;
        cs.push_back(constraint("positive_" + d.name, view, "0", Relation::Less, d.name));
    }
    cs.push_back(constraint("num_pier_columns_min", ViewId::Front, "2", Relation::LessEqual, "num_pier_columns"));
    cs.push_back(constraint("num_pier_columns_max", ViewId::Front, "num_pier_columns", Relation::LessEqual, "5"));
    cs.push_back(constraint("num_piles_min", ViewId::Top, "2", Relation::LessEqual, "num_piles"));
    cs.push_back(constraint("num_piles_max", ViewId::Top, "num_piles", Relation::LessEqual, "6"));
    cs.push_back(constraint("num_bearings_min", ViewId::Front, "2", Relation::LessEqual, "num_bearings"));
    cs.push_back(constraint("num_bearings_max", ViewId::Front, "num_bearings", Relation::LessEqual, "6"));

    return {std::move(schema), std::move(formulas), std::move(constraints)};
}

}  // namespace piergen

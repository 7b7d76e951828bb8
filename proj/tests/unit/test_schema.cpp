#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "piergen/errors.hpp"
#include "piergen/expr.hpp"
#include "piergen/io.hpp"

using namespace piergen;

namespace {

ParameterVector with(ParameterVector v, const std::string& name, std::int64_t value) {
    v.set(name, value);
    return v;
}

bool has_violation(const std::vector<Violation>& vs, const std::string& id) {
    return std::any_of(vs.begin(), vs.end(), [&](const Violation& x) { return x.constraint_id == id; });
}

}  // namespace

TEST_CASE("default schema has the 6/3/6 taxonomy") {
    const auto& s = fixture::space().schema;
    CHECK(s.size() == 15);
    CHECK(s.count(ParameterKind::Recognition) == 6);
    CHECK(s.count(ParameterKind::Counting) == 3);
    CHECK(s.count(ParameterKind::Composite) == 6);
    const std::vector<std::string> recognition = {"cap_beam_cross_dim",    "cap_beam_height",
                                                  "pier_column_cross_dim", "pier_column_height",
                                                  "pile_spacing",          "pile_cap_height"};
    CHECK(s.names_of_kind(ParameterKind::Recognition) == recognition);
    const std::vector<std::string> counting = {"num_pier_columns", "num_piles", "num_bearings"};
    CHECK(s.names_of_kind(ParameterKind::Counting) == counting);
    for (const auto& d : s.defs()) {
        CHECK(d.sample_range.has_value() == (d.kind != ParameterKind::Composite));
    }
}

TEST_CASE("default formulas and constraints contain the stated relations") {
    const auto& space = fixture::space();
    CHECK(space.formulas.formula("cross_bridge_pier_spacing") == Expr::parse("pier_column_cross_dim + pile_spacing"));
    const auto& cs = space.constraints.constraints;
    auto it = std::find_if(cs.begin(), cs.end(), [](const Constraint& c) { return c.id == "spacing_lt_capbeam"; });
    REQUIRE(it != cs.end());
    CHECK(it->lhs == Expr::parse("cross_bridge_pier_spacing"));
    CHECK(it->relation == Relation::Less);
    CHECK(it->rhs == Expr::parse("cap_beam_cross_dim"));
}

TEST_CASE("eval_composites examples") {
    ParameterVector v = fixture::worked_example();
    CHECK(v.size() == 15);
    CHECK(v.at("cross_bridge_pier_spacing") == 5200);
    CHECK(v.at("total_structure_height") == 11800);
    CHECK(v.at("pile_row_extent") == 8000);
    CHECK(v.at("bearing_pitch") == 4000);

    ParameterVector three = with(v, "num_pier_columns", 3);
    three = eval_composites(three, fixture::space().formulas);
    CHECK(three.at("column_envelope_width") == 2 * 5200 + 1200);
    CHECK(three.at("cap_beam_overhang") == (12000 - 11600) / 2);
}

TEST_CASE("eval_composites is idempotent and reports failures") {
    const auto& f = fixture::space().formulas;
    ParameterVector v = fixture::worked_example();
    CHECK(eval_composites(v, f) == v);
    CHECK(is_self_consistent(v, f));
    CHECK_FALSE(is_self_consistent(with(v, "bearing_pitch", 4100), f));

    ParameterVector missing = v;
    missing.erase("pile_spacing");
    CHECK_THROWS_AS(eval_composites(missing, f), MissingInput);

    CHECK_THROWS_AS(eval_composites(with(v, "cap_beam_cross_dim", 12100), f), NonIntegerResult);
    CHECK_THROWS_AS(eval_composites(with(v, "num_piles", 1), f), NonPositiveResult);
}

TEST_CASE("check_constraints examples") {
    const auto& cs = fixture::space().constraints;
    ParameterVector v = fixture::worked_example();
    CHECK(check_constraints(v, cs).empty());

    auto vs = check_constraints(with(v, "cap_beam_cross_dim", 5000), cs);
    REQUIRE_FALSE(vs.empty());
    CHECK(vs.front() == Violation{"spacing_lt_capbeam", 5200, 5000});

    CHECK(has_violation(check_constraints(with(v, "pier_column_cross_dim", 4500), cs), "column_lt_spacing"));
    CHECK_FALSE(has_violation(check_constraints(with(v, "pier_column_cross_dim", 1300), cs), "column_lt_spacing"));

    ParameterVector missing = v;
    missing.erase("cap_beam_cross_dim");
    CHECK_THROWS_AS(check_constraints(missing, cs), UnknownParameter);
}

TEST_CASE("violations follow constraint order") {
    const auto& cs = fixture::space().constraints;
    auto v = with(with(fixture::worked_example(), "cap_beam_cross_dim", 3000), "column_envelope_width", 22000);
    auto vs = check_constraints(v, cs);
    std::vector<std::size_t> positions;
    for (const auto& x : vs) {
        auto it = std::find_if(cs.constraints.begin(), cs.constraints.end(),
                               [&](const Constraint& c) { return c.id == x.constraint_id; });
        positions.push_back(static_cast<std::size_t>(it - cs.constraints.begin()));
    }
    CHECK(vs.size() >= 2);
    CHECK(std::is_sorted(positions.begin(), positions.end()));
}

TEST_CASE("cyclic and incomplete formula tables are rejected") {
    ParameterSchema schema("t", {
                                    {"a", ParameterKind::Recognition, Unit::Millimeter, IntRange{1, 10}, 1},
                                    {"b", ParameterKind::Composite, Unit::Millimeter, std::nullopt, 1},
                                    {"c", ParameterKind::Composite, Unit::Millimeter, std::nullopt, 1},
                                });
    CHECK_THROWS_AS(FormulaTable(schema, {{"b", Expr::parse("c + a")}, {"c", Expr::parse("b * 2")}}), SchemaError);
    CHECK_THROWS_AS(FormulaTable(schema, {{"b", Expr::parse("a")}}), SchemaError);
    CHECK_THROWS_AS(FormulaTable(schema, {{"b", Expr::parse("a")}, {"c", Expr::parse("zzz")}}), SchemaError);
    FormulaTable ok(schema, {{"c", Expr::parse("b * 2")}, {"b", Expr::parse("a + 1")}});
    CHECK(ok.ordered().front().first == "b");
}

TEST_CASE("schema rejects duplicate names") {
    CHECK_THROWS_AS(ParameterSchema("t", {{"a", ParameterKind::Recognition, Unit::Millimeter, IntRange{1, 2}, 1},
                                          {"a", ParameterKind::Counting, Unit::Count, IntRange{1, 2}, 1}}),
                    SchemaError);
}

TEST_CASE("expression parser round-trips and evaluates exactly") {
    for (const char* text : {"(num_piles - 1) * pile_spacing", "-a + b * (c - 2) / 3", "a - (b - c)", "7"}) {
        Expr e = Expr::parse(text);
        CHECK(Expr::parse(e.to_string()) == e);
    }
    auto look = [](const std::string& n) -> std::optional<std::int64_t> {
        if (n == "a") return 7;
        if (n == "b") return 2;
        return std::nullopt;
    };
    CHECK(Expr::parse("a * b - 4").evaluate(look).value == 10);
    CHECK(Expr::parse("a / b").evaluate(look).status == Expr::Outcome::Status::NonIntegral);
    auto miss = Expr::parse("a + zz").evaluate(look);
    CHECK(miss.status == Expr::Outcome::Status::Missing);
    CHECK(miss.missing == "zz");
    CHECK_THROWS_AS(Expr::parse("a +"), ExpressionSyntaxError);
    CHECK_THROWS_AS(Expr::parse("(a"), ExpressionSyntaxError);
}

TEST_CASE("design space survives a JSON round trip") {
    const auto& s = fixture::space();
    DesignSpace back = design_space_from_json(to_json(s));
    CHECK(back.schema.names() == s.schema.names());
    CHECK(to_json(back) == to_json(s));
    ParameterVector v = fixture::worked_example();
    CHECK(eval_composites(v, back.formulas) == v);
    CHECK(check_constraints(v, back.constraints).size() == check_constraints(v, s.constraints).size());
}

#include "piergen/io.hpp"

#include <openssl/evp.h>

#include <array>

#include "piergen/errors.hpp"

namespace piergen {

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 0xf];
    }
    return out;
}

Json to_json(const DesignSpace& space) {
    Json params = Json::array();
    for (const auto& d : space.schema.defs()) {
        Json p;
        p["name"] = d.name;
        p["kind"] = to_string(d.kind);
        p["unit"] = to_string(d.unit);
        if (d.sample_range) p["range"] = {d.sample_range->min, d.sample_range->max};
        p["step"] = d.grid_step;
        params.push_back(std::move(p));
    }
    Json formulas = Json::object();
    for (const auto& d : space.schema.defs()) {
        if (d.kind == ParameterKind::Composite) formulas[d.name] = space.formulas.formula(d.name).to_string();
    }
    Json constraints = Json::array();
    for (const auto& c : space.constraints.constraints) {
        Json k;
        k["id"] = c.id;
        k["scope"] = c.view ? std::string(to_string(*c.view)) : std::string("inter");
        k["lhs"] = c.lhs.to_string();
        k["rel"] = to_string(c.relation);
        k["rhs"] = c.rhs.to_string();
        constraints.push_back(std::move(k));
    }
    Json j;
    j["version"] = space.schema.version();
    j["parameters"] = std::move(params);
    j["formulas"] = std::move(formulas);
    j["constraints"] = std::move(constraints);
    return j;
}

DesignSpace design_space_from_json(const Json& j) {
    try {
        std::vector<ParameterDef> defs;
        for (const auto& p : j.at("parameters")) {
            ParameterDef d;
            d.name = p.at("name").get<std::string>();
            d.kind = parse_parameter_kind(p.at("kind").get<std::string>());
            d.unit = parse_unit(p.at("unit").get<std::string>());
            if (p.contains("range")) {
                const auto& r = p.at("range");
                if (!r.is_array() || r.size() != 2) throw SchemaError("range of '" + d.name + "' must be [min, max]");
                d.sample_range = IntRange{r[0].get<std::int64_t>(), r[1].get<std::int64_t>()};
            }
            d.grid_step = p.value("step", std::int64_t{1});
            defs.push_back(std::move(d));
        }
        ParameterSchema schema(j.at("version").get<std::string>(), std::move(defs));

        std::vector<std::pair<std::string, Expr>> formulas;
        for (const auto& [name, text] : j.at("formulas").items()) {
            formulas.emplace_back(name, Expr::parse(text.get<std::string>()));
        }
        FormulaTable table(schema, formulas);

        ConstraintSet cs;
        for (const auto& c : j.at("constraints")) {
            Constraint k;
            k.id = c.at("id").get<std::string>();
            const auto scope = c.at("scope").get<std::string>();
            if (scope != "inter") k.view = parse_view_id(scope);
            k.lhs = Expr::parse(c.at("lhs").get<std::string>());
            k.relation = parse_relation(c.at("rel").get<std::string>());
            k.rhs = Expr::parse(c.at("rhs").get<std::string>());
            for (const auto& e : {k.lhs, k.rhs}) {
                for (const auto& name : e.variables()) {
                    if (!schema.find(name)) throw SchemaError("constraint '" + k.id + "' references unknown '" + name + "'");
                }
            }
            cs.constraints.push_back(std::move(k));
        }
        return {std::move(schema), std::move(table), std::move(cs)};
    } catch (const Json::exception& e) {
        throw SchemaError(std::string("design space: ") + e.what());
    }
}

Json values_to_json(const ParameterVector& v, const ParameterSchema& schema) {
    Json out = Json::object();
    for (const auto& d : schema.defs()) {
        if (auto x = v.get(d.name)) out[d.name] = *x;
    }
    return out;
}

ParameterVector values_from_json(const Json& j, std::string schema_version) {
    ParameterVector v(std::move(schema_version));
    for (const auto& [name, value] : j.items()) {
        if (!value.is_number_integer()) throw Error("parameter '" + name + "' is not an integer");
        v.set(name, value.get<std::int64_t>());
    }
    return v;
}

Json to_json(const ParameterTable& t, const ParameterSchema& schema) {
    Json j;
    j["schema_version"] = t.values.schema_version();
    j["sample_id"] = t.sample_id;
    j["seed"] = t.seed;
    j["index"] = t.index;
    j["parameters"] = values_to_json(t.values, schema);
    return j;
}

ParameterTable parameter_table_from_json(const Json& j) {
    ParameterTable t;
    t.sample_id = j.at("sample_id").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.index = j.at("index").get<std::uint64_t>();
    t.values = values_from_json(j.at("parameters"), j.at("schema_version").get<std::string>());
    return t;
}

std::string dump_pretty(const Json& j) { return j.dump(2) + "\n"; }

std::string dump_line(const Json& j) { return j.dump(); }

}  // namespace piergen

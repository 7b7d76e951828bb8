#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "piergen/schema.hpp"

namespace piergen {

using Json = nlohmann::ordered_json;

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view bytes);

Json to_json(const DesignSpace& space);
/// Rebuilds and revalidates the space; throws SchemaError on bad input.
DesignSpace design_space_from_json(const Json& j);

/// Values in schema order.
Json values_to_json(const ParameterVector& v, const ParameterSchema& schema);
ParameterVector values_from_json(const Json& j, std::string schema_version);

/// Per-sample parameter table file.
struct ParameterTable {
    std::string sample_id;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    ParameterVector values;
};
Json to_json(const ParameterTable& t, const ParameterSchema& schema);
ParameterTable parameter_table_from_json(const Json& j);

/// Pretty JSON text with a trailing newline.
std::string dump_pretty(const Json& j);
/// Compact single-line JSON.
std::string dump_line(const Json& j);

}  // namespace piergen

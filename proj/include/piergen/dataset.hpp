#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "piergen/io.hpp"
#include "piergen/raster.hpp"
#include "piergen/schema.hpp"

namespace piergen {

/// `pier_000042` for index 42.
std::string sample_id_for(std::uint64_t index);

/// One generated file, path relative to the dataset root.
struct FileRef {
    std::string path;
    std::string sha256;
    std::uint64_t bytes = 0;
    friend bool operator==(const FileRef&, const FileRef&) = default;
};

/// Manifest row: the six modalities of one sample plus its ground truth.
struct SampleManifest {
    std::string sample_id;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    std::string schema_version;
    FileRef parameters;
    std::vector<FileRef> dxf;  // front, top, side
    std::vector<FileRef> png;  // front, top, side, sheet
    FileRef script;
    FileRef step;
    FileRef brep;
    ParameterVector truth;

    const FileRef& dxf_for(ViewId view) const { return dxf.at(static_cast<std::size_t>(view)); }
    const FileRef& png_for(ViewId view) const { return png.at(static_cast<std::size_t>(view)); }
    const FileRef& sheet_png() const { return png.at(3); }
    std::vector<const FileRef*> files() const;
};

/// Every artifact of one sample, keyed by path relative to the dataset root.
struct RenderedSample {
    std::string sample_id;
    std::map<std::string, std::string> files;
    SampleManifest manifest;
};

RenderedSample render_sample(const ParameterVector& v, const DesignSpace& space, std::uint64_t seed,
                             std::uint64_t index, const RasterConfig& raster);

Json to_json(const SampleManifest& m, const ParameterSchema& schema);
SampleManifest manifest_from_json(const Json& j);

/// Newline-delimited records in the given order; empty input gives an empty stream.
std::string write_manifest(const std::vector<SampleManifest>& samples, const ParameterSchema& schema);
/// Throws RecordParseError naming the 1-based line.
std::vector<SampleManifest> read_manifest(std::string_view text);

}  // namespace piergen

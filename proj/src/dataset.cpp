#include "piergen/dataset.hpp"

#include <cstdio>

#include "piergen/drawing.hpp"
#include "piergen/dxf.hpp"
#include "piergen/errors.hpp"
#include "piergen/solids.hpp"

namespace piergen {

std::string sample_id_for(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "pier_%06llu", static_cast<unsigned long long>(index));
    return buf;
}

std::vector<const FileRef*> SampleManifest::files() const {
    std::vector<const FileRef*> out{&parameters};
    for (const auto& f : dxf) out.push_back(&f);
    for (const auto& f : png) out.push_back(&f);
    out.push_back(&script);
    out.push_back(&step);
    out.push_back(&brep);
    return out;
}

RenderedSample render_sample(const ParameterVector& v, const DesignSpace& space, std::uint64_t seed,
                             std::uint64_t index, const RasterConfig& raster) {
    RenderedSample r;
    r.sample_id = sample_id_for(index);
    const std::string dir = "samples/" + r.sample_id + "/";

    auto put = [&](const std::string& name, std::string bytes) {
        FileRef ref{dir + name, sha256_hex(bytes), bytes.size()};
        r.files.emplace(ref.path, std::move(bytes));
        return ref;
    };

    SampleManifest& m = r.manifest;
    m.sample_id = r.sample_id;
    m.seed = seed;
    m.index = index;
    m.schema_version = v.schema_version();
    m.truth = v;

    m.parameters = put("parameters.json", dump_pretty(to_json(ParameterTable{r.sample_id, seed, index, v}, space.schema)));

    const Drawing d = build_views(v);
    for (ViewId id : kAllViews) m.dxf.push_back(put(std::string(to_string(id)) + ".dxf", write_dxf(d, id)));
    for (ViewId id : kAllViews) {
        m.png.push_back(put(std::string(to_string(id)) + ".png", rasterize(d, id, raster).png));
    }
    m.png.push_back(put("sheet.png", rasterize_sheet(d, raster).png));

    const ModelingScript script = script_from_vector(v);
    const SolidAssembly assembly = interpret(script);
    m.script = put("model.script", format_script(script));
    m.step = put("model.step", write_step(assembly, r.sample_id));
    m.brep = put("model.brep", write_brep_dump(assembly));
    return r;
}

namespace {

Json file_json(const FileRef& f) {
    Json j;
    j["path"] = f.path;
    j["sha256"] = f.sha256;
    j["bytes"] = f.bytes;
    return j;
}

FileRef file_from_json(const Json& j) {
    return {j.at("path").get<std::string>(), j.at("sha256").get<std::string>(), j.at("bytes").get<std::uint64_t>()};
}

}  // namespace

Json to_json(const SampleManifest& m, const ParameterSchema& schema) {
    Json j;
    j["sample_id"] = m.sample_id;
    j["seed"] = m.seed;
    j["index"] = m.index;
    j["schema_version"] = m.schema_version;
    Json files;
    files["parameters"] = file_json(m.parameters);
    Json dxf, png;
    for (ViewId id : kAllViews) {
        dxf[std::string(to_string(id))] = file_json(m.dxf_for(id));
        png[std::string(to_string(id))] = file_json(m.png_for(id));
    }
    png["sheet"] = file_json(m.sheet_png());
    files["dxf"] = std::move(dxf);
    files["png"] = std::move(png);
    files["script"] = file_json(m.script);
    files["step"] = file_json(m.step);
    files["brep"] = file_json(m.brep);
    j["files"] = std::move(files);
    j["truth"] = values_to_json(m.truth, schema);
    return j;
}

SampleManifest manifest_from_json(const Json& j) {
    SampleManifest m;
    m.sample_id = j.at("sample_id").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.index = j.at("index").get<std::uint64_t>();
    m.schema_version = j.at("schema_version").get<std::string>();
    const Json& files = j.at("files");
    m.parameters = file_from_json(files.at("parameters"));
    for (ViewId id : kAllViews) {
        m.dxf.push_back(file_from_json(files.at("dxf").at(std::string(to_string(id)))));
        m.png.push_back(file_from_json(files.at("png").at(std::string(to_string(id)))));
    }
    m.png.push_back(file_from_json(files.at("png").at("sheet")));
    m.script = file_from_json(files.at("script"));
    m.step = file_from_json(files.at("step"));
    m.brep = file_from_json(files.at("brep"));
    m.truth = values_from_json(j.at("truth"), m.schema_version);
    return m;
}

std::string write_manifest(const std::vector<SampleManifest>& samples, const ParameterSchema& schema) {
    std::string out;
    for (const auto& m : samples) {
        out += dump_line(to_json(m, schema));
        out += '\n';
    }
    return out;
}

std::vector<SampleManifest> read_manifest(std::string_view text) {
    std::vector<SampleManifest> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            out.push_back(manifest_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            throw RecordParseError(line_no, e.what());
        }
    }
    return out;
}

}  // namespace piergen

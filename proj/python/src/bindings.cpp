#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "piergen/drawing.hpp"
#include "piergen/dxf.hpp"
#include "piergen/pipeline.hpp"
#include "piergen/sampler.hpp"
#include "piergen/solids.hpp"

namespace py = pybind11;
using namespace piergen;

namespace {

DesignSpace space_from(const std::string& design_space_json) {
    return design_space_json.empty() ? default_schema() : design_space_from_json(Json::parse(design_space_json));
}

ParameterVector values_from(const std::string& values_json) {
    return values_from_json(Json::parse(values_json), default_schema().schema.version());
}

RunConfig run_config(const std::string& config_json, const std::string& out, unsigned jobs) {
    RunConfig cfg;
    if (!config_json.empty()) cfg.apply_json(Json::parse(config_json));
    cfg.out = out;
    cfg.jobs = jobs;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bridge-pier drawing and instruction-data generator.";
    py::register_exception<Error>(m, "PiergenError");

    m.def("default_design_space", [] { return to_json(default_schema()).dump(); },
          "Default design space as JSON text.");

    m.def(
        "sample",
        [](std::uint64_t seed, std::uint64_t index, const std::string& design_space_json) {
            const DesignSpace space = space_from(design_space_json);
            SamplerConfig cfg;
            cfg.seed = seed;
            cfg.space = &space;
            return values_to_json(piergen::sample(cfg, index), space.schema).dump();
        },
        py::arg("seed"), py::arg("index"), py::arg("design_space") = "",
        "Parameter values of sample `index` as JSON text.");

    m.def(
        "violations",
        [](const std::string& values_json) {
            std::vector<std::string> out;
            for (const auto& v : check_constraints(values_from(values_json), default_schema().constraints)) {
                out.push_back(v.constraint_id);
            }
            return out;
        },
        py::arg("values"), "Ids of violated constraints, in declaration order.");

    m.def(
        "dxf",
        [](const std::string& values_json, const std::string& view) {
            return write_dxf(build_views(values_from(values_json)), parse_view_id(view));
        },
        py::arg("values"), py::arg("view"));

    m.def(
        "png",
        [](const std::string& values_json, const std::string& view, int width, int height, int stroke) {
            RasterConfig cfg;
            cfg.width_px = width;
            cfg.height_px = height;
            cfg.stroke_width_px = stroke;
            cfg.validate();
            return py::bytes(rasterize(build_views(values_from(values_json)), parse_view_id(view), cfg).png);
        },
        py::arg("values"), py::arg("view"), py::arg("width") = 1600, py::arg("height") = 1200, py::arg("stroke") = 2);

    m.def(
        "step",
        [](const std::string& values_json) { return write_step(interpret(script_from_vector(values_from(values_json)))); },
        py::arg("values"));

    m.def(
        "r_p1",
        [](const std::string& answer, const std::string& label) {
            InstructionInstance inst;
            inst.kind = TaskKind::Dichotomous;
            inst.truth = LabelTruth{label};
            return r_p1(answer, inst);
        },
        py::arg("answer"), py::arg("label"));

    m.def(
        "r_p2",
        [](std::set<std::size_t> selected, std::set<std::size_t> correct, std::set<std::size_t> incorrect) {
            const ChoiceOutcome o{std::move(selected), std::move(correct), std::move(incorrect)};
            o.validate();
            return r_p2(o);
        },
        py::arg("selected"), py::arg("correct"), py::arg("incorrect"));

    m.def(
        "r_p3",
        [](const std::map<std::string, std::string>& predictions, const std::string& values_json,
           const std::map<std::string, double>& accuracy) {
            const DifficultyConfig cfg;
            const PredictionMap pred(predictions.begin(), predictions.end());
            return r_p3(pred, values_from(values_json), classify_difficulty(accuracy, cfg), cfg);
        },
        py::arg("predictions"), py::arg("values"), py::arg("accuracy"));

    m.def(
        "generate",
        [](const std::string& config_json, const std::string& out, unsigned jobs) {
            py::gil_scoped_release release;
            return generate_dataset(run_config(config_json, out, jobs)).samples.size();
        },
        py::arg("config"), py::arg("out"), py::arg("jobs") = 1, "Writes a dataset; returns the sample count.");

    m.def(
        "curriculum",
        [](const std::string& config_json, const std::string& out) {
            CurriculumResult r;
            {
                py::gil_scoped_release release;
                r = emit_curriculum(run_config(config_json, out, 1));
            }
            std::vector<std::string> files;
            for (const auto& p : r.corpora) files.push_back(p.generic_string());
            for (const auto& p : r.warmup) files.push_back(p.generic_string());
            return files;
        },
        py::arg("config"), py::arg("out"), "Writes training corpora; returns their paths relative to `out`.");
}

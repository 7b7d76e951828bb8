#include "piergen/rewards.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "piergen/errors.hpp"
#include "piergen/layout.hpp"

namespace piergen {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

double r_p1(std::string_view answer, const InstructionInstance& inst) {
    if (inst.kind != TaskKind::Dichotomous) {
        throw WrongTaskKind("r_p1 needs a dichotomous instance, got " + std::string(to_string(inst.kind)));
    }
    std::string a(trim(answer));
    std::transform(a.begin(), a.end(), a.begin(), [](unsigned char c) { return std::tolower(c); });
    return a == std::get<LabelTruth>(inst.truth).label ? 1.0 : 0.0;
}

void ChoiceOutcome::validate() const {
    for (auto c : correct) {
        if (incorrect.count(c)) throw Error("option " + std::to_string(c) + " is both correct and incorrect");
    }
    const std::size_t n = correct.size() + incorrect.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!correct.count(i) && !incorrect.count(i)) throw Error("options must be numbered 0..n-1");
    }
    for (auto s : selected) {
        if (s >= n) throw Error("selected option " + std::to_string(s) + " does not exist");
    }
}

double r_p2(const ChoiceOutcome& o) {
    if (o.selected.empty()) return 0.0;
    for (auto s : o.selected) {
        if (!o.correct.count(s)) return 0.0;
    }
    return o.selected == o.correct ? 1.0 : 0.2;
}

std::string_view to_string(Difficulty d) {
    switch (d) {
        case Difficulty::Easy: return "easy";
        case Difficulty::Medium: return "medium";
        case Difficulty::Hard: return "hard";
    }
    return "?";
}

void DifficultyConfig::validate() const {
    if (!(hard_threshold >= 0 && hard_threshold < easy_threshold && easy_threshold <= 1)) {
        throw Error("difficulty thresholds must satisfy 0 <= hard < easy <= 1");
    }
}

double DifficultyConfig::reward(Difficulty d) const {
    switch (d) {
        case Difficulty::Easy: return easy_reward;
        case Difficulty::Medium: return medium_reward;
        case Difficulty::Hard: return hard_reward;
    }
    return wrong_reward;
}

DifficultyMap classify_difficulty(const std::map<std::string, double>& per_param_accuracy,
                                  const DifficultyConfig& cfg) {
    cfg.validate();
    DifficultyMap m;
    for (const auto& [name, acc] : per_param_accuracy) {
        if (!(acc >= 0 && acc <= 1)) throw Error("accuracy of '" + name + "' must lie in [0, 1]");
        Difficulty d = Difficulty::Medium;
        if (acc > cfg.easy_threshold) {
            d = Difficulty::Easy;
        } else if (acc < cfg.hard_threshold) {
            d = Difficulty::Hard;
        }
        m.tiers[name] = d;
        m.accuracy[name] = acc;
    }
    return m;
}

std::optional<std::int64_t> canonicalize_value(std::string_view raw) {
    std::string_view s = trim(raw);
    if (s.size() >= 2) {
        std::string_view tail = s.substr(s.size() - 2);
        if ((tail[0] == 'm' || tail[0] == 'M') && (tail[1] == 'm' || tail[1] == 'M')) s = trim(s.substr(0, s.size() - 2));
    }
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc()) return std::nullopt;
    std::string_view rest(p, static_cast<std::size_t>(s.data() + s.size() - p));
    if (rest.empty()) return v;
    if (rest.front() != '.') return std::nullopt;
    rest.remove_prefix(1);
    if (!std::all_of(rest.begin(), rest.end(), [](char c) { return c == '0'; })) return std::nullopt;
    return v;
}

namespace {

bool matches(const PredictionMap& pred, std::string_view name, std::int64_t truth, double tol) {
    auto it = pred.find(name);
    if (it == pred.end()) return false;
    auto v = canonicalize_value(it->second);
    if (!v) return false;
    if (tol <= 0) return *v == truth;
    return std::abs(static_cast<double>(*v - truth)) <= tol * std::abs(static_cast<double>(truth));
}

}  // namespace

double r_p3(const PredictionMap& pred, const ParameterVector& truth, const DifficultyMap& dm,
            const DifficultyConfig& cfg) {
    double total = 0.0;
    for (const auto& [name, value] : truth.values()) {
        auto tier = dm.tiers.find(name);
        if (tier == dm.tiers.end()) throw Error("difficulty map has no tier for '" + name + "'");
        total += matches(pred, name, value, 0.0) ? cfg.reward(tier->second) : cfg.wrong_reward;
    }
    return total;
}

std::map<std::string, double> EvalReport::accuracy_by_parameter() const {
    std::map<std::string, double> out;
    for (const auto& [name, r] : per_parameter) out[name] = r.value();
    return out;
}

std::vector<PredictionRecord> read_predictions(std::string_view text) {
    std::vector<PredictionRecord> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        start = nl + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        PredictionRecord rec;
        rec.line = line_no;
        try {
            Json j = Json::parse(line);
            rec.sample_id = j.at("sample_id").get<std::string>();
            for (const auto& [name, v] : j.at("values").items()) {
                if (v.is_string()) {
                    rec.values[name] = v.get<std::string>();
                } else if (v.is_number() || v.is_null() || v.is_boolean()) {
                    rec.values[name] = v.dump();
                } else {
                    throw Error("value of '" + name + "' must be a number or string");
                }
            }
        } catch (const std::exception& e) {
            throw RecordParseError(line_no, e.what());
        }
        out.push_back(std::move(rec));
    }
    return out;
}

EvalReport score_predictions(const std::vector<PredictionRecord>& preds, const std::vector<SampleManifest>& truth,
                             const ParameterSchema& schema, const ScoreConfig& cfg) {
    EvalReport r;
    std::map<std::string, const SampleManifest*> by_id;
    for (const auto& m : truth) by_id[m.sample_id] = &m;

    std::map<std::string, const PredictionRecord*> latest;
    for (const auto& p : preds) {
        if (!by_id.count(p.sample_id)) throw UnknownSampleId(p.sample_id);
        auto [it, inserted] = latest.emplace(p.sample_id, &p);
        if (!inserted) {
            r.warnings.push_back("duplicate prediction for " + p.sample_id + " at line " + std::to_string(p.line) +
                                 " replaces line " + std::to_string(it->second->line));
            it->second = &p;
        }
    }

    const std::vector<std::string> names = schema.names();
    std::vector<Ratio> per_param(names.size());
    std::map<ParameterKind, Ratio> per_kind;
    static const PredictionMap kEmpty;
    for (const auto& m : truth) {
        auto it = latest.find(m.sample_id);
        if (it == latest.end()) r.warnings.push_back("no prediction for " + m.sample_id);
        const PredictionMap& pred = it == latest.end() ? kEmpty : it->second->values;
        for (std::size_t i = 0; i < names.size(); ++i) {
            const std::int64_t t = m.truth.at(names[i]);
            const bool ok = matches(pred, names[i], t, cfg.relative_tolerance);
            Ratio& kind = per_kind[schema.at(names[i]).kind];
            ++per_param[i].total;
            ++kind.total;
            ++r.overall.total;
            if (ok) {
                ++per_param[i].correct;
                ++kind.correct;
                ++r.overall.correct;
            } else {
                auto p = pred.find(names[i]);
                r.mismatches.push_back({m.sample_id, names[i], p == pred.end() ? "<missing>" : p->second, t});
            }
        }
    }
    r.samples = truth.size();
    for (std::size_t i = 0; i < names.size(); ++i) r.per_parameter.emplace_back(names[i], per_param[i]);
    for (ParameterKind k : {ParameterKind::Recognition, ParameterKind::Counting, ParameterKind::Composite}) {
        if (schema.count(k) > 0) r.per_category.emplace_back(k, per_kind[k]);
    }
    return r;
}

namespace {

Json ratio_json(const Ratio& r) {
    return {{"correct", r.correct}, {"total", r.total}, {"accuracy", r.value()}};
}

}  // namespace

Json to_json(const EvalReport& r) {
    Json j;
    j["samples"] = r.samples;
    j["overall"] = ratio_json(r.overall);
    Json cats = Json::object();
    for (const auto& [k, ratio] : r.per_category) cats[std::string(to_string(k))] = ratio_json(ratio);
    j["per_category"] = std::move(cats);
    Json params = Json::object();
    for (const auto& [name, ratio] : r.per_parameter) params[name] = ratio_json(ratio);
    j["per_parameter"] = std::move(params);
    Json mm = Json::array();
    for (const auto& m : r.mismatches) {
        mm.push_back({{"sample_id", m.sample_id}, {"name", m.name}, {"predicted", m.predicted}, {"truth", m.truth}});
    }
    j["mismatches"] = std::move(mm);
    j["warnings"] = r.warnings;
    return j;
}

std::string format_report(const EvalReport& r) {
    std::string out;
    char buf[160];
    auto row = [&](const std::string& label, const Ratio& ratio) {
        std::snprintf(buf, sizeof buf, "%-28s %8llu / %-8llu %7.4f\n", label.c_str(),
                      static_cast<unsigned long long>(ratio.correct), static_cast<unsigned long long>(ratio.total),
                      ratio.value());
        out += buf;
    };
    std::snprintf(buf, sizeof buf, "samples: %zu\n", r.samples);
    out += buf;
    out += "parameter                     correct / total    accuracy\n";
    for (const auto& [name, ratio] : r.per_parameter) row(name, ratio);
    out += "\n";
    for (const auto& [kind, ratio] : r.per_category) row(std::string(to_string(kind)), ratio);
    out += "\n";
    row("overall", r.overall);
    return out;
}

namespace {

struct Interval {
    std::int64_t lo, hi;
};

Interval interval_of(const Expr& e, const std::map<std::string, Interval>& known) {
    auto corners = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
        return Interval{std::min({a, b, c, d}), std::max({a, b, c, d})};
    };
    switch (e.op()) {
        case Expr::Op::Constant: return {e.value(), e.value()};
        case Expr::Op::Variable: return known.at(e.name());
        case Expr::Op::Neg: {
            Interval a = interval_of(e.operands()[0], known);
            return {-a.hi, -a.lo};
        }
        default: break;
    }
    Interval a = interval_of(e.operands()[0], known);
    Interval b = interval_of(e.operands()[1], known);
    switch (e.op()) {
        case Expr::Op::Add: return {a.lo + b.lo, a.hi + b.hi};
        case Expr::Op::Sub: return {a.lo - b.hi, a.hi - b.lo};
        case Expr::Op::Mul: return corners(a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi);
        case Expr::Op::Div: {
            if (b.lo <= 0 && b.hi >= 0) throw Error("divisor interval contains zero");
            // Exact quotients lie within the real-valued bounds.
            auto fl = [](std::int64_t x, std::int64_t y) { return floor_div(x, y); };
            auto cl = [](std::int64_t x, std::int64_t y) { return -floor_div(-x, y); };
            Interval lo = corners(fl(a.lo, b.lo), fl(a.lo, b.hi), fl(a.hi, b.lo), fl(a.hi, b.hi));
            Interval hi = corners(cl(a.lo, b.lo), cl(a.lo, b.hi), cl(a.hi, b.lo), cl(a.hi, b.hi));
            return {lo.lo, hi.hi};
        }
        default: break;
    }
    throw Error("unsupported expression");
}

}  // namespace

std::map<std::string, GuessDomain> guess_domains(const DesignSpace& space) {
    std::map<std::string, GuessDomain> out;
    std::map<std::string, Interval> known;
    for (const auto& d : space.schema.defs()) {
        if (!d.sample_range) continue;
        out[d.name] = {d.sample_range->min, d.sample_range->max, d.grid_step};
        known[d.name] = {d.sample_range->min, d.sample_range->max};
    }
    for (const auto& [name, f] : space.formulas.ordered()) {
        Interval i = interval_of(f, known);
        // Composites are positive by construction.
        i.lo = std::max<std::int64_t>(i.lo, 1);
        known[name] = i;
        out[name] = {i.lo, i.hi, 1};
    }
    return out;
}

}  // namespace piergen

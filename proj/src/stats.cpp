#include "piergen/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <numeric>

#include "piergen/errors.hpp"

namespace piergen {

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected_prob,
                               double min_expected) {
    if (observed.size() != expected_prob.size() || observed.empty()) {
        throw Error("observed and expected bins must be nonempty and equally sized");
    }
    const double n = static_cast<double>(std::accumulate(observed.begin(), observed.end(), std::uint64_t{0}));
    const double mass = std::accumulate(expected_prob.begin(), expected_prob.end(), 0.0);
    if (mass <= 0) throw Error("expected probabilities must have positive mass");

    // Pool left to right, then fold an undersized last bin into its neighbour.
    std::vector<double> obs, exp;
    double o_acc = 0, e_acc = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += static_cast<double>(observed[i]);
        e_acc += n * expected_prob[i] / mass;
        if (e_acc >= min_expected) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
            o_acc = e_acc = 0;
        }
    }
    if (e_acc > 0 || o_acc > 0) {
        if (exp.empty()) {
            obs.push_back(o_acc);
            exp.push_back(e_acc);
        } else {
            obs.back() += o_acc;
            exp.back() += e_acc;
        }
    }

    ChiSquareResult r;
    r.bins = exp.size();
    r.dof = static_cast<int>(exp.size()) - 1;
    for (std::size_t i = 0; i < exp.size(); ++i) {
        if (exp[i] > 0) r.statistic += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
    }
    if (r.dof > 0) {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    }
    return r;
}

std::vector<double> rounded_normal_pmf(double mean, double sigma, std::int64_t lo, std::int64_t hi) {
    if (lo > hi || sigma <= 0) throw Error("invalid rounded normal");
    boost::math::normal dist(mean, sigma);
    auto cdf = [&](double x) { return boost::math::cdf(dist, x); };
    std::vector<double> p;
    for (std::int64_t k = lo; k <= hi; ++k) {
        const double upper = k == hi ? 1.0 : cdf(static_cast<double>(k) + 0.5);
        const double lower = k == lo ? 0.0 : cdf(static_cast<double>(k) - 0.5);
        p.push_back(upper - lower);
    }
    return p;
}

std::pair<std::uint64_t, std::uint64_t> binomial_interval(std::uint64_t n, double p, double coverage) {
    if (n == 0) return {0, 0};
    boost::math::binomial dist(static_cast<double>(n), p);
    const double tail = (1.0 - coverage) / 2.0;
    // Widen outward until each tail holds at most `tail`.
    std::uint64_t lo = 0;
    while (lo < n && boost::math::cdf(dist, static_cast<double>(lo)) <= tail) ++lo;
    std::uint64_t hi = n;
    while (hi > 0 && boost::math::cdf(boost::math::complement(dist, static_cast<double>(hi - 1))) <= tail) --hi;
    return {lo, hi};
}

namespace {

Json histogram_json(const std::vector<std::uint64_t>& counts, std::int64_t lo) {
    Json h = Json::object();
    for (std::size_t i = 0; i < counts.size(); ++i) h[std::to_string(lo + static_cast<std::int64_t>(i))] = counts[i];
    return h;
}

Json gof_json(const ChiSquareResult& r, double alpha) {
    return {{"statistic", r.statistic}, {"dof", r.dof},  {"p_value", r.p_value},
            {"bins", r.bins},           {"alpha", alpha}, {"pass", r.dof == 0 || r.p_value > alpha}};
}

}  // namespace

Json corpus_stats(const std::vector<InstructionInstance>& corpus, const Task1Config& t1, const Task2Config& t2,
                  std::size_t parameter_count, double alpha) {
    std::map<std::string, std::uint64_t> tasks;
    std::uint64_t t1_total = 0, t1_yes = 0;
    std::vector<std::uint64_t> n_hist(static_cast<std::size_t>(t1.n_max - t1.n_min + 1), 0);
    std::vector<std::uint64_t> p_hist(static_cast<std::size_t>(t2.p_max - t2.p_min + 1), 0);
    const auto count = static_cast<std::int64_t>(parameter_count);
    const auto q_top = count - t2.p_min;
    std::vector<std::uint64_t> q_hist(static_cast<std::size_t>(q_top - t2.q_min + 1), 0);
    std::vector<double> q_expected(q_hist.size(), 0.0);
    std::uint64_t t2_total = 0;

    for (const auto& inst : corpus) {
        ++tasks[std::string(to_string(inst.kind))];
        if (inst.kind == TaskKind::Dichotomous) {
            ++t1_total;
            if (std::get<LabelTruth>(inst.truth).label == "yes") {
                ++t1_yes;
            } else if (auto it = inst.meta.find("n"); it != inst.meta.end()) {
                if (it->second < t1.n_min || it->second > t1.n_max) throw Error("n outside configured range");
                ++n_hist[static_cast<std::size_t>(it->second - t1.n_min)];
            }
        } else if (inst.kind == TaskKind::MultipleChoice) {
            const std::int64_t p = inst.meta.at("p");
            const std::int64_t q = inst.meta.at("q");
            if (p < t2.p_min || p > t2.p_max || q < t2.q_min || q > count - p) throw Error("p or q outside clamps");
            ++t2_total;
            ++p_hist[static_cast<std::size_t>(p - t2.p_min)];
            ++q_hist[static_cast<std::size_t>(q - t2.q_min)];
            // q is clamped per instance by its own p, so its law is the mixture over observed p.
            auto pmf = rounded_normal_pmf(t2.q_mean, t2.q_sigma, t2.q_min, count - p);
            for (std::size_t i = 0; i < pmf.size(); ++i) q_expected[i] += pmf[i];
        }
    }

    Json out;
    out["instances"] = corpus.size();
    Json by_task = Json::object();
    for (const auto& [k, v] : tasks) by_task[k] = v;
    out["tasks"] = std::move(by_task);

    if (t1_total > 0) {
        Json d;
        d["instances"] = t1_total;
        d["yes"] = t1_yes;
        d["yes_fraction"] = static_cast<double>(t1_yes) / static_cast<double>(t1_total);
        auto [lo, hi] = binomial_interval(t1_total, t1.correct_fraction, 1.0 - alpha);
        d["binomial_interval"] = {lo, hi};
        d["balance_pass"] = t1_yes >= lo && t1_yes <= hi;
        d["n_histogram"] = histogram_json(n_hist, t1.n_min);
        const std::uint64_t corrupted = std::accumulate(n_hist.begin(), n_hist.end(), std::uint64_t{0});
        if (corrupted > 0) {
            d["n_uniform_gof"] = gof_json(chi_square_gof(n_hist, std::vector<double>(n_hist.size(), 1.0)), alpha);
        }
        out["dichotomous"] = std::move(d);
    }
    if (t2_total > 0) {
        Json d;
        d["instances"] = t2_total;
        d["p_histogram"] = histogram_json(p_hist, t2.p_min);
        d["p_gof"] = gof_json(chi_square_gof(p_hist, rounded_normal_pmf(t2.p_mean, t2.p_sigma, t2.p_min, t2.p_max)), alpha);
        d["q_histogram"] = histogram_json(q_hist, t2.q_min);
        d["q_gof"] = gof_json(chi_square_gof(q_hist, q_expected), alpha);
        out["multiple_choice"] = std::move(d);
    }
    return out;
}

}  // namespace piergen

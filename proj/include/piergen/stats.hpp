#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "piergen/curriculum.hpp"
#include "piergen/io.hpp"

namespace piergen {

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;  // after pooling
};

/// Pearson goodness of fit. Adjacent bins are pooled until every expected
/// count is at least `min_expected`. `expected_prob` is renormalized.
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& expected_prob,
                               double min_expected = 5.0);

/// pmf of llround(N(mean, sigma)) clamped to [lo, hi], indexed from lo.
std::vector<double> rounded_normal_pmf(double mean, double sigma, std::int64_t lo, std::int64_t hi);

/// Central interval holding at least `coverage` of Binomial(n, p), in successes.
std::pair<std::uint64_t, std::uint64_t> binomial_interval(std::uint64_t n, double p, double coverage);

/// Label balance and n/p/q histograms of a corpus, checked against the configured laws.
Json corpus_stats(const std::vector<InstructionInstance>& corpus, const Task1Config& t1, const Task2Config& t2,
                  std::size_t parameter_count, double alpha = 0.01);

}  // namespace piergen

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace memeflow {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

MeanStderr mean_stderr(const std::vector<double>& xs);

// Mann-Whitney U with tie-corrected normal approximation and continuity
// correction. p_greater tests H1 "sample a tends to exceed sample b".
struct MannWhitneyResult {
    double u_a = 0.0;
    double z = 0.0;
    double p_greater = 1.0;
    double p_less = 1.0;
    double p_two_sided = 1.0;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// Nearest-rank percentile: value at position ceil(pct/100 * n) of the sorted
// sample (1-indexed). pct in (0, 100].
double nearest_rank_percentile(std::vector<double> values, double pct);

// Adjusted Rand index between two labelings of the same node set.
double adjusted_rand_index(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

double normal_cdf(double x);

}  // namespace memeflow

#include "memeflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>

namespace memeflow {

MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr out;
    out.n = xs.size();
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return out;
    double ss = 0.0;
    for (double x : xs) {
        const double d = x - out.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(xs.size() - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Ranks of the pooled sample, average ranks on ties. Returns the sum of
// (t^3 - t) over tie groups for the variance correction.
double rank_pooled(const std::vector<double>& a, const std::vector<double>& b,
                   std::vector<double>& ranks_a) {
    const std::size_t n = a.size() + b.size();
    std::vector<std::pair<double, std::size_t>> pooled;
    pooled.reserve(n);
    for (std::size_t i = 0; i < a.size(); ++i) pooled.emplace_back(a[i], i);
    for (std::size_t i = 0; i < b.size(); ++i) pooled.emplace_back(b[i], a.size() + i);
    std::sort(pooled.begin(), pooled.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });

    std::vector<double> ranks(n);
    double tie_term = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && pooled[j + 1].first == pooled[i].first) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        const double t = static_cast<double>(j - i + 1);
        if (t > 1.0) tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) ranks[pooled[k].second] = avg_rank;
        i = j + 1;
    }
    ranks_a.assign(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()));
    return tie_term;
}

}  // namespace

MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    MannWhitneyResult res;
    res.n_a = a.size();
    res.n_b = b.size();
    if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney: empty sample");

    std::vector<double> ranks_a;
    const double tie_term = rank_pooled(a, b, ranks_a);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double nn = na + nb;

    double rank_sum_a = 0.0;
    for (double r : ranks_a) rank_sum_a += r;
    res.u_a = rank_sum_a - na * (na + 1.0) / 2.0;

    const double mu = na * nb / 2.0;
    double sigma2 = na * nb / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
    if (sigma2 <= 0.0) {
        // All values identical: no evidence either way.
        res.z = 0.0;
        res.p_greater = res.p_less = 0.5;
        res.p_two_sided = 1.0;
        return res;
    }
    const double sigma = std::sqrt(sigma2);
    const double cc = 0.5;  // continuity correction
    const double z_greater = (res.u_a - mu - cc) / sigma;
    const double z_less = (res.u_a - mu + cc) / sigma;
    res.z = (res.u_a - mu) / sigma;
    res.p_greater = 1.0 - normal_cdf(z_greater);
    res.p_less = normal_cdf(z_less);
    res.p_two_sided = std::min(1.0, 2.0 * std::min(res.p_greater, res.p_less));
    return res;
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman_rho: size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("spearman_rho: need at least 2 points");

    auto ranks_of = [](const std::vector<double>& v) {
        const std::size_t m = v.size();
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> ranks(m);
        std::size_t i = 0;
        while (i < m) {
            std::size_t j = i;
            while (j + 1 < m && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
            for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = avg;
            i = j + 1;
        }
        return ranks;
    };

    const std::vector<double> rx = ranks_of(x);
    const std::vector<double> ry = ranks_of(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx;
        const double dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

double nearest_rank_percentile(std::vector<double> values, double pct) {
    if (values.empty()) throw std::invalid_argument("nearest_rank_percentile: empty sample");
    if (pct <= 0.0 || pct > 100.0) throw std::invalid_argument("nearest_rank_percentile: pct out of range");
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    std::size_t rank = static_cast<std::size_t>(std::ceil(pct / 100.0 * n - 1e-9));
    if (rank == 0) rank = 1;
    if (rank > values.size()) rank = values.size();
    return values[rank - 1];
}

double adjusted_rand_index(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("adjusted_rand_index: size mismatch");
    const std::size_t n = a.size();
    if (n == 0) return 1.0;

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cont;
    std::map<std::uint32_t, std::uint64_t> row, col;
    for (std::size_t i = 0; i < n; ++i) {
        ++cont[{a[i], b[i]}];
        ++row[a[i]];
        ++col[b[i]];
    }
    auto choose2 = [](std::uint64_t k) { return static_cast<double>(k) * static_cast<double>(k - 1) / 2.0; };
    double sum_ij = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, c] : cont) sum_ij += choose2(c);
    for (const auto& [key, c] : row) sum_a += choose2(c);
    for (const auto& [key, c] : col) sum_b += choose2(c);
    const double total = choose2(n);
    const double expected = sum_a * sum_b / total;
    const double max_index = (sum_a + sum_b) / 2.0;
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace memeflow

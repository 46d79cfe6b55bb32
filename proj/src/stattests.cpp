#include "reform/stattests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

namespace reform {

namespace {

auto mean_and_variance(std::span<const double> x) -> std::pair<double, double>
{
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, ss / static_cast<double>(x.size() - 1)};
}

}  // namespace

auto welch_t(std::span<const double> a, std::span<const double> b) -> std::optional<TestResult>
{
    if (a.size() < 2 || b.size() < 2) {
        return std::nullopt;
    }
    auto [ma, va] = mean_and_variance(a);
    auto [mb, vb] = mean_and_variance(b);
    if (va == 0.0 && vb == 0.0) {
        return std::nullopt;
    }
    double sa = va / static_cast<double>(a.size());
    double sb = vb / static_cast<double>(b.size());
    double se2 = sa + sb;
    double t = (ma - mb) / std::sqrt(se2);
    double df = se2 * se2
        / (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
    boost::math::students_t dist(df);
    double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    return TestResult{t, std::clamp(p, 0.0, 1.0), a.size() + b.size(), "welch"};
}

auto wilcoxon_signed_rank(std::span<const double> deltas, const WilcoxonOptions& options) -> TestResult
{
    std::vector<double> nonzero;
    for (double d : deltas) {
        if (d != 0.0) {
            nonzero.push_back(d);
        }
    }
    const std::size_t n = nonzero.size();
    TestResult result;
    result.n_effective = n;
    if (n == 0) {
        result.method = "wilcoxon-exact";
        return result;
    }

    // Doubled average ranks keep tied ranks integral.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return std::fabs(nonzero[i]) < std::fabs(nonzero[j]); });
    std::vector<long> rank2(n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && std::fabs(nonzero[order[j + 1]]) == std::fabs(nonzero[order[i]])) {
            ++j;
        }
        auto shared = static_cast<long>(i + 1 + j + 1);
        for (std::size_t k = i; k <= j; ++k) {
            rank2[order[k]] = shared;
        }
        auto t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    long w2 = 0;
    long total2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        total2 += rank2[i];
        if (nonzero[i] > 0) {
            w2 += rank2[i];
        }
    }
    result.statistic = static_cast<double>(w2) / 2.0;

    if (n <= options.exact_max) {
        // counts[s]: sign assignments whose doubled positive rank sum is s.
        std::vector<double> counts(static_cast<std::size_t>(total2) + 1, 0.0);
        counts[0] = 1.0;
        long reach = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (long s = reach; s >= 0; --s) {
                if (counts[static_cast<std::size_t>(s)] != 0.0) {
                    counts[static_cast<std::size_t>(s + rank2[i])] += counts[static_cast<std::size_t>(s)];
                }
            }
            reach += rank2[i];
        }
        double all = std::ldexp(1.0, static_cast<int>(n));
        double below = 0.0;
        double above = 0.0;
        for (long s = 0; s <= total2; ++s) {
            if (s <= w2) {
                below += counts[static_cast<std::size_t>(s)];
            }
            if (s >= w2) {
                above += counts[static_cast<std::size_t>(s)];
            }
        }
        result.p_value = std::min(1.0, 2.0 * std::min(below, above) / all);
        result.method = "wilcoxon-exact";
        return result;
    }

    auto nd = static_cast<double>(n);
    double mean = nd * (nd + 1.0) / 4.0;
    double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    result.method = "wilcoxon-normal";
    if (var <= 0.0) {
        return result;
    }
    double diff = result.statistic - mean;
    if (options.continuity) {
        diff = diff > 0 ? std::max(0.0, diff - 0.5) : std::min(0.0, diff + 0.5);
    }
    double z = diff / std::sqrt(var);
    result.p_value = std::clamp(std::erfc(std::fabs(z) / std::sqrt(2.0)), 0.0, 1.0);
    return result;
}

}  // namespace reform

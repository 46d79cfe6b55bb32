#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace reform {

struct TestResult {
    double statistic = 0.0;
    /// Two-sided, in [0, 1].
    double p_value = 1.0;
    std::size_t n_effective = 0;
    /// "welch", "wilcoxon-exact" or "wilcoxon-normal".
    std::string method;
};

/// Welch's unequal-variance t-test; statistic is t for mean(a) - mean(b).
/// nullopt when a sample has fewer than 2 values or both variances are zero.
[[nodiscard]] auto welch_t(std::span<const double> a, std::span<const double> b) -> std::optional<TestResult>;

struct WilcoxonOptions {
    /// Largest nonzero-sample size evaluated exactly.
    std::size_t exact_max = 25;
    /// Continuity correction on the normal path.
    bool continuity = true;
};

/// Wilcoxon signed-rank test of `deltas` against a zero median. Zeros are
/// dropped and tied magnitudes get averaged ranks. The statistic is W+, the
/// rank sum of positive deltas. All-zero input gives p = 1 with n = 0.
[[nodiscard]] auto wilcoxon_signed_rank(std::span<const double> deltas, const WilcoxonOptions& options = {})
    -> TestResult;

}  // namespace reform

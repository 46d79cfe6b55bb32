#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reform/corpus.hpp"
#include "reform/report.hpp"
#include "reform/scenarios.hpp"

namespace reform {

/// DCG with gain 2^g - 1 and discount log2(r + 1), normalized by the DCG of
/// the judged pool sorted by grade. 0 when the ideal is 0.
[[nodiscard]] auto ndcg_at_k(std::span<const int> grades, std::span<const int> pool, std::size_t k = 10) -> double;

/// ERR with stopping probability (2^g - 1) / 16, normalized like ndcg_at_k.
[[nodiscard]] auto nerr_at_k(std::span<const int> grades, std::span<const int> pool, std::size_t k = 10) -> double;

/// Sum of precision at each relevant (grade > 0) rank over the full ranking,
/// divided by the topic's relevant count; 0 when that count is 0.
[[nodiscard]] auto average_precision(std::span<const int> grades, std::size_t relevant_count) -> double;

struct ImpressionMetrics {
    double ndcg = 0.0;
    double nerr = 0.0;
    double ap = 0.0;
};

/// Grades of `imp`'s ranking under the session topic; nullopt when the
/// impression is unranked or the topic is unjudged.
[[nodiscard]] auto impression_grades(const Session& session, const Impression& imp, const RelevanceJudgments& qrels)
    -> std::optional<std::vector<int>>;

[[nodiscard]] auto evaluate_impression(const Session& session, const Impression& imp,
                                       const RelevanceJudgments& qrels, std::size_t cutoff = 10)
    -> std::optional<ImpressionMetrics>;

/// Mean NERR, NDCG and MAP per impression position over judged, ranked
/// impressions (test queries excluded). Throws EmptyInputError without qrels.
[[nodiscard]] auto metrics_by_position(const Corpus& corpus, std::size_t cutoff = 10) -> ReportTable;

/// Mean change of each metric from q_n to q_n+1 per (action, scenario), with
/// a two-sided Wilcoxon signed-rank test against zero (flag: p < 0.05).
/// Cells with fewer than 2 nonzero deltas report no p-value. A footnote lists
/// cells whose flag flips when the continuity correction is toggled.
[[nodiscard]] auto scenario_metric_eval(const std::vector<ScenarioRecord>& records, const Corpus& corpus,
                                        std::size_t cutoff = 10) -> ReportTable;

/// session,n,metric,value for every judged impression.
[[nodiscard]] auto impression_metrics_csv(const Corpus& corpus, std::size_t cutoff = 10) -> std::string;

}  // namespace reform

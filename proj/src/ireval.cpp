#include "reform/ireval.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "accumulate.hpp"
#include "reform/errors.hpp"
#include "reform/stattests.hpp"

namespace reform {

using detail::Mean;

namespace {

auto gain(int grade) -> double
{
    return std::ldexp(1.0, grade) - 1.0;
}

auto dcg(std::span<const int> grades, std::size_t k) -> double
{
    double sum = 0.0;
    for (std::size_t r = 0; r < std::min(k, grades.size()); ++r) {
        sum += gain(grades[r]) / std::log2(static_cast<double>(r) + 2.0);
    }
    return sum;
}

auto err(std::span<const int> grades, std::size_t k) -> double
{
    double sum = 0.0;
    double reach = 1.0;
    for (std::size_t r = 0; r < std::min(k, grades.size()); ++r) {
        double stop = gain(grades[r]) / 16.0;
        sum += reach * stop / static_cast<double>(r + 1);
        reach *= 1.0 - stop;
    }
    return sum;
}

auto ideal(std::span<const int> pool) -> std::vector<int>
{
    std::vector<int> sorted(pool.begin(), pool.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    return sorted;
}

}  // namespace

auto ndcg_at_k(std::span<const int> grades, std::span<const int> pool, std::size_t k) -> double
{
    double best = dcg(ideal(pool), k);
    return best > 0.0 ? std::min(1.0, dcg(grades, k) / best) : 0.0;
}

auto nerr_at_k(std::span<const int> grades, std::span<const int> pool, std::size_t k) -> double
{
    double best = err(ideal(pool), k);
    return best > 0.0 ? std::min(1.0, err(grades, k) / best) : 0.0;
}

auto average_precision(std::span<const int> grades, std::size_t relevant_count) -> double
{
    if (relevant_count == 0) {
        return 0.0;
    }
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < grades.size(); ++r) {
        if (grades[r] > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return std::min(1.0, sum / static_cast<double>(relevant_count));
}

auto impression_grades(const Session& session, const Impression& imp, const RelevanceJudgments& qrels)
    -> std::optional<std::vector<int>>
{
    if (!imp.ranked() || !session.topic_id || !qrels.has_topic(*session.topic_id)) {
        return std::nullopt;
    }
    std::vector<int> grades;
    grades.reserve(imp.size());
    for (const auto& r : imp.results) {
        grades.push_back(qrels.grade(*session.topic_id, r.docid));
    }
    return grades;
}

auto evaluate_impression(const Session& session, const Impression& imp, const RelevanceJudgments& qrels,
                         std::size_t cutoff) -> std::optional<ImpressionMetrics>
{
    auto grades = impression_grades(session, imp, qrels);
    if (!grades) {
        return std::nullopt;
    }
    auto pool = qrels.pool(*session.topic_id);
    return ImpressionMetrics{ndcg_at_k(*grades, pool, cutoff), nerr_at_k(*grades, pool, cutoff),
                             average_precision(*grades, qrels.relevant_count(*session.topic_id))};
}

namespace {

auto require_qrels(const Corpus& corpus) -> const RelevanceJudgments&
{
    if (!corpus.qrels) {
        throw EmptyInputError("relevance judgments are required for metric evaluation");
    }
    return *corpus.qrels;
}

auto metric_names(std::size_t cutoff) -> std::array<std::string, 3>
{
    auto k = std::to_string(cutoff);
    return {"NDCG@" + k, "NERR@" + k, "MAP"};
}

auto as_array(const ImpressionMetrics& m) -> std::array<double, 3>
{
    return {m.ndcg, m.nerr, m.ap};
}

}  // namespace

auto metrics_by_position(const Corpus& corpus, std::size_t cutoff) -> ReportTable
{
    const auto& qrels = require_qrels(corpus);
    auto names = metric_names(cutoff);
    std::map<int, std::array<Mean, 3>> acc;
    for (const auto& session : corpus.sessions) {
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            if (session.is_test_query(i)) {
                continue;
            }
            const auto& imp = session.impressions[i];
            if (auto m = evaluate_impression(session, imp, qrels, cutoff)) {
                auto values = as_array(*m);
                for (std::size_t j = 0; j < 3; ++j) {
                    acc[imp.position][j].add(values[j]);
                }
            }
        }
    }
    ReportTable table("metrics_by_position", "Ranking quality by impression position", {},
                      {names[1], names[0], names[2]});
    for (const auto& [n, means] : acc) {
        auto label = std::to_string(n);
        table.add_row(label);
        for (std::size_t j = 0; j < 3; ++j) {
            table.at(label, names[j]) = means[j].cell();
        }
    }
    return table;
}

auto scenario_metric_eval(const std::vector<ScenarioRecord>& records, const Corpus& corpus, std::size_t cutoff)
    -> ReportTable
{
    const auto& qrels = require_qrels(corpus);
    auto names = metric_names(cutoff);
    bool known = std::all_of(records.begin(), records.end(), [](const ScenarioRecord& r) { return r.cd_known; });

    std::vector<std::string> scenario_rows;
    for (int s : kEvaluatedScenarios) {
        if (!known && (s == 4 || s == 8)) {
            continue;
        }
        auto label = scenario_label(s, known);
        if (std::find(scenario_rows.begin(), scenario_rows.end(), label) == scenario_rows.end()) {
            scenario_rows.push_back(label);
        }
    }
    std::vector<std::string> rows;
    for (auto action : {TermAction::Retained, TermAction::Removed, TermAction::Added}) {
        for (const auto& s : scenario_rows) {
            rows.push_back(std::string(to_string(action)) + "/" + s);
        }
    }
    ReportTable table("scenario_metric_change", "Change in ranking quality from q_n to q_n+1 per action and scenario",
                      rows, {names[0], names[1], names[2]});

    // Metric deltas are cached per pair.
    std::map<std::pair<std::size_t, int>, std::optional<std::array<double, 3>>> deltas;
    auto delta_of = [&](const ScenarioRecord& r) -> const std::optional<std::array<double, 3>>& {
        auto key = std::make_pair(r.session_index, r.position);
        auto it = deltas.find(key);
        if (it != deltas.end()) {
            return it->second;
        }
        const auto& session = corpus.sessions.at(r.session_index);
        auto i = static_cast<std::size_t>(r.position - 1);
        std::optional<std::array<double, 3>> d;
        if (i + 1 < session.impressions.size() && !session.is_test_query(i + 1)) {
            auto a = evaluate_impression(session, session.impressions[i], qrels, cutoff);
            auto b = evaluate_impression(session, session.impressions[i + 1], qrels, cutoff);
            if (a && b) {
                auto va = as_array(*a);
                auto vb = as_array(*b);
                d = std::array<double, 3>{vb[0] - va[0], vb[1] - va[1], vb[2] - va[2]};
            }
        }
        return deltas.emplace(key, d).first->second;
    };

    std::map<std::string, std::array<std::vector<double>, 3>> samples;
    for (const auto& r : records) {
        if (r.scenario == 3 || r.scenario == 7) {
            continue;
        }
        auto row = std::string(to_string(r.action)) + "/" + scenario_label(r.scenario, known);
        if (!table.has_row(row)) {
            continue;
        }
        if (const auto& d = delta_of(r)) {
            for (std::size_t j = 0; j < 3; ++j) {
                samples[row][j].push_back((*d)[j]);
            }
        }
    }

    std::vector<std::string> flips;
    for (const auto& row : rows) {
        for (std::size_t j = 0; j < 3; ++j) {
            const auto& xs = samples[row][j];
            auto& cell = table.at(row, names[j]);
            Mean mean;
            std::size_t nonzero = 0;
            for (double x : xs) {
                mean.add(x);
                nonzero += x != 0.0 ? 1 : 0;
            }
            cell = mean.cell();
            if (cell.value && *cell.value != 0.0) {
                cell.note = *cell.value > 0 ? "▲" : "▼";
            }
            if (nonzero < 2) {
                continue;
            }
            auto test = wilcoxon_signed_rank(xs);
            cell.p_value = test.p_value;
            cell.significant = test.p_value < 0.05;
            auto toggled = wilcoxon_signed_rank(xs, {.exact_max = 25, .continuity = false});
            if ((toggled.p_value < 0.05) != cell.significant) {
                flips.push_back(row + " " + names[j]);
            }
        }
    }
    table.footnotes.emplace_back("significance: two-sided Wilcoxon signed-rank test against zero, p < 0.05; "
                                 "exact below 26 nonzero deltas, normal approximation with continuity correction "
                                 "above");
    if (!flips.empty()) {
        std::string note = "significance flips without continuity correction:";
        for (const auto& f : flips) {
            note += " " + f + ";";
        }
        table.footnotes.push_back(note);
    }
    if (!known) {
        table.footnotes.emplace_back("no docstore attached: scenarios differing only in the clicked-document bit are "
                                     "merged; rows holding scenario 3 or 7 are omitted");
    }
    return table;
}

auto impression_metrics_csv(const Corpus& corpus, std::size_t cutoff) -> std::string
{
    const auto& qrels = require_qrels(corpus);
    auto names = metric_names(cutoff);
    std::string out = "session,n,metric,value\n";
    for (const auto& session : corpus.sessions) {
        for (std::size_t i = 0; i < session.impressions.size(); ++i) {
            if (session.is_test_query(i)) {
                continue;
            }
            const auto& imp = session.impressions[i];
            if (auto m = evaluate_impression(session, imp, qrels, cutoff)) {
                auto values = as_array(*m);
                for (std::size_t j = 0; j < 3; ++j) {
                    out += session.id + "," + std::to_string(imp.position) + "," + names[j] + ","
                        + format_number(values[j]) + "\n";
                }
            }
        }
    }
    return out;
}

}  // namespace reform

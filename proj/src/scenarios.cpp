#include "reform/scenarios.hpp"

#include <algorithm>
#include <map>

#include "accumulate.hpp"
#include "reform/errors.hpp"

namespace reform {

using detail::Mean;

auto to_string(TermOrigin origin) -> std::string_view
{
    return origin == TermOrigin::QueryTerm ? "query" : "added";
}

auto to_string(TermAction action) -> std::string_view
{
    switch (action) {
    case TermAction::Retained:
        return "retained";
    case TermAction::Removed:
        return "removed";
    case TermAction::Added:
        return "added";
    }
    return "unknown";
}

auto scenario_label(int scenario, bool cd_known) -> std::string
{
    if (cd_known) {
        return std::to_string(scenario);
    }
    int low = scenario % 2 == 1 ? scenario : scenario - 1;
    return std::to_string(low) + "|" + std::to_string(low + 1);
}

auto assign_scenarios(const std::vector<QueryPair>& pairs, const SourceContext& ctx) -> std::vector<ScenarioRecord>
{
    const auto& docs = ctx.documents();
    bool cd_known = docs.available();
    std::vector<ScenarioRecord> records;
    for (const auto& pair : pairs) {
        if (pair.involves_test_query) {
            continue;
        }
        const auto& imp = ctx.predecessor(pair);
        const auto& next = ctx.successor(pair);
        if (!imp.ranked() || !next.ranked()) {
            continue;
        }
        auto ncs = extract_source(imp, SourceKind::NonClickedSnippets, docs).terms();
        auto cs = extract_source(imp, SourceKind::ClickedSnippets, docs).terms();
        TermSet cd;
        bool incomplete = false;
        if (cd_known) {
            auto view = extract_source(imp, SourceKind::ClickedDocuments, docs, ctx.options().policy);
            if (!view.complete) {
                continue;
            }
            cd = view.terms();
            for (int rank : imp.clicked_ranks()) {
                incomplete = incomplete || docs.find(imp.result(rank).docid) == nullptr;
            }
        }
        auto emit = [&](const std::string& term, TermOrigin origin, TermAction action) {
            ScenarioRecord r;
            r.term = term;
            r.session_index = pair.session_index;
            r.session_id = pair.session_id;
            r.position = pair.position;
            r.origin = origin;
            r.membership = {ncs.contains(term), cs.contains(term), cd.contains(term)};
            r.cd_known = cd_known;
            r.cd_incomplete = incomplete;
            r.scenario = scenario_index(r.membership);
            r.action = action;
            r.next_clicked = !next.clicks.empty();
            r.impression_size = imp.size();
            r.impression_clicks = imp.clicks.size();
            records.push_back(std::move(r));
        };
        for (const auto& term : pair.qn) {
            emit(term, TermOrigin::QueryTerm, pair.retained.contains(term) ? TermAction::Retained : TermAction::Removed);
        }
        for (const auto& term : pair.added) {
            emit(term, TermOrigin::AddedTerm, TermAction::Added);
        }
    }
    return records;
}

namespace {

auto snippet_mode(const std::vector<ScenarioRecord>& records) -> bool
{
    return std::any_of(records.begin(), records.end(), [](const ScenarioRecord& r) { return !r.cd_known; });
}

auto scenario_rows(bool cd_known) -> std::vector<std::string>
{
    std::vector<std::string> rows;
    for (int s = 1; s <= 8; s += cd_known ? 1 : 2) {
        rows.push_back(scenario_label(s, cd_known));
    }
    return rows;
}

const char* const kSnippetOnlyNote
    = "no docstore attached: the clicked-document bit is unknown, scenarios differing only in it are merged";

}  // namespace

auto scenario_distribution(const std::vector<ScenarioRecord>& records) -> ReportTable
{
    if (records.empty()) {
        throw EmptyInputError("scenario distribution needs at least one record");
    }
    bool known = !snippet_mode(records);
    auto rows = scenario_rows(known);
    rows.emplace_back("all");
    ReportTable table("scenario_distribution", "Term scenario occurrence and impression size", rows,
                      {"query %", "query mean M", "query mean clicks", "added %", "added mean M", "added mean clicks"});
    std::map<std::string, std::array<Mean, 3>> query;
    std::map<std::string, std::array<Mean, 3>> added;
    std::array<std::size_t, 2> totals{};
    for (const auto& r : records) {
        auto& slot = r.origin == TermOrigin::QueryTerm ? query : added;
        ++totals[r.origin == TermOrigin::QueryTerm ? 0 : 1];
        for (const auto& label : {scenario_label(r.scenario, known), std::string("all")}) {
            auto& acc = slot[label];
            acc[0].add(1.0);
            acc[1].add(static_cast<double>(r.impression_size));
            acc[2].add(static_cast<double>(r.impression_clicks));
        }
    }
    auto fill = [&](std::map<std::string, std::array<Mean, 3>>& slot, std::size_t total, const std::string& prefix) {
        for (const auto& row : rows) {
            auto& acc = slot[row];
            auto& share = table.at(row, prefix + " %");
            share.population = acc[0].count;
            if (total > 0) {
                share.value = 100.0 * static_cast<double>(acc[0].count) / static_cast<double>(total);
            }
            table.at(row, prefix + " mean M") = acc[1].cell();
            table.at(row, prefix + " mean clicks") = acc[2].cell();
        }
    };
    fill(query, totals[0], "query");
    fill(added, totals[1], "added");
    if (!known) {
        table.footnotes.emplace_back(kSnippetOnlyNote);
    }
    return table;
}

auto retention_by_scenario(const std::vector<ScenarioRecord>& records) -> ReportTable
{
    bool known = !snippet_mode(records);
    std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& r : records) {
        if (r.origin != TermOrigin::QueryTerm) {
            continue;
        }
        for (const auto& label : {scenario_label(r.scenario, known), std::string("all")}) {
            auto& [kept, total] = counts[label];
            kept += r.action == TermAction::Retained ? 1 : 0;
            ++total;
        }
    }
    ReportTable table("retention_by_scenario", "Query terms retained or removed per scenario", {},
                      {"retained", "removed"});
    auto rows = scenario_rows(known);
    rows.emplace_back("all");
    for (const auto& row : rows) {
        auto it = counts.find(row);
        if (it == counts.end()) {
            continue;
        }
        auto [kept, total] = it->second;
        table.add_row(row);
        auto& retained = table.at(row, "retained");
        retained.value = static_cast<double>(kept) / static_cast<double>(total);
        retained.population = total;
        auto& removed = table.at(row, "removed");
        removed.value = static_cast<double>(total - kept) / static_cast<double>(total);
        removed.population = total;
    }
    if (!known) {
        table.footnotes.emplace_back(kSnippetOnlyNote);
    }
    return table;
}

auto click_outcome_eval(const std::vector<ScenarioRecord>& records) -> ReportTable
{
    bool known = !snippet_mode(records);
    std::vector<std::string> rows;
    for (int s : kEvaluatedScenarios) {
        // Merged rows holding an excluded scenario (3 or 7) are left out.
        if (!known && (s == 4 || s == 8)) {
            continue;
        }
        auto label = scenario_label(s, known);
        if (std::find(rows.begin(), rows.end(), label) == rows.end()) {
            rows.push_back(label);
        }
    }
    const std::vector<std::string> columns{"retained", "removed", "added"};
    ReportTable table("click_outcome", "Share of term actions followed by a click on the next query (%)", rows,
                      columns);
    std::map<std::pair<std::string, std::string>, Mean> acc;
    for (const auto& r : records) {
        auto label = scenario_label(r.scenario, known);
        if (std::find(rows.begin(), rows.end(), label) == rows.end() || r.scenario == 3 || r.scenario == 7) {
            continue;
        }
        acc[{label, std::string(to_string(r.action))}].add(r.next_clicked ? 100.0 : 0.0);
    }
    for (const auto& row : rows) {
        for (const auto& column : columns) {
            table.at(row, column) = acc[{row, column}].cell();
        }
    }
    if (!known) {
        table.footnotes.emplace_back(std::string(kSnippetOnlyNote) + "; rows 3|4 and 7|8 mix excluded scenarios and "
                                                                    "are omitted");
    }
    return table;
}

auto records_csv(const std::vector<ScenarioRecord>& records) -> std::string
{
    std::string out = "term,session,n,origin,ncs,cs,cd,scenario,action,clicked_next\n";
    for (const auto& r : records) {
        out += r.term + "," + r.session_id + "," + std::to_string(r.position) + "," + std::string(to_string(r.origin))
            + "," + (r.membership.ncs ? "1" : "0") + "," + (r.membership.cs ? "1" : "0") + ","
            + (r.cd_known ? (r.membership.cd ? "1" : "0") : "NA") + "," + std::to_string(r.scenario) + ","
            + std::string(to_string(r.action)) + "," + (r.next_clicked ? "1" : "0") + "\n";
    }
    return out;
}

}  // namespace reform

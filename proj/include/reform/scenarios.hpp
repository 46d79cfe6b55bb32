#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "reform/actions.hpp"
#include "reform/report.hpp"
#include "reform/sources.hpp"

namespace reform {

enum class TermOrigin { QueryTerm, AddedTerm };
enum class TermAction { Retained, Removed, Added };

[[nodiscard]] auto to_string(TermOrigin origin) -> std::string_view;
[[nodiscard]] auto to_string(TermAction action) -> std::string_view;

/// Membership of a term in the predecessor impression's sources.
struct Membership {
    bool ncs = false;
    bool cs = false;
    bool cd = false;

    auto operator==(const Membership&) const -> bool = default;
};

/// 1 + 4*ncs + 2*cs + cd.
[[nodiscard]] constexpr auto scenario_index(Membership m) noexcept -> int
{
    return 1 + (m.ncs ? 4 : 0) + (m.cs ? 2 : 0) + (m.cd ? 1 : 0);
}

/// Inverse of scenario_index for 1..8.
[[nodiscard]] constexpr auto scenario_membership(int scenario) noexcept -> Membership
{
    int bits = scenario - 1;
    return {(bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0};
}

struct ScenarioRecord {
    std::string term;
    std::size_t session_index = 0;
    std::string session_id;
    /// Position n of the pair's earlier query.
    int position = 0;
    TermOrigin origin = TermOrigin::QueryTerm;
    Membership membership;
    /// False when no docstore is attached: the cd bit then reads false.
    bool cd_known = true;
    /// Set under DocstorePolicy::Empty when a clicked document lacked text.
    bool cd_incomplete = false;
    int scenario = 1;
    TermAction action = TermAction::Retained;
    /// The successor impression holds at least one click.
    bool next_clicked = false;
    /// Size and click count of the predecessor impression.
    std::size_t impression_size = 0;
    std::size_t impression_clicks = 0;
};

/// One record per query term and per added term of every pair whose two
/// impressions are ranked (pairs ending in a test query are skipped).
/// Without a docstore every record has cd_known = false.
[[nodiscard]] auto assign_scenarios(const std::vector<QueryPair>& pairs, const SourceContext& ctx)
    -> std::vector<ScenarioRecord>;

/// Share of records per scenario for query and added terms, with the mean
/// impression size and click count. In snippet-only mode scenarios that differ
/// only in the cd bit are reported together on the odd row.
[[nodiscard]] auto scenario_distribution(const std::vector<ScenarioRecord>& records) -> ReportTable;

/// Retained and removed fractions of query terms per scenario plus an
/// overall row; scenarios without records are omitted.
[[nodiscard]] auto retention_by_scenario(const std::vector<ScenarioRecord>& records) -> ReportTable;

/// Percentage of records whose successor impression was clicked, per scenario
/// in {1, 2, 4, 5, 6, 8} and action.
[[nodiscard]] auto click_outcome_eval(const std::vector<ScenarioRecord>& records) -> ReportTable;

/// Scenarios kept in the click and metric evaluations.
inline constexpr std::array<int, 6> kEvaluatedScenarios{1, 2, 4, 5, 6, 8};

/// Row label of a scenario, folded as "1|2" when the cd bit is unknown.
[[nodiscard]] auto scenario_label(int scenario, bool cd_known) -> std::string;

/// Records as CSV: term, session, n, origin, ncs, cs, cd, scenario, action, clicked_next.
[[nodiscard]] auto records_csv(const std::vector<ScenarioRecord>& records) -> std::string;

}  // namespace reform

#include <map>
#include <random>

#include "doctest.h"

#include "reform/ingest.hpp"
#include "reform/scenarios.hpp"

#include "support.hpp"

using namespace reform;
using namespace reform::testing;

namespace {

/// Qn={a,b}; s(1)="a b x" clicked, s(2)="a y"; clicked doc "a b x z";
/// q_n+1 = "a x" with a clicked ranking.
auto fixture(bool with_docs, bool next_clicked = true) -> Corpus
{
    auto c = corpus({session("s", {impression(1, "a b", {{"a b x", "doc1"}, {"a y", "doc2"}}, {1}),
                                   impression(2, "a x", {{"p", "doc3"}}, next_clicked ? std::vector<int>{1}
                                                                                     : std::vector<int>{})})});
    if (with_docs) {
        c.docstore = DocumentStore{{"doc1", "<p>a b x z</p>"}, {"doc2", "a y w"}, {"doc3", "p"}};
        flag_incomplete_impressions(c);
    }
    return c;
}

auto by_term(const std::vector<ScenarioRecord>& records, TermOrigin origin) -> std::map<std::string, ScenarioRecord>
{
    std::map<std::string, ScenarioRecord> out;
    for (const auto& r : records) {
        if (r.origin == origin) {
            out[r.term] = r;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("scenario index is a bijection on membership triples")
{
    std::set<int> seen;
    for (int bits = 0; bits < 8; ++bits) {
        Membership m{(bits & 4) != 0, (bits & 2) != 0, (bits & 1) != 0};
        int s = scenario_index(m);
        CHECK(s >= 1);
        CHECK(s <= 8);
        CHECK(scenario_membership(s) == m);
        seen.insert(s);
    }
    CHECK(seen.size() == 8);
    CHECK(scenario_index({false, false, false}) == 1);
    CHECK(scenario_index({true, true, true}) == 8);
    CHECK(scenario_index({false, true, true}) == 4);
    CHECK(scenario_index({true, false, false}) == 5);
}

TEST_CASE("hand-checked membership fixture")
{
    auto c = fixture(true);
    SourceContext ctx(c);
    auto records = assign_scenarios(extract_pairs(c, false), ctx);
    auto query = by_term(records, TermOrigin::QueryTerm);
    auto added = by_term(records, TermOrigin::AddedTerm);
    REQUIRE(query.size() == 2);
    REQUIRE(added.size() == 1);
    CHECK(query.at("a").scenario == 8);
    CHECK(query.at("a").action == TermAction::Retained);
    CHECK(query.at("b").scenario == 4);
    CHECK(query.at("b").action == TermAction::Removed);
    CHECK(added.at("x").scenario == 4);
    CHECK(added.at("x").action == TermAction::Added);
    for (const auto& r : records) {
        CHECK(r.cd_known);
        CHECK(r.next_clicked);
        CHECK(r.impression_size == 2);
        CHECK(r.impression_clicks == 1);
    }
}

TEST_CASE("snippet-only mode folds the cd bit")
{
    auto c = fixture(false);
    SourceContext ctx(c);
    auto records = assign_scenarios(extract_pairs(c, false), ctx);
    auto query = by_term(records, TermOrigin::QueryTerm);
    CHECK_FALSE(query.at("a").cd_known);
    CHECK(query.at("a").scenario == 7);
    CHECK(scenario_label(7, false) == "7|8");
    CHECK(scenario_label(8, true) == "8");
    auto dist = scenario_distribution(records);
    CHECK(dist.has_row("7|8"));
    CHECK_FALSE(dist.has_row("8"));
    auto clicks = click_outcome_eval(records);
    CHECK_FALSE(clicks.has_row("3|4"));
}

TEST_CASE("docstore policies for a missing clicked document")
{
    auto c = fixture(true);
    c.docstore->erase("doc1");
    flag_incomplete_impressions(c);
    auto pairs = extract_pairs(c, false);

    SourceContext drop(c, {.policy = DocstorePolicy::Drop});
    CHECK(assign_scenarios(pairs, drop).empty());

    SourceContext empty(c, {.policy = DocstorePolicy::Empty});
    auto records = assign_scenarios(pairs, empty);
    REQUIRE(records.size() == 3);
    auto query = by_term(records, TermOrigin::QueryTerm);
    CHECK(query.at("a").cd_incomplete);
    CHECK(query.at("a").scenario == 7);
}

TEST_CASE("impressions without clicks give scenarios 1 and 5 only")
{
    auto c = corpus({session("s", {impression(1, "a b c", {{"a q"}, {"r"}}, {}), impression(2, "a d", {{"x"}}, {}),
                                   impression(3, "d e", {{"d"}}, {})})});
    c.docstore = DocumentStore{};
    SourceContext ctx(c);
    auto records = assign_scenarios(extract_pairs(c, false), ctx);
    REQUIRE_FALSE(records.empty());
    for (const auto& r : records) {
        CHECK((r.scenario == 1 || r.scenario == 5));
        CHECK_FALSE(r.next_clicked);
    }
    auto clicks = click_outcome_eval(records);
    for (const auto& row : clicks.rows()) {
        for (const auto& column : clicks.columns()) {
            if (auto v = clicks.value(row, column)) {
                CHECK(*v == 0.0);
            }
        }
    }
}

TEST_CASE("pairs ending in a test query produce no records")
{
    auto c = corpus({session("s", {impression(1, "a", {{"a"}}, {1}), test_query(2, "a b")}, true)});
    SourceContext ctx(c);
    CHECK(assign_scenarios(extract_pairs(c, true), ctx).empty());
}

TEST_CASE("single record distribution")
{
    auto c = corpus({session("s", {impression(1, "a", {{"zzz"}}, {}), impression(2, "a", {{"y"}}, {})})});
    c.docstore = DocumentStore{};
    SourceContext ctx(c);
    auto records = assign_scenarios(extract_pairs(c, false), ctx);
    REQUIRE(records.size() == 1);
    auto dist = scenario_distribution(records);
    CHECK(dist.value("1", "query %") == doctest::Approx(100.0));
    auto retention = retention_by_scenario(records);
    CHECK(retention.value("1", "retained") == doctest::Approx(1.0));
    CHECK_FALSE(retention.has_row("5"));
}

namespace {

auto random_corpus(std::mt19937_64& rng, int sessions) -> Corpus
{
    static const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    auto words = [&](std::size_t n) {
        std::string out;
        for (std::size_t i = 0; i < n; ++i) {
            out += vocab[rng() % vocab.size()] + " ";
        }
        return out;
    };
    DocumentStore docs;
    std::vector<Session> out;
    for (int s = 0; s < sessions; ++s) {
        std::vector<Impression> imps;
        auto len = 2 + rng() % 4;
        for (std::size_t n = 1; n <= len; ++n) {
            std::vector<ResultSpec> results;
            auto m = 1 + rng() % 4;
            for (std::size_t r = 1; r <= m; ++r) {
                auto id = "s" + std::to_string(s) + "n" + std::to_string(n) + "r" + std::to_string(r);
                results.push_back({words(1 + rng() % 3), id});
                docs[id] = words(2 + rng() % 5);
            }
            std::vector<int> clicks;
            for (std::size_t r = 1; r <= m; ++r) {
                if (rng() % 3 == 0) {
                    clicks.push_back(static_cast<int>(r));
                }
            }
            imps.push_back(impression(static_cast<int>(n), words(1 + rng() % 4), results, clicks));
        }
        out.push_back(session("s" + std::to_string(s), std::move(imps)));
    }
    auto c = corpus(std::move(out));
    c.docstore = std::move(docs);
    flag_incomplete_impressions(c);
    return c;
}

}  // namespace

TEST_CASE("property: record populations and membership oracle")
{
    std::mt19937_64 rng(31);
    auto c = random_corpus(rng, 150);
    SourceContext ctx(c);
    auto pairs = extract_pairs(c, false);
    auto records = assign_scenarios(pairs, ctx);

    std::map<std::pair<std::size_t, int>, std::pair<std::size_t, std::size_t>> counts;
    for (const auto& r : records) {
        auto& [q, a] = counts[{r.session_index, r.position}];
        (r.origin == TermOrigin::QueryTerm ? q : a) += 1;
        CHECK((r.origin == TermOrigin::AddedTerm) == (r.action == TermAction::Added));
        CHECK(r.scenario == scenario_index(r.membership));

        // Independent membership check straight on the predecessor impression.
        const auto& imp = c.sessions[r.session_index].impressions[static_cast<std::size_t>(r.position - 1)];
        bool ncs = false;
        bool cs = false;
        bool cd = false;
        for (const auto& res : imp.results) {
            bool in_snippet = res.terms.contains(r.term);
            if (imp.clicked(res.rank)) {
                cs = cs || in_snippet;
                auto text = normalize(c.docstore->at(res.docid), c.normalization);
                cd = cd || text.contains(r.term);
            } else {
                ncs = ncs || in_snippet;
            }
        }
        CHECK(r.membership == Membership{ncs, cs, cd});
    }
    for (const auto& p : pairs) {
        auto it = counts.find({p.session_index, p.position});
        REQUIRE(it != counts.end());
        CHECK(it->second.first == p.qn.size());
        CHECK(it->second.second == p.added.size());
    }

    auto clicks = click_outcome_eval(records);
    for (int s : kEvaluatedScenarios) {
        for (auto action : {TermAction::Retained, TermAction::Removed, TermAction::Added}) {
            std::size_t expected = 0;
            for (const auto& r : records) {
                expected += r.scenario == s && r.action == action ? 1 : 0;
            }
            const auto& cell = clicks.at(std::to_string(s), std::string(to_string(action)));
            CHECK(cell.population.value_or(0) == expected);
            if (cell.value) {
                CHECK(*cell.value >= 0.0);
                CHECK(*cell.value <= 100.0);
            }
        }
    }
    auto retention = retention_by_scenario(records);
    for (const auto& row : retention.rows()) {
        CHECK(*retention.value(row, "retained") + *retention.value(row, "removed") == doctest::Approx(1.0));
    }
}

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "reform/errors.hpp"
#include "reform/ireval.hpp"

#include "support.hpp"

using namespace reform;
using namespace reform::testing;

TEST_CASE("NDCG examples")
{
    std::vector<int> pool{4, 0};
    CHECK(ndcg_at_k(std::vector<int>{4, 0}, pool) == doctest::Approx(1.0));
    CHECK(ndcg_at_k(std::vector<int>{0, 4}, pool) == doctest::Approx(1.0 / std::log2(3.0)));
    CHECK(ndcg_at_k(std::vector<int>{0, 4}, pool) == doctest::Approx(0.631).epsilon(1e-3));
    CHECK(ndcg_at_k(std::vector<int>{0, 0}, std::vector<int>{0, 0}) == 0.0);
    // Relevant documents below the cutoff earn nothing.
    CHECK(ndcg_at_k(std::vector<int>{0, 4}, pool, 1) == 0.0);
}

TEST_CASE("NERR examples")
{
    CHECK(nerr_at_k(std::vector<int>{4}, std::vector<int>{4}) == doctest::Approx(1.0));
    CHECK(nerr_at_k(std::vector<int>{0, 4}, std::vector<int>{4, 0}) == doctest::Approx(0.5));
    CHECK(nerr_at_k(std::vector<int>{0, 0, 0}, std::vector<int>{4}) == 0.0);
}

TEST_CASE("average precision examples")
{
    CHECK(average_precision(std::vector<int>{1, 0, 2}, 2) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
    CHECK(average_precision(std::vector<int>{0, 0}, 3) == 0.0);
    CHECK(average_precision(std::vector<int>{3, 1, 2}, 3) == doctest::Approx(1.0));
    CHECK(average_precision(std::vector<int>{3}, 0) == 0.0);
}

TEST_CASE("property: the descending-grade order maximizes NDCG and NERR")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> grades(1 + rng() % 4);
        for (auto& g : grades) {
            g = static_cast<int>(rng() % 5);
        }
        const auto& pool = grades;
        auto best = grades;
        std::sort(best.begin(), best.end(), std::greater<>());
        double best_ndcg = ndcg_at_k(best, pool);
        double best_nerr = nerr_at_k(best, pool);
        bool any_relevant = best.front() > 0;
        CHECK(best_ndcg == doctest::Approx(any_relevant ? 1.0 : 0.0));
        CHECK(best_nerr == doctest::Approx(any_relevant ? 1.0 : 0.0));
        auto perm = grades;
        std::sort(perm.begin(), perm.end());
        do {
            double n = ndcg_at_k(perm, pool);
            double e = nerr_at_k(perm, pool);
            CHECK(n <= best_ndcg + 1e-12);
            CHECK(e <= best_nerr + 1e-12);
            CHECK(n >= 0.0);
            CHECK(e >= 0.0);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
}

TEST_CASE("property: AP equals a brute-force evaluation")
{
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<int> grades(1 + rng() % 8);
        for (auto& g : grades) {
            g = static_cast<int>(rng() % 2);
        }
        auto retrieved = static_cast<std::size_t>(std::count(grades.begin(), grades.end(), 1));
        auto total = retrieved + rng() % 3;
        double sum = 0.0;
        for (std::size_t r = 0; r < grades.size(); ++r) {
            if (grades[r] == 0) {
                continue;
            }
            double hits = 0.0;
            for (std::size_t i = 0; i <= r; ++i) {
                hits += grades[i];
            }
            sum += hits / static_cast<double>(r + 1);
        }
        double expected = total == 0 ? 0.0 : sum / static_cast<double>(total);
        CHECK(average_precision(grades, total) == doctest::Approx(expected).epsilon(1e-12));
    }
}

namespace {

/// Two-query session on topic "t" whose rankings hold the given docids.
auto judged_corpus(const std::vector<std::string>& first, const std::vector<std::string>& second) -> Corpus
{
    auto results = [](const std::vector<std::string>& ids) {
        std::vector<ResultSpec> out;
        for (const auto& id : ids) {
            out.push_back({"snippet " + id, id});
        }
        return out;
    };
    auto s = session("s", {impression(1, "a b", results(first), {1}), impression(2, "a c", results(second), {})});
    s.topic_id = "t";
    auto c = corpus({s});
    RelevanceJudgments q;
    q.set("t", "good", 4);
    q.set("t", "ok", 1);
    q.set("t", "bad", 0);
    c.qrels = q;
    return c;
}

}  // namespace

TEST_CASE("impression grades join rankings with judgments")
{
    auto c = judged_corpus({"bad", "good", "unjudged"}, {"good"});
    const auto& s = c.sessions[0];
    auto grades = impression_grades(s, s.impressions[0], *c.qrels);
    REQUIRE(grades);
    CHECK(*grades == std::vector<int>{0, 4, 0});
    auto m = evaluate_impression(s, s.impressions[1], *c.qrels);
    REQUIRE(m);
    // Ideal pool {4, 1, 0}: the single-document ranking misses the grade-1 document.
    double ideal = 15.0 + 1.0 / std::log2(3.0);
    CHECK(m->ndcg == doctest::Approx(15.0 / ideal));
    CHECK(m->ap == doctest::Approx(0.5));

    auto untopiced = s;
    untopiced.topic_id.reset();
    CHECK_FALSE(impression_grades(untopiced, s.impressions[0], *c.qrels));
}

TEST_CASE("metric tables need judgments")
{
    auto c = judged_corpus({"bad"}, {"good"});
    c.qrels.reset();
    CHECK_THROWS_AS((void)metrics_by_position(c), EmptyInputError);
    CHECK_THROWS_AS((void)scenario_metric_eval({}, c), EmptyInputError);
}

TEST_CASE("metrics_by_position")
{
    auto c = judged_corpus({"bad", "good"}, {"good", "bad"});
    auto t = metrics_by_position(c);
    CHECK(t.rows() == std::vector<std::string>{"1", "2"});
    CHECK(t.value("2", "NDCG@10") > t.value("1", "NDCG@10"));
    CHECK(t.value("2", "MAP") == doctest::Approx(0.5));
    CHECK(t.columns() == std::vector<std::string>{"NERR@10", "NDCG@10", "MAP"});
}

TEST_CASE("property: swapping q_n and q_n+1 negates every delta")
{
    const std::vector<std::string> ids{"good", "ok", "bad", "x1", "x2"};
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 200; ++trial) {
        auto pick = [&]() {
            auto v = ids;
            std::shuffle(v.begin(), v.end(), rng);
            v.resize(1 + rng() % v.size());
            return v;
        };
        auto a = pick();
        auto b = pick();
        auto forward = judged_corpus(a, b);
        auto backward = judged_corpus(b, a);
        const auto& fs = forward.sessions[0];
        const auto& bs = backward.sessions[0];
        auto f0 = *evaluate_impression(fs, fs.impressions[0], *forward.qrels);
        auto f1 = *evaluate_impression(fs, fs.impressions[1], *forward.qrels);
        auto b0 = *evaluate_impression(bs, bs.impressions[0], *backward.qrels);
        auto b1 = *evaluate_impression(bs, bs.impressions[1], *backward.qrels);
        CHECK(f1.ndcg - f0.ndcg == doctest::Approx(-(b1.ndcg - b0.ndcg)));
        CHECK(f1.nerr - f0.nerr == doctest::Approx(-(b1.nerr - b0.nerr)));
        CHECK(f1.ap - f0.ap == doctest::Approx(-(b1.ap - b0.ap)));
        for (double v : {f0.ndcg, f0.nerr, f0.ap}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("scenario_metric_eval on hand-built records")
{
    // Three sessions improving from "bad" to "good" and one all-zero cell.
    std::vector<Session> sessions;
    for (int i = 0; i < 3; ++i) {
        auto s = session("s" + std::to_string(i),
                         {impression(1, "a", {{"a", "bad"}}, {}), impression(2, "a", {{"a", "good"}}, {})});
        s.topic_id = "t";
        sessions.push_back(s);
    }
    auto c = corpus(sessions);
    RelevanceJudgments q;
    q.set("t", "good", 4);
    q.set("t", "bad", 0);
    c.qrels = q;
    c.docstore = DocumentStore{};

    std::vector<ScenarioRecord> records;
    for (std::size_t i = 0; i < 3; ++i) {
        ScenarioRecord r;
        r.term = "a";
        r.session_index = i;
        r.position = 1;
        r.membership = {true, false, false};
        r.scenario = 5;
        r.action = TermAction::Retained;
        records.push_back(r);
    }
    auto t = scenario_metric_eval(records, c);
    CHECK(t.value("retained/5", "NDCG@10") == doctest::Approx(1.0));
    CHECK(t.at("retained/5", "NDCG@10").note == "▲");
    // Three positive deltas: exact p = 2/8.
    CHECK(t.at("retained/5", "NDCG@10").p_value == doctest::Approx(0.25));
    CHECK_FALSE(t.at("retained/5", "NDCG@10").significant);
    CHECK_FALSE(t.value("removed/1", "MAP").has_value());
    CHECK(t.rows().size() == 18);
}

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "doctest.h"

#include "reform/errors.hpp"
#include "reform/similarity.hpp"

#include "support.hpp"

using namespace reform;
using namespace reform::testing;

TEST_CASE("jaccard examples")
{
    CHECK(jaccard(set({"gun", "control", "current", "affairs"}), set({"gun", "violence", "us"}))
          == doctest::Approx(1.0 / 6.0));
    CHECK(jaccard(set({"a", "b"}), set({"a", "b"})) == 1.0);
    CHECK(jaccard(set({"x"}), set({"a", "b", "x"})) == doctest::Approx(1.0 / 3.0));
    CHECK(jaccard(TermSet{}, TermSet{}) == 1.0);
    CHECK(jaccard(set({"a"}), TermSet{}) == 0.0);
}

TEST_CASE("cosine_tf examples")
{
    CHECK(cosine_tf(bag({"gun", "control", "current", "affairs"}), bag({"gun", "violence", "us"}))
          == doctest::Approx(1.0 / (2.0 * std::sqrt(3.0))));
    auto a = bag({"a", "a", "b"});
    CHECK(cosine_tf(a, a) == doctest::Approx(1.0));
    CHECK(cosine_tf(bag({"a"}), bag({"b"})) == 0.0);
    CHECK(cosine_tf(TermBag{}, a) == 0.0);
}

namespace {

auto two_snippet_stats() -> CollectionStats
{
    std::vector<TermBag> docs{bag({"a", "b", "x"}), bag({"a", "c"})};
    return CollectionStats::from_instances(SourceKind::AllSnippets, docs);
}

}  // namespace

TEST_CASE("collection statistics")
{
    auto stats = two_snippet_stats();
    CHECK(stats.document_count == 2);
    CHECK(stats.avgdl == doctest::Approx(2.5));
    CHECK(stats.document_frequency("a") == 2);
    CHECK(stats.document_frequency("x") == 1);
    CHECK(stats.document_frequency("zzz") == 0);
    CHECK(stats.tfidf_idf("a") == 0.0);
    CHECK(stats.tfidf_idf("x") == doctest::Approx(std::log(2.0)));
    CHECK(stats.tfidf_idf("zzz") == 0.0);
    CHECK(stats.tfidf_idf("x", TfidfIdf::Smooth) == doctest::Approx(std::log(3.0)));
    CHECK(stats.bm25_idf("a", Bm25Idf::Robertson) < 0.0);
    CHECK(stats.bm25_idf("a") > 0.0);
}

TEST_CASE("cosine_tfidf examples")
{
    auto stats = two_snippet_stats();
    CHECK(cosine_tfidf(bag({"x"}), bag({"a", "b", "x"}), stats) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(cosine_tfidf(bag({"a"}), bag({"a"}), stats) == 0.0);
    CHECK(cosine_tfidf(bag({"x", "a"}), bag({"x", "a"}), stats) == doctest::Approx(1.0));
}

TEST_CASE("bm25 examples")
{
    auto stats = two_snippet_stats();
    double expected = std::log(2.0) * 2.2 / (1.0 + 1.2 * (0.25 + 0.75 * 1.2));
    CHECK(bm25(set({"x"}), bag({"a", "b", "x"}), stats) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(bm25(set({"x"}), bag({"a", "b", "x"}), stats) == doctest::Approx(0.6406).epsilon(1e-4));
    CHECK(bm25(set({"q"}), bag({"a", "b", "x"}), stats) == 0.0);

    // Doubling every document length and avgdl keeps dl/avgdl fixed.
    std::vector<TermBag> doubled{bag({"a", "b", "x", "p", "q", "r"}), bag({"a", "c", "s", "t"})};
    auto stats2 = CollectionStats::from_instances(SourceKind::AllSnippets, doubled);
    CHECK(stats2.avgdl == doctest::Approx(5.0));
    CHECK(bm25(set({"x"}), doubled[0], stats2) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("build_stats over a corpus")
{
    auto c = corpus({session("s1", {impression(1, "q", {{"a b x"}, {"a c"}}, {1}), test_query(2, "r")}, true)});
    auto stats = build_stats(c, SourceKind::AllSnippets);
    CHECK(stats.document_count == 2);
    CHECK(stats.avgdl == doctest::Approx(2.5));
    CHECK(stats.document_frequency("a") == 2);
    CHECK(build_stats(c, SourceKind::ClickedSnippets).document_count == 1);
    CHECK(build_stats(c, SourceKind::Impression).document_count == 1);
    CHECK_THROWS_AS((void)build_stats(c, SourceKind::ClickedDocuments), MissingDocstoreError);
    CHECK_THROWS_AS((void)build_stats(c, SourceKind::AllDocuments), MissingDocstoreError);
}

namespace {

using Tokens = std::vector<std::string>;

auto random_tokens(std::mt19937_64& rng, std::size_t max_len) -> Tokens
{
    static const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g", "h"};
    Tokens out;
    auto n = rng() % (max_len + 1);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(vocab[rng() % vocab.size()]);
    }
    return out;
}

auto to_bag(const Tokens& tokens) -> TermBag
{
    TermBag b;
    for (const auto& t : tokens) {
        b.add(t);
    }
    return b;
}

// Reference implementations over plain token lists.
auto brute_jaccard(const Tokens& x, const Tokens& y) -> double
{
    Tokens ux = x;
    Tokens uy = y;
    std::sort(ux.begin(), ux.end());
    ux.erase(std::unique(ux.begin(), ux.end()), ux.end());
    std::sort(uy.begin(), uy.end());
    uy.erase(std::unique(uy.begin(), uy.end()), uy.end());
    if (ux.empty() && uy.empty()) {
        return 1.0;
    }
    std::size_t inter = 0;
    for (const auto& t : ux) {
        inter += static_cast<std::size_t>(std::count(uy.begin(), uy.end(), t));
    }
    return static_cast<double>(inter) / static_cast<double>(ux.size() + uy.size() - inter);
}

auto brute_cosine(const Tokens& x, const Tokens& y) -> double
{
    std::unordered_map<std::string, double> cx;
    std::unordered_map<std::string, double> cy;
    for (const auto& t : x) {
        cx[t] += 1;
    }
    for (const auto& t : y) {
        cy[t] += 1;
    }
    double dot = 0.0;
    double nx = 0.0;
    double ny = 0.0;
    for (const auto& [t, v] : cx) {
        nx += v * v;
        if (auto it = cy.find(t); it != cy.end()) {
            dot += v * it->second;
        }
    }
    for (const auto& [t, v] : cy) {
        ny += v * v;
    }
    if (nx == 0.0 || ny == 0.0) {
        return 0.0;
    }
    return dot / (std::sqrt(nx) * std::sqrt(ny));
}

}  // namespace

TEST_CASE("property: jaccard and cosine_tf match a brute-force oracle")
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 5000; ++i) {
        auto x = random_tokens(rng, 6);
        auto y = random_tokens(rng, 6);
        auto bx = to_bag(x);
        auto by = to_bag(y);
        CHECK(jaccard(bx, by) == doctest::Approx(brute_jaccard(x, y)).epsilon(1e-15));
        CHECK(cosine_tf(bx, by) == doctest::Approx(brute_cosine(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("property: symmetry, bounds and scale invariance")
{
    std::mt19937_64 rng(6);
    for (int i = 0; i < 3000; ++i) {
        auto bx = to_bag(random_tokens(rng, 10));
        auto by = to_bag(random_tokens(rng, 10));
        CHECK(jaccard(bx, by) == jaccard(by, bx));
        CHECK(cosine_tf(bx, by) == doctest::Approx(cosine_tf(by, bx)).epsilon(1e-15));
        for (double v : {jaccard(bx, by), cosine_tf(bx, by)}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }
        auto c = static_cast<std::uint32_t>(1 + rng() % 7);
        TermBag scaled;
        for (const auto& [t, n] : bx.counts()) {
            scaled.add(t, n * c);
        }
        CHECK(std::abs(cosine_tf(scaled, by) - cosine_tf(bx, by)) <= 1e-12);

        std::vector<TermBag> docs{bx, by, to_bag(random_tokens(rng, 10))};
        auto stats = CollectionStats::from_instances(SourceKind::AllSnippets, docs);
        auto t = cosine_tfidf(bx, by, stats);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0 + 1e-12);
        CHECK(bm25(bx.set(), by, stats) >= 0.0);
    }
}

TEST_CASE("property: bm25 is monotone in matched term frequency at fixed document length")
{
    // Growing the document as well would let length normalization pull the
    // other matched terms down, so one unmatched "pad" occurrence is swapped
    // for the matched term instead.
    std::mt19937_64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        auto tokens = random_tokens(rng, 10);
        tokens.push_back("a");
        tokens.push_back("pad");
        std::vector<TermBag> docs{to_bag(tokens), to_bag(random_tokens(rng, 10)), to_bag(random_tokens(rng, 10))};
        auto stats = CollectionStats::from_instances(SourceKind::AllSnippets, docs);
        auto query = to_bag(random_tokens(rng, 3)).set();
        query.insert("a");
        auto before = bm25(query, docs[0], stats);
        auto swapped = tokens;
        swapped.back() = "a";
        auto more = to_bag(swapped);
        CHECK(more.length() == docs[0].length());
        CHECK(bm25(query, more, stats) >= before - 1e-12);
    }
}

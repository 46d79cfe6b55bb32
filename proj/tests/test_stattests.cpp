#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "reform/stattests.hpp"

#include "reference.hpp"

using namespace reform;
using namespace reform::testing;

TEST_CASE("Welch t-test matches the reference table")
{
    for (const auto& row : kWelch) {
        auto r = welch_t(row.a, row.b);
        REQUIRE(r.has_value());
        CHECK(r->method == "welch");
        CHECK(r->statistic == doctest::Approx(row.t).epsilon(1e-9));
        if (row.p > 1e-12) {
            CHECK(r->p_value == doctest::Approx(row.p).epsilon(1e-8));
        } else {
            CHECK(r->p_value < 1e-6);
        }
    }
}

TEST_CASE("Welch edge cases")
{
    std::vector<double> a{1, 2, 3, 4};
    auto same = welch_t(a, a);
    REQUIRE(same);
    CHECK(same->statistic == 0.0);
    CHECK(same->p_value == doctest::Approx(1.0));
    std::vector<double> one{1};
    CHECK_FALSE(welch_t(one, a).has_value());
    std::vector<double> flat{2, 2, 2};
    CHECK_FALSE(welch_t(flat, flat).has_value());
}

TEST_CASE("property: Welch symmetry and scale invariance")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 500; ++i) {
        std::vector<double> a(2 + rng() % 20);
        std::vector<double> b(2 + rng() % 20);
        for (auto& x : a) {
            x = normal(rng);
        }
        for (auto& x : b) {
            x = normal(rng) + 0.5;
        }
        auto ab = welch_t(a, b);
        auto ba = welch_t(b, a);
        REQUIRE(ab);
        REQUIRE(ba);
        CHECK(ab->p_value == doctest::Approx(ba->p_value).epsilon(1e-12));
        CHECK(ab->statistic == doctest::Approx(-ba->statistic).epsilon(1e-12));
        CHECK(ab->p_value >= 0.0);
        CHECK(ab->p_value <= 1.0);
        double c = 0.01 + static_cast<double>(rng() % 1000);
        auto sa = a;
        auto sb = b;
        for (auto& x : sa) {
            x *= c;
        }
        for (auto& x : sb) {
            x *= c;
        }
        CHECK(std::abs(welch_t(sa, sb)->p_value - ab->p_value) <= 1e-10);
    }
}

TEST_CASE("Wilcoxon examples")
{
    std::vector<double> zeros{0, 0, 0};
    auto z = wilcoxon_signed_rank(zeros);
    CHECK(z.p_value == 1.0);
    CHECK(z.n_effective == 0);

    std::vector<double> five{1, 2, 3, 4, 5};
    auto r = wilcoxon_signed_rank(five);
    CHECK(r.method == "wilcoxon-exact");
    CHECK(r.statistic == 15.0);
    CHECK(r.p_value == doctest::Approx(0.0625).epsilon(1e-12));

    std::vector<double> mirrored{-1.5, 1.5, -4, 4};
    CHECK(wilcoxon_signed_rank(mirrored).p_value == doctest::Approx(1.0));

    std::vector<double> with_zeros{0, 1, 0, 2, 3, 4, 5};
    auto w = wilcoxon_signed_rank(with_zeros);
    CHECK(w.n_effective == 5);
    CHECK(w.p_value == doctest::Approx(0.0625));
}

TEST_CASE("Wilcoxon normal path matches the reference table")
{
    std::ifstream in(REFORM_TEST_DATA "/wilcoxon_normal.txt");
    REQUIRE(in);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        double p_cc = 0.0;
        double p_nc = 0.0;
        fields >> p_cc >> p_nc;
        std::vector<double> sample;
        for (double x = 0.0; fields >> x;) {
            sample.push_back(x);
        }
        REQUIRE(sample.size() >= 30);
        auto cc = wilcoxon_signed_rank(sample);
        CHECK(cc.method == "wilcoxon-normal");
        CHECK(cc.p_value == doctest::Approx(p_cc).epsilon(1e-9));
        auto nc = wilcoxon_signed_rank(sample, {.continuity = false});
        CHECK(nc.p_value == doctest::Approx(p_nc).epsilon(1e-9));
        ++rows;
    }
    CHECK(rows == 5);
}

TEST_CASE("property: exact Wilcoxon equals brute-force sign enumeration")
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> deltas(1 + rng() % 12);
        for (auto& d : deltas) {
            // Small integer range forces ties and zeros.
            d = static_cast<double>(static_cast<int>(rng() % 9) - 4);
        }
        CAPTURE(deltas.size());
        CHECK(wilcoxon_signed_rank(deltas).p_value == doctest::Approx(brute_force_wilcoxon(deltas)).epsilon(1e-12));
    }
}

TEST_CASE("property: exact and normal paths agree for n = 20..25")
{
    std::mt19937_64 rng(10);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> deltas(20 + rng() % 6);
        double shift = 0.1 * static_cast<double>(rng() % 8);
        for (auto& d : deltas) {
            d = normal(rng) + shift;
        }
        auto exact = wilcoxon_signed_rank(deltas);
        auto approx = wilcoxon_signed_rank(deltas, {.exact_max = 0});
        CHECK(exact.method == "wilcoxon-exact");
        CHECK(approx.method == "wilcoxon-normal");
        worst = std::max(worst, std::abs(exact.p_value - approx.p_value));
    }
    CHECK(worst <= 0.02);
}

TEST_CASE("property: Wilcoxon p-values are scale invariant and bounded")
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> normal;
    for (int i = 0; i < 300; ++i) {
        std::vector<double> deltas(1 + rng() % 60);
        for (auto& d : deltas) {
            d = normal(rng);
        }
        auto base = wilcoxon_signed_rank(deltas);
        CHECK(base.p_value >= 0.0);
        CHECK(base.p_value <= 1.0);
        for (auto& d : deltas) {
            d *= 37.5;
        }
        CHECK(std::abs(wilcoxon_signed_rank(deltas).p_value - base.p_value) <= 1e-10);
    }
}

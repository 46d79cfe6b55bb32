#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "reform/actions.hpp"
#include "reform/scenarios.hpp"
#include "reform/sources.hpp"
#include "reform/synthgen.hpp"

namespace reform::testing {

/// One measured statistic next to its closed-form expectation.
struct Recovery {
    std::string name;
    double expected = 0.0;
    double measured = 0.0;
    /// Standard error of `measured`, clustered by session.
    double se = 0.0;
    std::size_t n = 0;

    [[nodiscard]] auto z() const -> double
    {
        if (se > 0.0) {
            return (measured - expected) / se;
        }
        return measured == expected ? 0.0 : INFINITY;
    }
    [[nodiscard]] auto within(double k) const -> bool
    {
        // An exactly determined statistic (se = 0) must match to rounding.
        if (se == 0.0) {
            return std::abs(measured - expected) <= 1e-12;
        }
        return std::abs(z()) <= k;
    }
};

/// Ratio mean sum(y) / sum(w) with a cluster-robust standard error, clusters
/// being sessions: observations within a session share its click states and
/// query history, so they are not independent.
class ClusteredMean {
  public:
    void add(std::size_t cluster, double y, double w = 1.0)
    {
        auto& c = clusters_[cluster];
        c.first += y;
        c.second += w;
    }
    [[nodiscard]] auto mean() const -> double
    {
        double y = 0.0;
        double w = 0.0;
        for (const auto& [_, c] : clusters_) {
            y += c.first;
            w += c.second;
        }
        return w > 0 ? y / w : 0.0;
    }
    [[nodiscard]] auto se() const -> double
    {
        auto g = static_cast<double>(clusters_.size());
        if (g < 2) {
            return 0.0;
        }
        double m = mean();
        double w = 0.0;
        double ss = 0.0;
        for (const auto& [_, c] : clusters_) {
            w += c.second;
            double r = c.first - m * c.second;
            ss += r * r;
        }
        return std::sqrt(g / (g - 1.0) * ss) / w;
    }
    [[nodiscard]] auto weight() const -> double
    {
        double w = 0.0;
        for (const auto& [_, c] : clusters_) {
            w += c.second;
        }
        return w;
    }

  private:
    std::map<std::size_t, std::pair<double, double>> clusters_;
};

struct RecoveryRun {
    std::size_t pairs = 0;
    std::vector<Recovery> stats;
    /// cd minus ncd on Jaccard, Cosine and BM25 in the source comparison.
    std::array<double, 3> cd_margin{};
};

/// Generates `spec`, measures term-action means over all pairs and scenario
/// shares over the scenario records, and compares them with the closed form.
inline auto measure_recovery(const GeneratorSpec& spec, bool with_sources = true) -> RecoveryRun
{
    auto corpus = generate(spec);
    auto expected = expected_statistics(spec, true);
    RecoveryRun run;

    auto pairs = extract_pairs(corpus, true);
    run.pairs = pairs.size();
    ClusteredMean retained;
    ClusteredMean removed;
    ClusteredMean added;
    for (const auto& p : pairs) {
        retained.add(p.session_index, static_cast<double>(p.retained.size()));
        removed.add(p.session_index, static_cast<double>(p.removed.size()));
        added.add(p.session_index, static_cast<double>(p.added.size()));
    }
    auto push = [&](const std::string& name, const ClusteredMean& m) {
        run.stats.push_back({name, expected.at(name), m.mean(), m.se(), static_cast<std::size_t>(m.weight())});
    };
    push("retained", retained);
    push("removed", removed);
    push("added", added);

    SourceContext ctx(corpus);
    auto records = assign_scenarios(extract_pairs(corpus, false), ctx);
    for (auto origin : {TermOrigin::QueryTerm, TermOrigin::AddedTerm}) {
        std::array<ClusteredMean, 8> share;
        for (const auto& r : records) {
            if (r.origin != origin) {
                continue;
            }
            for (int s = 1; s <= 8; ++s) {
                share[static_cast<std::size_t>(s - 1)].add(r.session_index, r.scenario == s ? 1.0 : 0.0);
            }
        }
        auto prefix = origin == TermOrigin::QueryTerm ? std::string("query_scenario_") : std::string("added_scenario_");
        for (int s = 1; s <= 8; ++s) {
            push(prefix + std::to_string(s), share[static_cast<std::size_t>(s - 1)]);
        }
    }
    std::array<ClusteredMean, 8> kept;
    for (const auto& r : records) {
        if (r.origin == TermOrigin::QueryTerm) {
            kept[static_cast<std::size_t>(r.scenario - 1)].add(r.session_index,
                                                               r.action == TermAction::Retained ? 1.0 : 0.0);
        }
    }
    for (int s = 1; s <= 8; ++s) {
        auto name = "retention_" + std::to_string(s);
        const auto& m = kept[static_cast<std::size_t>(s - 1)];
        // Scenarios seen in fewer than 30 clusters give no usable standard error.
        if (expected.contains(name) && m.weight() >= 30) {
            push(name, m);
        }
    }

    if (with_sources) {
        auto table = source_comparison(pairs, ctx);
        std::size_t i = 0;
        for (const auto* m : {"Jaccard", "Cosine", "BM25"}) {
            run.cd_margin[i++] = table.value("cd", m).value_or(0.0) - table.value("ncd", m).value_or(0.0);
        }
    }
    return run;
}

}  // namespace reform::testing

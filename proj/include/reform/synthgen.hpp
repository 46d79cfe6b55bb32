#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "reform/corpus.hpp"

namespace reform {

/// Counter-based generator: value k of a stream is splitmix64's finalizer
/// applied to key + k * gamma, where key depends only on (seed, stream).
/// See docs/synthgen.md for the exact definition.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    auto next() noexcept -> std::uint64_t;
    /// Uniform on [0, 1) with 53 random bits.
    auto uniform() noexcept -> double;
    /// Uniform integer on [0, n); n must be positive.
    auto below(std::uint64_t n) noexcept -> std::uint64_t;
    auto bernoulli(double p) noexcept -> bool { return uniform() < p; }

    static auto mix(std::uint64_t z) noexcept -> std::uint64_t;

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

struct IntRange {
    int min = 1;
    int max = 1;
};

/// Probabilities of planting a term into one random instance of each source.
struct Planting {
    double ncs = 0.0;
    double cs = 0.0;
    double cd = 0.0;
    double ncd = 0.0;
};

struct ClickSpec {
    /// Click probability at rank r is base * decay^(r-1) unless `probs` is set.
    double base = 0.6;
    double decay = 0.7;
    std::vector<double> probs;

    [[nodiscard]] auto at(int rank) const -> double;
};

struct JudgmentSpec {
    bool enabled = false;
    /// Share of results judged relevant; their grade is uniform on 1..max_grade.
    double relevant_prob = 0.3;
    int max_grade = 4;
};

struct GeneratorSpec {
    std::uint64_t seed = 1;
    int sessions = 100;
    /// Number of queries per session, uniform; includes the test query.
    IntRange session_length{2, 6};
    /// Query tokens are q0..q{V-1}; filler tokens f0..f{F-1}.
    int vocabulary_size = 5000;
    int filler_vocabulary_size = 2000;
    /// Length of the first query, uniform.
    IntRange query_length{3, 3};
    /// Probability a query term survives into the next query.
    double p_keep = 2.0 / 3.0;
    /// Per-scenario override of p_keep, indexed by scenario - 1.
    std::optional<std::array<double, 8>> keep_by_scenario;
    /// Probability a surviving term is swapped for a fresh one.
    double drift = 0.0;
    /// Expected fresh terms added per step, spread over `add_slots` Bernoulli slots.
    double add_rate = 1.0;
    int add_slots = 3;
    Planting added_planting;
    Planting query_planting;
    int results_per_impression = 10;
    ClickSpec click;
    int snippet_length = 20;
    int document_length = 200;
    double mean_dwell = 35.0;
    bool test_query = false;
    JudgmentSpec judgments;
    /// Zero every grade of an impression following the retention of a scenario-8 term.
    bool degrade_after_scenario8_retention = false;
    /// Documents repeat their snippet text (breaks independent planting).
    bool documents_contain_snippets = false;
};

/// Throws SpecError naming the offending field.
void validate(const GeneratorSpec& spec);

/// Parses the JSON form (fields as in GeneratorSpec); unknown fields and type
/// errors are SpecErrors naming the field.
[[nodiscard]] auto parse_generator_spec(std::string_view json_text) -> GeneratorSpec;
[[nodiscard]] auto load_generator_spec(const std::filesystem::path& path) -> GeneratorSpec;

/// Deterministic corpus with docstore (and qrels when judgments are enabled).
[[nodiscard]] auto generate(const GeneratorSpec& spec) -> Corpus;

/// Closed-form expectations of the statistics the generator plants.
///
/// Keys: `retained`, `removed`, `added` (per pair, pairs ending in a test
/// query counted iff `include_test_queries`), `query_scenario_s` and
/// `added_scenario_s` (share of records in scenario s), `retention_s`
/// (retained share of query terms in scenario s, present when scenario s can
/// occur). Specs outside the independent planting regime raise SpecError.
[[nodiscard]] auto expected_statistics(const GeneratorSpec& spec, bool include_test_queries = true)
    -> std::map<std::string, double>;

}  // namespace reform

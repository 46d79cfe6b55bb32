#include "reform/synthgen.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "reform/errors.hpp"
#include "reform/textnorm.hpp"

namespace reform {

using nlohmann::json;

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix(seed + kGamma * (stream + 1)))
{
}

auto CounterRng::mix(std::uint64_t z) noexcept -> std::uint64_t
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

auto CounterRng::next() noexcept -> std::uint64_t
{
    ++counter_;
    return mix(key_ + kGamma * counter_);
}

auto CounterRng::uniform() noexcept -> double
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

auto CounterRng::below(std::uint64_t n) noexcept -> std::uint64_t
{
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
}

auto ClickSpec::at(int rank) const -> double
{
    if (!probs.empty()) {
        auto i = static_cast<std::size_t>(rank - 1);
        return i < probs.size() ? probs[i] : 0.0;
    }
    return base * std::pow(decay, rank - 1);
}

namespace {

void check_probability(double p, const std::string& field)
{
    if (!(p >= 0.0 && p <= 1.0)) {
        throw SpecError("field '" + field + "': probability must lie in [0, 1]");
    }
}

void check_range(const IntRange& r, int lowest, const std::string& field)
{
    if (r.min < lowest || r.max < r.min) {
        throw SpecError("field '" + field + "': need " + std::to_string(lowest) + " <= min <= max");
    }
}

void check_planting(const Planting& p, const std::string& field)
{
    check_probability(p.ncs, field + ".ncs");
    check_probability(p.cs, field + ".cs");
    check_probability(p.cd, field + ".cd");
    check_probability(p.ncd, field + ".ncd");
}

/// Largest query a spec can produce: the first query plus every add slot firing.
auto max_query_size(const GeneratorSpec& spec) -> long
{
    return static_cast<long>(spec.query_length.max)
        + static_cast<long>(spec.session_length.max - 1) * static_cast<long>(spec.add_slots);
}

}  // namespace

void validate(const GeneratorSpec& spec)
{
    if (spec.sessions < 1) {
        throw SpecError("field 'sessions': must be at least 1");
    }
    check_range(spec.session_length, spec.test_query ? 2 : 1, "session_length");
    if (spec.vocabulary_size < 1) {
        throw SpecError("field 'vocabulary_size': the query vocabulary must not be empty");
    }
    check_range(spec.query_length, 0, "query_length");
    check_probability(spec.p_keep, "p_keep");
    if (spec.keep_by_scenario) {
        for (std::size_t i = 0; i < 8; ++i) {
            check_probability((*spec.keep_by_scenario)[i], "keep_by_scenario[" + std::to_string(i) + "]");
        }
    }
    check_probability(spec.drift, "drift");
    if (spec.add_slots < 0) {
        throw SpecError("field 'add_slots': must be non-negative");
    }
    if (!(spec.add_rate >= 0.0 && spec.add_rate <= spec.add_slots)) {
        throw SpecError("field 'add_rate': must lie in [0, add_slots]");
    }
    check_planting(spec.added_planting, "added_planting");
    check_planting(spec.query_planting, "query_planting");
    if (spec.results_per_impression < 1) {
        throw SpecError("field 'results_per_impression': must be at least 1");
    }
    for (int r = 1; r <= spec.results_per_impression; ++r) {
        check_probability(spec.click.at(r), "click");
    }
    if (spec.snippet_length < 0 || spec.document_length < 0) {
        throw SpecError("field 'snippet_length'/'document_length': must be non-negative");
    }
    if ((spec.snippet_length > 0 || spec.document_length > 0) && spec.filler_vocabulary_size < 1) {
        throw SpecError("field 'filler_vocabulary_size': must be positive when snippets or documents have filler");
    }
    if (!(spec.mean_dwell >= 0.0)) {
        throw SpecError("field 'mean_dwell': must be non-negative");
    }
    check_probability(spec.judgments.relevant_prob, "judgments.relevant_prob");
    if (spec.judgments.max_grade < 1 || spec.judgments.max_grade > 4) {
        throw SpecError("field 'judgments.max_grade': must lie in [1, 4]");
    }
    if (static_cast<long>(spec.vocabulary_size) <= 2 * max_query_size(spec)) {
        throw SpecError("field 'vocabulary_size': must exceed twice the largest possible query ("
                        + std::to_string(max_query_size(spec)) + " terms)");
    }
}

namespace {

template <typename T>
void read_field(const json& obj, const char* name, T& out, const std::string& prefix = {})
{
    if (!obj.contains(name)) {
        return;
    }
    try {
        out = obj.at(name).get<T>();
    } catch (const json::exception&) {
        throw SpecError("field '" + prefix + name + "': wrong type");
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& prefix)
{
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) {
            throw SpecError("unknown field '" + prefix + key + "'");
        }
    }
}

void read_range(const json& obj, const char* name, IntRange& out)
{
    if (!obj.contains(name)) {
        return;
    }
    const auto& v = obj.at(name);
    if (v.is_number_integer()) {
        out.min = out.max = v.get<int>();
        return;
    }
    if (!v.is_object()) {
        throw SpecError(std::string("field '") + name + "': expected an integer or {min, max}");
    }
    reject_unknown(v, {"min", "max"}, std::string(name) + ".");
    read_field(v, "min", out.min, std::string(name) + ".");
    read_field(v, "max", out.max, std::string(name) + ".");
}

void read_planting(const json& obj, const char* name, Planting& out)
{
    if (!obj.contains(name)) {
        return;
    }
    const auto& v = obj.at(name);
    std::string prefix = std::string(name) + ".";
    if (!v.is_object()) {
        throw SpecError(std::string("field '") + name + "': expected an object");
    }
    reject_unknown(v, {"ncs", "cs", "cd", "ncd"}, prefix);
    read_field(v, "ncs", out.ncs, prefix);
    read_field(v, "cs", out.cs, prefix);
    read_field(v, "cd", out.cd, prefix);
    read_field(v, "ncd", out.ncd, prefix);
}

}  // namespace

auto parse_generator_spec(std::string_view json_text) -> GeneratorSpec
{
    json j;
    try {
        j = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("generator spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw SpecError("generator spec must be a JSON object");
    }
    reject_unknown(j,
                   {"seed", "sessions", "session_length", "vocabulary_size", "filler_vocabulary_size", "query_length",
                    "p_keep", "keep_by_scenario", "drift", "add_rate", "add_slots", "added_planting",
                    "query_planting", "results_per_impression", "click", "snippet_length", "document_length",
                    "mean_dwell", "test_query", "judgments", "degrade_after_scenario8_retention",
                    "documents_contain_snippets"},
                   "");
    GeneratorSpec spec;
    read_field(j, "seed", spec.seed);
    read_field(j, "sessions", spec.sessions);
    read_range(j, "session_length", spec.session_length);
    read_field(j, "vocabulary_size", spec.vocabulary_size);
    read_field(j, "filler_vocabulary_size", spec.filler_vocabulary_size);
    read_range(j, "query_length", spec.query_length);
    read_field(j, "p_keep", spec.p_keep);
    if (j.contains("keep_by_scenario") && !j.at("keep_by_scenario").is_null()) {
        std::vector<double> keep;
        read_field(j, "keep_by_scenario", keep);
        if (keep.size() != 8) {
            throw SpecError("field 'keep_by_scenario': expected 8 probabilities");
        }
        spec.keep_by_scenario.emplace();
        std::copy(keep.begin(), keep.end(), spec.keep_by_scenario->begin());
    }
    read_field(j, "drift", spec.drift);
    read_field(j, "add_rate", spec.add_rate);
    read_field(j, "add_slots", spec.add_slots);
    read_planting(j, "added_planting", spec.added_planting);
    read_planting(j, "query_planting", spec.query_planting);
    read_field(j, "results_per_impression", spec.results_per_impression);
    if (j.contains("click")) {
        const auto& c = j.at("click");
        if (!c.is_object()) {
            throw SpecError("field 'click': expected an object");
        }
        reject_unknown(c, {"base", "decay", "probs"}, "click.");
        read_field(c, "base", spec.click.base, "click.");
        read_field(c, "decay", spec.click.decay, "click.");
        read_field(c, "probs", spec.click.probs, "click.");
    }
    read_field(j, "snippet_length", spec.snippet_length);
    read_field(j, "document_length", spec.document_length);
    read_field(j, "mean_dwell", spec.mean_dwell);
    read_field(j, "test_query", spec.test_query);
    if (j.contains("judgments")) {
        const auto& g = j.at("judgments");
        if (!g.is_object()) {
            throw SpecError("field 'judgments': expected an object");
        }
        reject_unknown(g, {"enabled", "relevant_prob", "max_grade"}, "judgments.");
        read_field(g, "enabled", spec.judgments.enabled, "judgments.");
        read_field(g, "relevant_prob", spec.judgments.relevant_prob, "judgments.");
        read_field(g, "max_grade", spec.judgments.max_grade, "judgments.");
    }
    read_field(j, "degrade_after_scenario8_retention", spec.degrade_after_scenario8_retention);
    read_field(j, "documents_contain_snippets", spec.documents_contain_snippets);
    validate(spec);
    return spec;
}

auto load_generator_spec(const std::filesystem::path& path) -> GeneratorSpec
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SpecError("cannot open generator spec " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_generator_spec(buffer.str());
}

namespace {

auto draw_range(CounterRng& rng, const IntRange& r) -> int
{
    return r.min + static_cast<int>(rng.below(static_cast<std::uint64_t>(r.max - r.min + 1)));
}

auto join(const std::vector<std::string>& words) -> std::string
{
    std::string out;
    for (const auto& w : words) {
        if (!out.empty()) {
            out += ' ';
        }
        out += w;
    }
    return out;
}

auto contains(const std::vector<std::string>& v, const std::string& x) -> bool
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

/// A query-vocabulary term in neither `a` nor `b`, by rejection sampling.
auto fresh_term(CounterRng& rng, int vocabulary, const std::vector<std::string>& a,
                const std::vector<std::string>& b) -> std::string
{
    for (;;) {
        auto t = "q" + std::to_string(rng.below(static_cast<std::uint64_t>(vocabulary)));
        if (!contains(a, t) && !contains(b, t)) {
            return t;
        }
    }
}

auto filler(CounterRng& rng, int count, int vocabulary) -> std::vector<std::string>
{
    std::vector<std::string> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back("f" + std::to_string(rng.below(static_cast<std::uint64_t>(vocabulary))));
    }
    return out;
}

auto pad(int value, int width) -> std::string
{
    auto s = std::to_string(value);
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

void generate_session(const GeneratorSpec& spec, int index, Corpus& corpus)
{
    CounterRng rng(spec.seed, static_cast<std::uint64_t>(index));
    const auto& config = corpus.normalization;
    const int m = spec.results_per_impression;
    Session session;
    session.id = "synth/s" + pad(index, 6);
    session.dataset = "synth";
    if (spec.judgments.enabled) {
        session.topic_id = "synth/t" + pad(index, 6);
    }
    const int length = draw_range(rng, spec.session_length);

    std::vector<std::string> query;
    const int first = draw_range(rng, spec.query_length);
    for (int i = 0; i < first; ++i) {
        query.push_back(fresh_term(rng, spec.vocabulary_size, query, {}));
    }

    double clock = 0.0;
    bool degraded = false;
    for (int n = 1; n <= length; ++n) {
        Impression imp;
        imp.position = n;
        imp.raw_query = join(query);
        imp.query_terms = normalize(imp.raw_query, config);
        if (spec.test_query && n == length) {
            session.has_test_query = true;
            session.impressions.push_back(std::move(imp));
            break;
        }

        std::vector<int> clicked;
        std::vector<int> skipped;
        for (int r = 1; r <= m; ++r) {
            (rng.bernoulli(spec.click.at(r)) ? clicked : skipped).push_back(r);
        }
        std::vector<std::vector<std::string>> snippet_terms(static_cast<std::size_t>(m));
        std::vector<std::vector<std::string>> document_terms(static_cast<std::size_t>(m));
        auto pick = [&](const std::vector<int>& ranks) {
            return static_cast<std::size_t>(ranks[rng.below(ranks.size())] - 1);
        };
        auto plant = [&](const std::string& term, const Planting& p) {
            bool ncs = false;
            bool cs = false;
            bool cd = false;
            if (!skipped.empty() && rng.bernoulli(p.ncs)) {
                snippet_terms[pick(skipped)].push_back(term);
                ncs = true;
            }
            if (!clicked.empty() && rng.bernoulli(p.cs)) {
                snippet_terms[pick(clicked)].push_back(term);
                cs = true;
            }
            if (!clicked.empty() && rng.bernoulli(p.cd)) {
                document_terms[pick(clicked)].push_back(term);
                cd = true;
            }
            if (!skipped.empty() && rng.bernoulli(p.ncd)) {
                document_terms[pick(skipped)].push_back(term);
            }
            return 1 + (ncs ? 4 : 0) + (cs ? 2 : 0) + (cd ? 1 : 0);
        };

        std::vector<int> scenarios;
        for (const auto& term : query) {
            scenarios.push_back(plant(term, spec.query_planting));
        }
        std::vector<std::string> next;
        bool degrade_next = false;
        if (n < length) {
            int fresh = 0;
            for (std::size_t i = 0; i < query.size(); ++i) {
                double keep = spec.keep_by_scenario ? (*spec.keep_by_scenario)[static_cast<std::size_t>(scenarios[i] - 1)]
                                                    : spec.p_keep;
                if (!rng.bernoulli(keep)) {
                    continue;
                }
                if (rng.bernoulli(spec.drift)) {
                    ++fresh;
                } else {
                    next.push_back(query[i]);
                    degrade_next = degrade_next || scenarios[i] == 8;
                }
            }
            for (int slot = 0; slot < spec.add_slots; ++slot) {
                fresh += rng.bernoulli(spec.add_rate / spec.add_slots) ? 1 : 0;
            }
            for (int i = 0; i < fresh; ++i) {
                auto term = fresh_term(rng, spec.vocabulary_size, query, next);
                next.push_back(term);
                plant(term, spec.added_planting);
            }
        }

        for (int r = 1; r <= m; ++r) {
            auto i = static_cast<std::size_t>(r - 1);
            SnippetEntry e;
            e.rank = r;
            e.docid = "synth-s" + pad(index, 6) + "-n" + std::to_string(n) + "-r" + std::to_string(r);
            e.url = "http://synth.example/" + e.docid;
            auto words = filler(rng, spec.snippet_length, spec.filler_vocabulary_size);
            words.insert(words.end(), snippet_terms[i].begin(), snippet_terms[i].end());
            e.snippet = join(words);
            e.terms = normalize(e.title + " " + e.snippet, config);
            auto body = filler(rng, spec.document_length, spec.filler_vocabulary_size);
            body.insert(body.end(), document_terms[i].begin(), document_terms[i].end());
            std::string text = "<html><body><p>" + join(body) + "</p></body></html>";
            if (spec.documents_contain_snippets) {
                text = "<html><body><p>" + e.snippet + "</p><p>" + join(body) + "</p></body></html>";
            }
            (*corpus.docstore)[e.docid] = std::move(text);
            if (spec.judgments.enabled) {
                int grade = 0;
                if (rng.bernoulli(spec.judgments.relevant_prob)) {
                    grade = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.judgments.max_grade)));
                }
                if (degraded && spec.degrade_after_scenario8_retention) {
                    grade = 0;
                }
                corpus.qrels->set(*session.topic_id, e.docid, grade);
            }
            imp.results.push_back(std::move(e));
        }
        int order = 0;
        for (int r : clicked) {
            ClickEvent c;
            c.rank = r;
            c.order = ++order;
            c.start_time = clock + 1.0 + 4.0 * rng.uniform();
            c.end_time = c.start_time - spec.mean_dwell * std::log1p(-rng.uniform());
            clock = c.end_time;
            imp.clicks.push_back(c);
        }
        clock += 5.0;
        session.impressions.push_back(std::move(imp));
        query = std::move(next);
        degraded = degrade_next;
    }
    corpus.sessions.push_back(std::move(session));
}

}  // namespace

auto generate(const GeneratorSpec& spec) -> Corpus
{
    validate(spec);
    Corpus corpus;
    corpus.provenance = "synthetic (seed " + std::to_string(spec.seed) + ", " + std::to_string(spec.sessions)
        + " sessions)";
    corpus.docstore.emplace();
    if (spec.judgments.enabled) {
        corpus.qrels.emplace();
    }
    for (int s = 0; s < spec.sessions; ++s) {
        generate_session(spec, s, corpus);
    }
    corpus.validate();
    return corpus;
}

namespace {

/// Scenario probabilities of one term under independent planting, mixing over
/// whether the impression has clicked (H) and non-clicked (G) results.
auto scenario_probabilities(const Planting& p, const std::array<double, 4>& state) -> std::array<double, 8>
{
    // state: P(H,G), P(H,!G), P(!H,G), P(!H,!G)
    std::array<double, 8> out{};
    for (int hg = 0; hg < 4; ++hg) {
        bool h = hg < 2;
        bool g = hg % 2 == 0;
        double pn = g ? p.ncs : 0.0;
        double pc = h ? p.cs : 0.0;
        double pd = h ? p.cd : 0.0;
        for (int s = 0; s < 8; ++s) {
            double prob = ((s & 4) ? pn : 1 - pn) * ((s & 2) ? pc : 1 - pc) * ((s & 1) ? pd : 1 - pd);
            out[static_cast<std::size_t>(s)] += state[static_cast<std::size_t>(hg)] * prob;
        }
    }
    return out;
}

}  // namespace

auto expected_statistics(const GeneratorSpec& spec, bool include_test_queries) -> std::map<std::string, double>
{
    validate(spec);
    if (spec.documents_contain_snippets) {
        throw SpecError("expected statistics unsupported: documents_contain_snippets ties the clicked-document bit "
                        "to snippet planting");
    }
    double none = 1.0;
    double all = 1.0;
    for (int r = 1; r <= spec.results_per_impression; ++r) {
        none *= 1.0 - spec.click.at(r);
        all *= spec.click.at(r);
    }
    std::array<double, 4> state{std::max(0.0, 1.0 - none - all), all, none, 0.0};
    auto query = scenario_probabilities(spec.query_planting, state);
    auto added = scenario_probabilities(spec.added_planting, state);

    double keep = 0.0;
    std::array<double, 8> keep_s{};
    for (std::size_t s = 0; s < 8; ++s) {
        keep_s[s] = spec.keep_by_scenario ? (*spec.keep_by_scenario)[s] : spec.p_keep;
        keep += query[s] * keep_s[s];
    }

    // Mean over pairs of |Q_n|: E|Q_{n+1}| = keep * E|Q_n| + add_rate, each
    // position weighted by how many sessions contribute a counted pair there.
    const int lmin = spec.session_length.min;
    const int lmax = spec.session_length.max;
    const double per_length = 1.0 / (lmax - lmin + 1);
    double size = 0.5 * (spec.query_length.min + spec.query_length.max);
    double weight_sum = 0.0;
    double weighted_size = 0.0;
    for (int n = 1; n < lmax; ++n) {
        double w = 0.0;
        for (int len = std::max(lmin, n + 1); len <= lmax; ++len) {
            bool test_pair = spec.test_query && n + 1 == len;
            if (!test_pair || include_test_queries) {
                w += per_length;
            }
        }
        weight_sum += w;
        weighted_size += w * size;
        size = keep * size + spec.add_rate;
    }
    std::map<std::string, double> out;
    double mean_size = weight_sum > 0 ? weighted_size / weight_sum : 0.0;
    out["retained"] = mean_size * keep * (1.0 - spec.drift);
    out["removed"] = mean_size * (1.0 - keep * (1.0 - spec.drift));
    out["added"] = spec.add_rate + mean_size * keep * spec.drift;
    for (std::size_t s = 0; s < 8; ++s) {
        auto label = std::to_string(s + 1);
        out["query_scenario_" + label] = query[s];
        out["added_scenario_" + label] = added[s];
        if (query[s] > 0.0) {
            out["retention_" + label] = keep_s[s] * (1.0 - spec.drift);
        }
    }
    return out;
}

}  // namespace reform

#include "reform/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "reform/actions.hpp"
#include "reform/canonical_json.hpp"
#include "reform/errors.hpp"
#include "reform/ingest.hpp"
#include "reform/ireval.hpp"
#include "reform/report.hpp"
#include "reform/scenarios.hpp"
#include "reform/sources.hpp"
#include "reform/synthgen.hpp"
#include "reform/textnorm.hpp"

namespace reform::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Raised for invalid flag values detected after CLI11 parsing.
class UsageError : public Error {
  public:
    using Error::Error;
};

/// Raised by --strict when an analysis had to be skipped.
class StrictSkip : public Error {
  public:
    using Error::Error;
};

struct IngestArgs {
    std::vector<std::string> xml;
    std::vector<std::string> qrels;
    std::string docs;
    std::string stoplist;
    bool no_stem = false;
    bool drop_numeric = false;
    std::string out;
};

struct AnalyzeArgs {
    std::string what;
    std::string corpus;
    std::string out_dir;
    std::string config;
    bool include_test = true;
    double k1 = 1.2;
    double b = 0.75;
    int cutoff = 10;
    std::string dwell_thresholds;
    std::string docstore_policy = "drop";
    std::string format = "both";
    bool strict = false;
    int k_max = 10;
    int max_position = 9;
};

struct SynthArgs {
    std::string spec;
    std::string out;
};

auto read_file(const fs::path& path) -> std::string
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << content;
}

auto parse_thresholds(const std::string& text) -> std::vector<double>
{
    std::vector<double> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            double x = std::stod(item, &used);
            if (used != item.size() || x < 0) {
                throw std::invalid_argument(item);
            }
            out.push_back(x);
        } catch (const std::exception&) {
            throw UsageError("--dwell-thresholds: '" + item + "' is not a non-negative number");
        }
    }
    return out;
}

void print_summary(const Corpus& corpus, std::ostream& out)
{
    struct Row {
        std::size_t sessions = 0;
        std::size_t ranked = 0;
        std::size_t tests = 0;
        std::size_t pairs = 0;
        double terms = 0.0;
        std::size_t queries = 0;
    };
    std::map<std::string, Row> rows;
    for (const auto& s : corpus.sessions) {
        for (auto* row : {&rows[s.dataset.empty() ? "default" : s.dataset], &rows["~combined"]}) {
            ++row->sessions;
            row->tests += s.has_test_query ? 1 : 0;
            row->pairs += s.impressions.empty() ? 0 : s.impressions.size() - 1;
            for (const auto& imp : s.impressions) {
                row->ranked += imp.ranked() ? 1 : 0;
                row->terms += static_cast<double>(imp.query_terms.distinct());
                ++row->queries;
            }
        }
    }
    out << "dataset\tsessions\tranked impressions\ttest queries\tpairs\tmean query length\n";
    for (const auto& [name, row] : rows) {
        out << (name == "~combined" ? std::string("combined") : name) << '\t' << row.sessions << '\t' << row.ranked
            << '\t' << row.tests << '\t' << row.pairs << '\t'
            << format_number(row.queries ? row.terms / static_cast<double>(row.queries) : 0.0) << '\n';
    }
}

auto cmd_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) -> int
{
    if (!args.qrels.empty() && args.qrels.size() != args.xml.size()) {
        throw UsageError("--qrels must be given once per --trec-xml file (paired in order)");
    }
    NormalizationConfig config;
    std::string stoplist = args.stoplist;
    if (stoplist.empty()) {
        if (const char* env = std::getenv("REFORM_STOPLIST"); env != nullptr && *env != '\0') {
            stoplist = env;
        }
    }
    if (!stoplist.empty()) {
        config.stoplist = load_stoplist(stoplist);
    }
    config.stemming_enabled = !args.no_stem;
    config.keep_numeric_tokens = !args.drop_numeric;

    std::vector<Corpus> parts;
    for (std::size_t i = 0; i < args.xml.size(); ++i) {
        fs::path path(args.xml[i]);
        // Several years share session numbers, so ids are qualified by the file stem.
        std::string dataset = args.xml.size() > 1 ? path.stem().string() : std::string();
        auto part = ingest_trec_xml(path, config, dataset);
        if (!args.qrels.empty()) {
            part.qrels = ingest_qrels(args.qrels[i], dataset);
        }
        parts.push_back(std::move(part));
    }
    auto corpus = merge_corpora(std::move(parts));
    if (!args.docs.empty()) {
        std::vector<std::string> warnings;
        corpus = attach_documents(std::move(corpus), args.docs, &warnings);
        for (const auto& w : warnings) {
            err << "warning: " << w << '\n';
        }
    }
    corpus.validate();
    save_corpus(corpus, args.out);
    print_summary(corpus, out);
    return kExitOk;
}

/// Applies --config values for every flag not given on the command line.
void apply_config(AnalyzeArgs& args, const CLI::App& sub)
{
    if (args.config.empty()) {
        return;
    }
    json j;
    try {
        j = json::parse(read_file(args.config));
    } catch (const json::exception& e) {
        throw UsageError("--config: " + std::string(e.what()));
    }
    if (!j.is_object()) {
        throw UsageError("--config must hold a JSON object");
    }
    auto given = [&](const std::string& flag) { return sub.get_option(flag)->count() > 0; };
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "include_test_queries") {
                if (!given("--include-test-queries") && !given("--exclude-test-queries")) {
                    args.include_test = value.get<bool>();
                }
            } else if (key == "k1") {
                args.k1 = given("--k1") ? args.k1 : value.get<double>();
            } else if (key == "b") {
                args.b = given("--b") ? args.b : value.get<double>();
            } else if (key == "cutoff") {
                args.cutoff = given("--cutoff") ? args.cutoff : value.get<int>();
            } else if (key == "k_max") {
                args.k_max = given("--k-max") ? args.k_max : value.get<int>();
            } else if (key == "max_position") {
                args.max_position = given("--max-position") ? args.max_position : value.get<int>();
            } else if (key == "dwell_thresholds") {
                if (!given("--dwell-thresholds")) {
                    std::string joined;
                    for (const auto& x : value) {
                        joined += (joined.empty() ? "" : ",") + format_number(x.get<double>());
                    }
                    args.dwell_thresholds = joined;
                }
            } else if (key == "docstore_policy") {
                args.docstore_policy = given("--docstore-policy") ? args.docstore_policy : value.get<std::string>();
            } else if (key == "format") {
                args.format = given("--format") ? args.format : value.get<std::string>();
            } else if (key == "strict") {
                args.strict = given("--strict") ? args.strict : value.get<bool>();
            } else {
                throw UsageError("--config: unknown key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw UsageError("--config: " + std::string(e.what()));
    }
}

class Emitter {
  public:
    Emitter(const AnalyzeArgs& args, const Corpus& corpus, std::ostream& err)
        : args_(args), err_(err), dir_(args.out_dir)
    {
        header_.provenance = corpus.provenance;
        header_.normalization = fingerprint(corpus.normalization);
        header_.config = {{"analysis", args.what},
                          {"include_test_queries", args.include_test ? "true" : "false"},
                          {"k1", format_number(args.k1)},
                          {"b", format_number(args.b)},
                          {"cutoff", std::to_string(args.cutoff)},
                          {"k_max", std::to_string(args.k_max)},
                          {"max_position", std::to_string(args.max_position)},
                          {"docstore_policy", args.docstore_policy},
                          {"dwell_thresholds", args.dwell_thresholds}};
        fs::create_directories(dir_);
    }

    void table(const ReportTable& t)
    {
        if (args_.format != "md") {
            write_file(dir_ / (t.name + ".csv"), to_csv(t, header_));
        }
        if (args_.format != "csv") {
            write_file(dir_ / (t.name + ".md"), to_markdown(t, header_));
        }
        for (const auto& note : t.footnotes) {
            if (note.rfind("no docstore", 0) == 0) {
                err_ << "notice: " << t.name << ": " << note << '\n';
            }
        }
    }

    void raw(const std::string& name, const std::string& body)
    {
        std::string head = "# provenance: " + header_.provenance + "\n# normalization: " + header_.normalization + "\n";
        write_file(dir_ / name, head + body);
    }

    void skip(const std::string& what, const std::string& why)
    {
        err_ << "notice: skipped " << what << ": " << why << '\n';
        if (args_.strict) {
            throw StrictSkip("--strict: " + what + " could not run (" + why + ")");
        }
    }

  private:
    const AnalyzeArgs& args_;
    std::ostream& err_;
    fs::path dir_;
    ReportHeader header_;
};

auto cmd_analyze(AnalyzeArgs args, const CLI::App& sub, std::ostream& err) -> int
{
    apply_config(args, sub);
    if (args.docstore_policy != "drop" && args.docstore_policy != "empty") {
        throw UsageError("--docstore-policy must be drop or empty");
    }
    if (args.format != "csv" && args.format != "md" && args.format != "both") {
        throw UsageError("--format must be csv, md or both");
    }
    if (args.cutoff < 1 || args.k_max < 1 || args.max_position < 1) {
        throw UsageError("--cutoff, --k-max and --max-position must be positive");
    }
    auto thresholds = args.dwell_thresholds.empty() ? default_dwell_thresholds() : parse_thresholds(args.dwell_thresholds);
    if (args.dwell_thresholds.empty()) {
        for (double t : thresholds) {
            args.dwell_thresholds += (args.dwell_thresholds.empty() ? "" : ",") + format_number(t);
        }
    }

    auto corpus = load_corpus(args.corpus);
    AnalysisOptions options;
    options.scoring.k1 = args.k1;
    options.scoring.b = args.b;
    options.policy = args.docstore_policy == "drop" ? DocstorePolicy::Drop : DocstorePolicy::Empty;
    Emitter emit(args, corpus, err);
    auto cutoff = static_cast<std::size_t>(args.cutoff);

    if (args.what == "pairs") {
        emit.table(pair_summary(extract_pairs(corpus, args.include_test)));
    } else if (args.what == "positions") {
        for (int len = 2; len <= args.max_position + 1; ++len) {
            auto t = length_by_position(corpus, len);
            if (!t.rows().empty()) {
                emit.table(t);
            }
        }
        emit.table(similarity_by_position(extract_pairs(corpus, args.include_test), args.max_position));
        std::vector<int> xs;
        for (int x = 1; x <= args.max_position; ++x) {
            xs.push_back(x);
        }
        emit.table(fixed_query_similarity(corpus, xs, args.max_position, args.include_test));
    } else if (args.what == "sources") {
        SourceContext ctx(corpus, options);
        auto pairs = extract_pairs(corpus, args.include_test);
        emit.table(rank_prefix_similarity(pairs, ctx, args.k_max));
        emit.table(last_click_similarity(pairs, ctx));
        emit.table(source_comparison(pairs, ctx));
        emit.table(dwell_summary(corpus));
        if (ctx.documents().available()) {
            emit.table(dwell_threshold_curve(pairs, ctx, thresholds));
        } else {
            emit.skip("dwell_threshold_curve", "the corpus has no docstore");
        }
    } else if (args.what == "scenarios") {
        SourceContext ctx(corpus, options);
        auto records = assign_scenarios(extract_pairs(corpus, false), ctx);
        if (records.empty()) {
            emit.skip("scenario tables", "no pair has two ranked impressions");
            return kExitOk;
        }
        emit.table(scenario_distribution(records));
        emit.table(retention_by_scenario(records));
        emit.table(click_outcome_eval(records));
        emit.raw("scenario_records.csv", records_csv(records));
    } else if (args.what == "metrics") {
        if (!corpus.qrels) {
            emit.skip("metric tables", "the corpus has no relevance judgments");
            return kExitOk;
        }
        SourceContext ctx(corpus, options);
        auto records = assign_scenarios(extract_pairs(corpus, false), ctx);
        emit.table(metrics_by_position(corpus, cutoff));
        emit.table(scenario_metric_eval(records, corpus, cutoff));
        emit.raw("impression_metrics.csv", impression_metrics_csv(corpus, cutoff));
    }
    return kExitOk;
}

auto cmd_synth(const SynthArgs& args, std::ostream& out) -> int
{
    auto spec = load_generator_spec(args.spec);
    auto corpus = generate(spec);
    save_corpus(corpus, args.out);
    print_summary(corpus, out);
    return kExitOk;
}

}  // namespace

auto run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app{"Query reformulation log analytics", "reform"};
    app.require_subcommand(1);

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Ingest TREC Session Track logs into a canonical corpus");
    ingest_cmd->add_option("--trec-xml", ingest.xml, "Session log XML files")->required()->expected(1, -1);
    ingest_cmd->add_option("--qrels", ingest.qrels, "Qrels files, paired in order with --trec-xml")->expected(1, -1);
    ingest_cmd->add_option("--docs", ingest.docs, "Directory of document files named by docid");
    ingest_cmd->add_option("--stoplist", ingest.stoplist, "Stopword file (default: $REFORM_STOPLIST or SMART)");
    ingest_cmd->add_flag("--no-stem", ingest.no_stem, "Disable Porter stemming");
    ingest_cmd->add_flag("--drop-numeric", ingest.drop_numeric, "Drop pure-digit tokens");
    ingest_cmd->add_option("--out", ingest.out, "Output canonical JSON path")->required();

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Run one analysis family over a canonical corpus");
    analyze_cmd->add_option("analysis", analyze.what, "pairs | positions | sources | scenarios | metrics")
        ->required()
        ->check(CLI::IsMember({"pairs", "positions", "sources", "scenarios", "metrics"}));
    analyze_cmd->add_option("--corpus", analyze.corpus, "Canonical corpus JSON")->required();
    analyze_cmd->add_option("--out-dir", analyze.out_dir, "Directory for report files")->required();
    analyze_cmd->add_option("--config", analyze.config, "JSON file of defaults; flags take precedence");
    auto* include = analyze_cmd->add_flag("--include-test-queries", "Count pairs ending in a test query (default)");
    auto* exclude = analyze_cmd->add_flag("--exclude-test-queries", "Skip pairs ending in a test query");
    include->excludes(exclude);
    analyze_cmd->add_option("--k1", analyze.k1, "BM25 k1");
    analyze_cmd->add_option("--b", analyze.b, "BM25 b");
    analyze_cmd->add_option("--cutoff", analyze.cutoff, "Rank cutoff of NDCG and NERR");
    analyze_cmd->add_option("--k-max", analyze.k_max, "Largest snippet prefix of the rank analysis");
    analyze_cmd->add_option("--max-position", analyze.max_position, "Largest position of the position series");
    analyze_cmd->add_option("--dwell-thresholds", analyze.dwell_thresholds, "Comma list of seconds (0,5,...,60)");
    analyze_cmd->add_option("--docstore-policy", analyze.docstore_policy, "drop | empty");
    analyze_cmd->add_option("--format", analyze.format, "csv | md | both");
    analyze_cmd->add_flag("--strict", analyze.strict, "Fail when an analysis must be skipped");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus from a JSON spec");
    synth_cmd->add_option("--spec", synth.spec, "Generator spec JSON")->required();
    synth_cmd->add_option("--out", synth.out, "Output canonical JSON path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (ingest_cmd->parsed()) {
            return cmd_ingest(ingest, out, err);
        }
        if (analyze_cmd->parsed()) {
            if (include->count() > 0) {
                analyze.include_test = true;
            }
            if (exclude->count() > 0) {
                analyze.include_test = false;
            }
            return cmd_analyze(analyze, *analyze_cmd, err);
        }
        return cmd_synth(synth, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SpecError& e) {
        err << "invalid spec: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace reform::cli

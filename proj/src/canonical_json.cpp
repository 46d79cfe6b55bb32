#include "reform/canonical_json.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "reform/errors.hpp"

namespace reform {

using nlohmann::json;

namespace {

auto bag_to_json(const TermBag& bag) -> json
{
    json out = json::object();
    for (const auto& [term, n] : bag.counts()) {
        out[term] = n;
    }
    return out;
}

auto bag_from_json(const json& j) -> TermBag
{
    TermBag bag;
    for (const auto& [term, n] : j.items()) {
        auto count = n.get<std::int64_t>();
        if (count <= 0) {
            throw ParseError("term bag count for '" + term + "' must be positive");
        }
        bag.add(term, static_cast<std::uint32_t>(count));
    }
    return bag;
}

auto normalization_to_json(const NormalizationConfig& config) -> json
{
    json out;
    out["stemming"] = config.stemming_enabled;
    out["keep_numeric_tokens"] = config.keep_numeric_tokens;
    if (config.stoplist == smart_stoplist()) {
        out["stoplist"] = "smart";
    } else {
        out["stoplist"] = config.stoplist;
    }
    return out;
}

auto normalization_from_json(const json& j) -> NormalizationConfig
{
    NormalizationConfig config;
    config.stemming_enabled = j.at("stemming").get<bool>();
    config.keep_numeric_tokens = j.at("keep_numeric_tokens").get<bool>();
    const auto& stop = j.at("stoplist");
    if (stop.is_string()) {
        if (stop.get<std::string>() != "smart") {
            throw ParseError("unknown named stoplist '" + stop.get<std::string>() + "'");
        }
        config.stoplist = smart_stoplist();
    } else {
        config.stoplist = stop.get<std::set<std::string>>();
    }
    return config;
}

auto impression_to_json(const Impression& imp) -> json
{
    json out;
    out["position"] = imp.position;
    out["raw_query"] = imp.raw_query;
    out["query_terms"] = bag_to_json(imp.query_terms);
    out["document_incomplete"] = imp.document_incomplete;
    json results = json::array();
    for (const auto& r : imp.results) {
        results.push_back({{"rank", r.rank},
                           {"url", r.url},
                           {"docid", r.docid},
                           {"title", r.title},
                           {"snippet", r.snippet},
                           {"terms", bag_to_json(r.terms)}});
    }
    out["results"] = std::move(results);
    json clicks = json::array();
    for (const auto& c : imp.clicks) {
        clicks.push_back({{"rank", c.rank}, {"order", c.order}, {"start_time", c.start_time}, {"end_time", c.end_time}});
    }
    out["clicks"] = std::move(clicks);
    return out;
}

auto impression_from_json(const json& j) -> Impression
{
    Impression imp;
    imp.position = j.at("position").get<int>();
    imp.raw_query = j.at("raw_query").get<std::string>();
    imp.query_terms = bag_from_json(j.at("query_terms"));
    imp.document_incomplete = j.at("document_incomplete").get<bool>();
    for (const auto& r : j.at("results")) {
        SnippetEntry e;
        e.rank = r.at("rank").get<int>();
        e.url = r.at("url").get<std::string>();
        e.docid = r.at("docid").get<std::string>();
        e.title = r.at("title").get<std::string>();
        e.snippet = r.at("snippet").get<std::string>();
        e.terms = bag_from_json(r.at("terms"));
        imp.results.push_back(std::move(e));
    }
    for (const auto& c : j.at("clicks")) {
        ClickEvent click;
        click.rank = c.at("rank").get<int>();
        click.order = c.at("order").get<int>();
        click.start_time = c.at("start_time").get<double>();
        click.end_time = c.at("end_time").get<double>();
        imp.clicks.push_back(click);
    }
    return imp;
}

}  // namespace

auto to_canonical_json(const Corpus& corpus) -> std::string
{
    json out;
    out["schema"] = kCanonicalSchemaVersion;
    out["provenance"] = corpus.provenance;
    out["normalization"] = normalization_to_json(corpus.normalization);
    json sessions = json::array();
    for (const auto& s : corpus.sessions) {
        json js;
        js["id"] = s.id;
        js["dataset"] = s.dataset;
        js["topic_id"] = s.topic_id ? json(*s.topic_id) : json(nullptr);
        js["has_test_query"] = s.has_test_query;
        json imps = json::array();
        for (const auto& imp : s.impressions) {
            imps.push_back(impression_to_json(imp));
        }
        js["impressions"] = std::move(imps);
        sessions.push_back(std::move(js));
    }
    out["sessions"] = std::move(sessions);
    if (corpus.qrels) {
        json rows = json::array();
        for (const auto& [topic, docs] : corpus.qrels->topics()) {
            for (const auto& [doc, grade] : docs) {
                rows.push_back({{"topic", topic}, {"docid", doc}, {"grade", grade}});
            }
        }
        out["qrels"] = std::move(rows);
    } else {
        out["qrels"] = nullptr;
    }
    out["docstore"] = corpus.docstore ? json(*corpus.docstore) : json(nullptr);
    return out.dump(1, ' ', false, json::error_handler_t::replace) + "\n";
}

auto from_canonical_json(std::string_view bytes) -> Corpus
{
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("canonical JSON decode failed: ") + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("schema")) {
            throw ParseError("canonical JSON lacks a schema version");
        }
        auto version = j.at("schema").get<int>();
        if (version != kCanonicalSchemaVersion) {
            throw UnsupportedVersionError("unsupported canonical schema version " + std::to_string(version)
                                          + " (this build reads version "
                                          + std::to_string(kCanonicalSchemaVersion) + ")");
        }
        Corpus corpus;
        corpus.provenance = j.at("provenance").get<std::string>();
        corpus.normalization = normalization_from_json(j.at("normalization"));
        for (const auto& js : j.at("sessions")) {
            Session s;
            s.id = js.at("id").get<std::string>();
            s.dataset = js.at("dataset").get<std::string>();
            if (!js.at("topic_id").is_null()) {
                s.topic_id = js.at("topic_id").get<std::string>();
            }
            s.has_test_query = js.at("has_test_query").get<bool>();
            for (const auto& ji : js.at("impressions")) {
                s.impressions.push_back(impression_from_json(ji));
            }
            corpus.sessions.push_back(std::move(s));
        }
        if (!j.at("qrels").is_null()) {
            corpus.qrels.emplace();
            for (const auto& row : j.at("qrels")) {
                corpus.qrels->set(row.at("topic").get<std::string>(), row.at("docid").get<std::string>(),
                                  row.at("grade").get<int>());
            }
        }
        if (!j.at("docstore").is_null()) {
            corpus.docstore = j.at("docstore").get<DocumentStore>();
        }
        corpus.validate();
        return corpus;
    } catch (const json::exception& e) {
        throw ParseError(std::string("canonical JSON does not match schema: ") + e.what());
    }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << to_canonical_json(corpus);
}

auto load_corpus(const std::filesystem::path& path) -> Corpus
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_canonical_json(buffer.str());
}

}  // namespace reform

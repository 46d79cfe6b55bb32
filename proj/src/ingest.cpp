#include "reform/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "reform/errors.hpp"

namespace reform {

namespace pt = boost::property_tree;

namespace {

auto trim(std::string_view s) -> std::string_view
{
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
auto parse_number(std::string_view text) -> std::optional<T>
{
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

auto attribute(const pt::ptree& node, const std::string& name) -> std::optional<std::string>
{
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
        if (auto v = attrs->get_optional<std::string>(name)) {
            return *v;
        }
    }
    return std::nullopt;
}

template <typename T>
auto numeric_attribute(const pt::ptree& node, const std::string& name) -> std::optional<T>
{
    auto text = attribute(node, name);
    return text ? parse_number<T>(*text) : std::nullopt;
}

auto child_text(const pt::ptree& node, const std::string& name) -> std::optional<std::string>
{
    if (auto c = node.get_child_optional(name)) {
        return std::string(trim(c->data()));
    }
    return std::nullopt;
}

auto qualify(const std::string& prefix, const std::string& id) -> std::string
{
    return prefix.empty() ? id : prefix + "/" + id;
}

/// Document identifier of a result or click: the first child element named
/// like `clueweb09id`, `clueweb12id`, `docno` or `docid`.
auto docid_of(const pt::ptree& node) -> std::string
{
    for (const auto& [name, child] : node) {
        if (name == "docno" || name == "docid" || (name.size() > 2 && name.compare(name.size() - 2, 2, "id") == 0
                                                   && name.rfind("clueweb", 0) == 0)) {
            return std::string(trim(child.data()));
        }
    }
    return {};
}

auto read_rank(const pt::ptree& node) -> std::optional<int>
{
    if (auto a = attribute(node, "rank")) {
        return parse_number<int>(*a);
    }
    if (auto t = child_text(node, "rank")) {
        return parse_number<int>(*t);
    }
    return std::nullopt;
}

auto read_impression(const pt::ptree& node, const std::string& session_id, int position,
                     const NormalizationConfig& config) -> Impression
{
    Impression imp;
    imp.position = position;
    imp.raw_query = child_text(node, "query").value_or("");
    imp.query_terms = normalize(imp.raw_query, config);
    auto where = [&] { return "session " + session_id + ", interaction " + std::to_string(position); };

    if (auto results = node.get_child_optional("results")) {
        for (const auto& [name, r] : *results) {
            if (name != "result") {
                continue;
            }
            auto rank_attr = attribute(r, "rank");
            if (!rank_attr) {
                throw IngestError(where() + ": result without rank attribute");
            }
            auto rank = parse_number<int>(*rank_attr);
            if (!rank) {
                throw IngestError(where() + ": non-integer result rank '" + *rank_attr + "'");
            }
            SnippetEntry entry;
            entry.rank = *rank;
            entry.url = child_text(r, "url").value_or("");
            entry.docid = docid_of(r);
            entry.title = child_text(r, "title").value_or("");
            entry.snippet = child_text(r, "snippet").value_or("");
            entry.terms = normalize(entry.title + " " + entry.snippet, config);
            imp.results.push_back(std::move(entry));
        }
    }
    std::stable_sort(imp.results.begin(), imp.results.end(), [](const auto& a, const auto& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < imp.results.size(); ++i) {
        if (imp.results[i].rank != static_cast<int>(i) + 1) {
            throw IngestError(where() + ": result ranks must run 1..M without gaps");
        }
    }

    if (auto clicked = node.get_child_optional("clicked")) {
        int order = 0;
        for (const auto& [name, c] : *clicked) {
            if (name != "click") {
                continue;
            }
            ++order;
            ClickEvent click;
            auto rank = read_rank(c);
            if (!rank) {
                throw IngestError(where() + ": click without a valid rank");
            }
            click.rank = *rank;
            click.order = numeric_attribute<int>(c, "num").value_or(order);
            auto start = numeric_attribute<double>(c, "starttime");
            auto end = numeric_attribute<double>(c, "endtime");
            if (!start || !end) {
                throw IngestError(where() + ": click without numeric starttime/endtime");
            }
            click.start_time = *start;
            click.end_time = *end;
            if (click.end_time < click.start_time) {
                throw IngestError(where() + ": click endtime precedes starttime");
            }
            if (click.rank < 1 || click.rank > static_cast<int>(imp.results.size())) {
                throw IngestError(where() + ": click on rank " + std::to_string(click.rank) + " outside the ranking");
            }
            imp.clicks.push_back(click);
        }
    }
    return imp;
}

auto read_session(const pt::ptree& node, const NormalizationConfig& config, const std::string& dataset) -> Session
{
    Session session;
    auto num = attribute(node, "num").value_or("");
    if (num.empty()) {
        throw IngestError("session element without num attribute");
    }
    session.id = qualify(dataset, num);
    session.dataset = dataset;
    if (auto topic = node.get_child_optional("topic")) {
        if (auto tnum = attribute(*topic, "num")) {
            session.topic_id = qualify(dataset, std::string(trim(*tnum)));
        }
    }
    if (!session.topic_id) {
        if (auto t = attribute(node, "topic")) {
            session.topic_id = qualify(dataset, std::string(trim(*t)));
        }
    }
    int position = 0;
    bool saw_current = false;
    for (const auto& [name, child] : node) {
        if (name == "interaction") {
            if (saw_current) {
                throw IngestError("session " + session.id + ": interaction after currentquery");
            }
            session.impressions.push_back(read_impression(child, session.id, ++position, config));
        } else if (name == "currentquery") {
            Impression test;
            test.position = ++position;
            test.raw_query = child_text(child, "query").value_or("");
            test.query_terms = normalize(test.raw_query, config);
            session.impressions.push_back(std::move(test));
            saw_current = true;
        }
    }
    if (!session.impressions.empty() && !session.impressions.back().ranked()
        && session.impressions.back().clicks.empty()) {
        session.has_test_query = true;
    }
    return session;
}

/// Best-effort name of the session enclosing `line` in raw XML text.
auto session_near_line(const std::string& text, unsigned long line) -> std::string
{
    std::istringstream in(text);
    std::string row;
    std::string last = "(before first session)";
    unsigned long n = 0;
    while (std::getline(in, row) && ++n <= line) {
        auto pos = row.find("<session");
        while (pos != std::string::npos) {
            auto num = row.find("num=", pos);
            if (num != std::string::npos && num + 5 < row.size()) {
                char quote = row[num + 4];
                auto close = row.find(quote, num + 5);
                if (close != std::string::npos) {
                    last = row.substr(num + 5, close - num - 5);
                }
            }
            pos = row.find("<session", pos + 1);
        }
    }
    return last;
}

}  // namespace

auto parse_trec_xml(std::istream& in, const NormalizationConfig& config, const std::string& dataset) -> Corpus
{
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    pt::ptree tree;
    try {
        std::istringstream stream(text);
        pt::read_xml(stream, tree);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("malformed XML in session " + session_near_line(text, e.line()) + " (line "
                         + std::to_string(e.line()) + "): " + e.message());
    }
    if (tree.empty()) {
        throw ParseError("empty XML document");
    }
    const auto& root = tree.begin()->second;

    Corpus corpus;
    corpus.normalization = config;
    corpus.provenance = dataset;
    for (const auto& [name, node] : root) {
        if (name == "session") {
            corpus.sessions.push_back(read_session(node, config, dataset));
        }
    }
    corpus.validate();
    return corpus;
}

auto ingest_trec_xml(const std::filesystem::path& path, const NormalizationConfig& config, const std::string& dataset)
    -> Corpus
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    auto corpus = parse_trec_xml(in, config, dataset);
    corpus.provenance = path.filename().string();
    return corpus;
}

auto parse_qrels(std::istream& in, const std::string& topic_prefix) -> RelevanceJudgments
{
    RelevanceJudgments qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream fields(line);
        std::string topic;
        std::string iteration;
        std::string docid;
        std::string grade_text;
        if (!(fields >> topic)) {
            continue;
        }
        std::string extra;
        if (!(fields >> iteration >> docid >> grade_text) || (fields >> extra)) {
            throw ParseError("qrels line " + std::to_string(line_no) + ": expected 4 columns");
        }
        auto grade = parse_number<int>(grade_text);
        if (!grade) {
            throw ParseError("qrels line " + std::to_string(line_no) + ": non-integer grade '" + grade_text + "'");
        }
        try {
            qrels.set(qualify(topic_prefix, topic), docid, *grade);
        } catch (const IngestError& e) {
            throw IngestError("qrels line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return qrels;
}

auto ingest_qrels(const std::filesystem::path& path, const std::string& topic_prefix) -> RelevanceJudgments
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path.string());
    }
    return parse_qrels(in, topic_prefix);
}

void flag_incomplete_impressions(Corpus& corpus)
{
    for (auto& session : corpus.sessions) {
        for (auto& imp : session.impressions) {
            imp.document_incomplete = false;
            for (int rank : imp.clicked_ranks()) {
                const auto& docid = imp.result(rank).docid;
                if (!corpus.docstore || corpus.docstore->count(docid) == 0) {
                    imp.document_incomplete = true;
                }
            }
        }
    }
}

auto attach_documents(Corpus corpus, const std::filesystem::path& dir, std::vector<std::string>* warnings) -> Corpus
{
    namespace fs = std::filesystem;
    std::set<std::string> wanted;
    for (const auto& session : corpus.sessions) {
        for (const auto& imp : session.impressions) {
            for (const auto& r : imp.results) {
                if (!r.docid.empty()) {
                    wanted.insert(r.docid);
                }
            }
        }
    }
    std::map<std::string, fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        auto name = entry.path().filename().string();
        auto stem = entry.path().stem().string();
        if (wanted.count(name) != 0) {
            files[name] = entry.path();
        } else if (wanted.count(stem) != 0 && files.count(stem) == 0) {
            files[stem] = entry.path();
        }
    }
    if (ec && warnings != nullptr) {
        warnings->push_back("cannot list " + dir.string() + ": " + ec.message());
    }

    DocumentStore store = corpus.docstore.value_or(DocumentStore{});
    for (const auto& [docid, path] : files) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buffer;
        if (!in || !(buffer << in.rdbuf())) {
            if (warnings != nullptr) {
                warnings->push_back("unreadable document " + path.string() + ", skipped");
            }
            continue;
        }
        store[docid] = sanitize_utf8(buffer.str());
    }
    corpus.docstore = std::move(store);
    flag_incomplete_impressions(corpus);
    return corpus;
}

auto merge_corpora(std::vector<Corpus> parts) -> Corpus
{
    if (parts.empty()) {
        return {};
    }
    Corpus out;
    out.normalization = parts.front().normalization;
    std::vector<std::string> labels;
    for (auto& part : parts) {
        if (!(part.normalization == out.normalization)) {
            throw IngestError("cannot merge corpora normalized under different configurations");
        }
        if (!part.provenance.empty()) {
            labels.push_back(part.provenance);
        }
        std::move(part.sessions.begin(), part.sessions.end(), std::back_inserter(out.sessions));
        if (part.qrels) {
            if (!out.qrels) {
                out.qrels.emplace();
            }
            for (const auto& [topic, docs] : part.qrels->topics()) {
                for (const auto& [doc, g] : docs) {
                    out.qrels->set(topic, doc, g);
                }
            }
        }
        if (part.docstore) {
            if (!out.docstore) {
                out.docstore.emplace();
            }
            out.docstore->insert(part.docstore->begin(), part.docstore->end());
        }
    }
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out.provenance += (i == 0 ? "" : "; ") + labels[i];
    }
    out.validate();
    return out;
}

}  // namespace reform

#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "reform/corpus.hpp"
#include "reform/textnorm.hpp"

namespace reform::testing {

inline auto bag(std::initializer_list<const char*> terms) -> TermBag
{
    TermBag b;
    for (const auto* t : terms) {
        b.add(t);
    }
    return b;
}

inline auto set(std::initializer_list<const char*> terms) -> TermSet
{
    TermSet s;
    for (const auto* t : terms) {
        s.insert(t);
    }
    return s;
}

/// Config that keeps every token as written: no stopwords, no stemming.
inline auto raw_config() -> NormalizationConfig
{
    NormalizationConfig c;
    c.stoplist.clear();
    c.stemming_enabled = false;
    return c;
}

struct ResultSpec {
    std::string snippet;
    std::string docid;
};

/// Ranked impression whose snippets are normalized with `config`.
inline auto impression(int position, const std::string& query, const std::vector<ResultSpec>& results,
                       const std::vector<int>& clicked, const NormalizationConfig& config = raw_config()) -> Impression
{
    Impression imp;
    imp.position = position;
    imp.raw_query = query;
    imp.query_terms = normalize(query, config);
    int rank = 0;
    for (const auto& r : results) {
        SnippetEntry e;
        e.rank = ++rank;
        e.docid = r.docid.empty() ? "d" + std::to_string(position) + "-" + std::to_string(rank) : r.docid;
        e.url = "http://example.org/" + e.docid;
        e.snippet = r.snippet;
        e.terms = normalize(e.title + " " + e.snippet, config);
        imp.results.push_back(std::move(e));
    }
    int order = 0;
    double clock = 0.0;
    for (int r : clicked) {
        imp.clicks.push_back({r, ++order, clock, clock + 10.0});
        clock += 20.0;
    }
    return imp;
}

/// Unranked final query.
inline auto test_query(int position, const std::string& query, const NormalizationConfig& config = raw_config())
    -> Impression
{
    Impression imp;
    imp.position = position;
    imp.raw_query = query;
    imp.query_terms = normalize(query, config);
    return imp;
}

inline auto session(const std::string& id, std::vector<Impression> impressions, bool has_test = false) -> Session
{
    Session s;
    s.id = id;
    s.impressions = std::move(impressions);
    s.has_test_query = has_test;
    return s;
}

inline auto corpus(std::vector<Session> sessions, const NormalizationConfig& config = raw_config()) -> Corpus
{
    Corpus c;
    c.sessions = std::move(sessions);
    c.normalization = config;
    c.provenance = "test fixture";
    return c;
}

/// Two-session TREC log: a clicked result, a currentquery and a final
/// interaction without results.
inline const char* const kTrecLog = R"(<?xml version="1.0" encoding="UTF-8"?>
<sessiontrack2013>
<session num="40" userid="7" starttime="0">
  <topic num="12"><desc>gun control</desc></topic>
  <interaction num="1" starttime="1" type="reformulated">
    <query>gun control opinions</query>
    <results>
      <result rank="1"><url>http://a.example</url><clueweb12id>doc-a</clueweb12id>
        <title>Gun control</title><snippet>Public opinions on gun control &amp; laws</snippet></result>
      <result rank="2"><url>http://b.example</url><clueweb12id>doc-b</clueweb12id>
        <title>US Government</title><snippet>US government info guide</snippet></result>
    </results>
    <clicked>
      <click num="1" starttime="12.5" endtime="40"><rank>2</rank><clueweb12id>doc-b</clueweb12id></click>
    </clicked>
  </interaction>
  <interaction num="2" starttime="50" type="reformulated">
    <query>gun control us government</query>
    <results>
      <result rank="1"><url>http://c.example</url><clueweb12id>doc-c</clueweb12id>
        <title>Gov</title><snippet>government policy</snippet></result>
    </results>
  </interaction>
  <currentquery starttime="90"><query>gun control current affairs</query></currentquery>
</session>
<session num="41" topic="13">
  <interaction num="1">
    <query>connecticut fire academy</query>
    <results>
      <result rank="1"><url>http://d.example</url><clueweb12id>doc-d</clueweb12id>
        <title>Academy</title><snippet>fire training</snippet></result>
    </results>
  </interaction>
  <interaction num="2">
    <query>what is the connecticut fire academy</query>
  </interaction>
</session>
</sessiontrack2013>
)";

/// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("reform-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    TempDir(const TempDir&) = delete;
    auto operator=(const TempDir&) -> TempDir& = delete;
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    void write(const std::string& name, const std::string& body) const
    {
        std::ofstream(path / name, std::ios::binary) << body;
    }
};

}  // namespace reform::testing

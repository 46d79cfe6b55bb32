#include "reform/textnorm.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>

#include "reform/errors.hpp"

namespace reform {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

void append_utf8(std::string& out, char32_t cp)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

/// Decodes one code point at `pos`, advancing it. Malformed sequences yield
/// U+FFFD and consume a single byte.
auto decode_utf8(std::string_view s, std::size_t& pos) -> char32_t
{
    auto lead = static_cast<unsigned char>(s[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
        min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
        min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
        min = 0x10000;
    } else {
        ++pos;
        return kReplacement;
    }
    if (pos + static_cast<std::size_t>(extra) >= s.size()) {
        ++pos;
        return kReplacement;
    }
    for (int i = 1; i <= extra; ++i) {
        auto c = static_cast<unsigned char>(s[pos + i]);
        if ((c & 0xC0) != 0x80) {
            ++pos;
            return kReplacement;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacement;
    }
    pos += extra + 1;
    return cp;
}

auto is_ascii_space(char c) -> bool
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

auto lower(std::string_view s) -> std::string
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

auto istarts_with(std::string_view s, std::size_t pos, std::string_view prefix) -> bool
{
    if (s.size() - pos < prefix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) {
            return false;
        }
    }
    return true;
}

/// Position just past the `>` closing the tag opened at `pos`, honoring quoted
/// attribute values. Returns npos when the tag never closes.
auto tag_end(std::string_view html, std::size_t pos) -> std::size_t
{
    char quote = 0;
    for (std::size_t i = pos + 1; i < html.size(); ++i) {
        char c = html[i];
        if (quote != 0) {
            if (c == quote) {
                quote = 0;
            }
        } else if (c == '"' || c == '\'') {
            quote = c;
        } else if (c == '>') {
            return i + 1;
        }
    }
    return std::string_view::npos;
}

/// Decodes the entity starting at `pos` (which holds '&'); on success returns
/// the code point and sets `len` to the consumed length.
auto decode_entity(std::string_view html, std::size_t pos, std::size_t& len) -> std::optional<char32_t>
{
    auto semi = html.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 12) {
        return std::nullopt;
    }
    std::string_view body = html.substr(pos + 1, semi - pos - 1);
    len = semi - pos + 1;
    if (!body.empty() && body[0] == '#') {
        std::uint32_t value = 0;
        bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        std::string_view digits = body.substr(hex ? 2 : 1);
        if (digits.empty()) {
            return std::nullopt;
        }
        for (char c : digits) {
            int d = 0;
            if (c >= '0' && c <= '9') {
                d = c - '0';
            } else if (hex && c >= 'a' && c <= 'f') {
                d = c - 'a' + 10;
            } else if (hex && c >= 'A' && c <= 'F') {
                d = c - 'A' + 10;
            } else {
                return std::nullopt;
            }
            value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
            if (value > 0x10FFFF) {
                return kReplacement;
            }
        }
        if (value == 0 || (value >= 0xD800 && value <= 0xDFFF)) {
            return kReplacement;
        }
        return static_cast<char32_t>(value);
    }
    static constexpr std::array<std::pair<std::string_view, char32_t>, 6> named{{
        {"amp", U'&'},
        {"lt", U'<'},
        {"gt", U'>'},
        {"quot", U'"'},
        {"apos", U'\''},
        {"nbsp", U' '},
    }};
    for (const auto& [name, cp] : named) {
        if (body == name) {
            return cp;
        }
    }
    return std::nullopt;
}

/// Separators among non-ASCII code points: Latin-1 punctuation and symbols,
/// general punctuation, CJK punctuation, BOM and the replacement character.
auto is_unicode_separator(char32_t cp) -> bool
{
    return (cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 || (cp >= 0x2000 && cp <= 0x206F)
        || (cp >= 0x3000 && cp <= 0x303F) || cp == 0xFEFF || cp == kReplacement;
}

auto is_numeric(std::string_view token) -> bool
{
    return std::all_of(token.begin(), token.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

auto fingerprint(const NormalizationConfig& config) -> std::string
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto feed = [&hash](std::string_view s) {
        for (unsigned char c : s) {
            hash ^= c;
            hash *= 0x100000001b3ULL;
        }
    };
    feed(config.stemming_enabled ? "stem=1;" : "stem=0;");
    feed(config.keep_numeric_tokens ? "numeric=1;" : "numeric=0;");
    feed("stop=");
    for (const auto& word : config.stoplist) {
        feed(word);
        feed(",");
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[hash & 0xF];
        hash >>= 4;
    }
    return out;
}

auto parse_stoplist(std::istream& in) -> std::set<std::string>
{
    std::set<std::string> words;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            continue;
        }
        auto last = line.find_last_not_of(" \t\r");
        std::string word = lower(std::string_view(line).substr(first, last - first + 1));
        bool clean = std::all_of(word.begin(), word.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; });
        if (!clean) {
            throw ParseError("stoplist line " + std::to_string(line_no) + ": '" + word + "' contains punctuation");
        }
        words.insert(std::move(word));
    }
    return words;
}

auto load_stoplist(const std::filesystem::path& path) -> std::set<std::string>
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open stoplist " + path.string());
    }
    return parse_stoplist(in);
}

auto sanitize_utf8(std::string_view bytes) -> std::string
{
    std::string out;
    out.reserve(bytes.size());
    std::size_t i = 0;
    while (i < bytes.size()) {
        if (static_cast<unsigned char>(bytes[i]) < 0x80) {
            out.push_back(bytes[i++]);
        } else {
            append_utf8(out, decode_utf8(bytes, i));
        }
    }
    return out;
}

auto strip_html(std::string_view html) -> std::string
{
    std::string raw;
    raw.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        char c = html[i];
        if (c == '<') {
            if (html.compare(i, 4, "<!--") == 0) {
                auto end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                raw.push_back(' ');
                continue;
            }
            bool tagish = i + 1 < html.size()
                && (std::isalpha(static_cast<unsigned char>(html[i + 1])) || html[i + 1] == '/' || html[i + 1] == '!'
                    || html[i + 1] == '?');
            if (!tagish) {
                raw.push_back(c);
                ++i;
                continue;
            }
            auto end = tag_end(html, i);
            if (end == std::string_view::npos) {
                break;
            }
            bool raw_text = false;
            std::string_view closing;
            if (istarts_with(html, i + 1, "script")) {
                raw_text = true;
                closing = "</script";
            } else if (istarts_with(html, i + 1, "style")) {
                raw_text = true;
                closing = "</style";
            }
            if (raw_text) {
                auto name_end = i + 1 + (closing.size() - 2);
                bool exact = name_end >= html.size() || !std::isalnum(static_cast<unsigned char>(html[name_end]));
                bool self_closing = end >= 2 && html[end - 2] == '/';
                if (exact && !self_closing) {
                    std::size_t j = end;
                    while (j < html.size() && !istarts_with(html, j, closing)) {
                        ++j;
                    }
                    end = j >= html.size() ? html.size() : tag_end(html, j);
                    if (end == std::string_view::npos) {
                        end = html.size();
                    }
                }
            }
            raw.push_back(' ');
            i = end;
            continue;
        }
        if (c == '&') {
            std::size_t len = 0;
            if (auto cp = decode_entity(html, i, len)) {
                append_utf8(raw, *cp);
                i += len;
                continue;
            }
        }
        if (static_cast<unsigned char>(c) >= 0x80) {
            append_utf8(raw, decode_utf8(html, i));
            continue;
        }
        raw.push_back(c);
        ++i;
    }

    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        if (is_ascii_space(ch)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(ch);
    }
    return out;
}

auto tokenize(std::string_view text, bool keep_numeric) -> std::vector<std::string>
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (keep_numeric || !is_numeric(current)) {
                tokens.push_back(std::move(current));
            }
            current.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        auto c = static_cast<unsigned char>(text[i]);
        if (c < 0x80) {
            if (std::isalnum(c)) {
                current.push_back(static_cast<char>(std::tolower(c)));
            } else {
                flush();
            }
            ++i;
            continue;
        }
        std::size_t start = i;
        char32_t cp = decode_utf8(text, i);
        if (is_unicode_separator(cp)) {
            flush();
        } else {
            current.append(text.substr(start, i - start));
        }
    }
    flush();
    return tokens;
}

auto normalize(std::string_view text, const NormalizationConfig& config) -> TermBag
{
    TermBag bag;
    for (auto& token : tokenize(text, config.keep_numeric_tokens)) {
        if (config.stoplist.count(token) != 0) {
            continue;
        }
        if (config.stemming_enabled) {
            bag.add(stem(token));
        } else {
            bag.add(token);
        }
    }
    return bag;
}

}  // namespace reform

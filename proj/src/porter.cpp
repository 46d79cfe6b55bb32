// Porter, M.F. "An algorithm for suffix stripping", Program 14(3), 1980.
// Rule set of the original publication; no later revisions (e.g. logi -> log).

#include <algorithm>
#include <string>
#include <string_view>

#include "reform/textnorm.hpp"

namespace reform {

namespace {

class PorterStemmer {
  public:
    explicit PorterStemmer(std::string_view word) : w_(word) {}

    auto run() -> std::string
    {
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return w_;
    }

  private:
    std::string w_;

    [[nodiscard]] static auto is_vowel_letter(char c) -> bool
    {
        return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    }

    /// Consonant test on a prefix of the word: y is a consonant at the start
    /// or after a vowel.
    [[nodiscard]] auto consonant(std::size_t i) const -> bool
    {
        char c = w_[i];
        if (is_vowel_letter(c)) {
            return false;
        }
        if (c == 'y') {
            return i == 0 || !consonant(i - 1);
        }
        return true;
    }

    /// Measure m of w_[0, len): the number of VC sequences.
    [[nodiscard]] auto measure(std::size_t len) const -> int
    {
        int m = 0;
        bool prev_vowel = false;
        for (std::size_t i = 0; i < len; ++i) {
            bool cons = consonant(i);
            if (cons && prev_vowel) {
                ++m;
            }
            prev_vowel = !cons;
        }
        return m;
    }

    [[nodiscard]] auto has_vowel(std::size_t len) const -> bool
    {
        for (std::size_t i = 0; i < len; ++i) {
            if (!consonant(i)) {
                return true;
            }
        }
        return false;
    }

    /// *d: stem w_[0, len) ends with a double consonant.
    [[nodiscard]] auto double_consonant(std::size_t len) const -> bool
    {
        return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
    }

    /// *o: stem ends cvc where the final c is not w, x or y.
    [[nodiscard]] auto cvc(std::size_t len) const -> bool
    {
        if (len < 3 || !consonant(len - 3) || consonant(len - 2) || !consonant(len - 1)) {
            return false;
        }
        char c = w_[len - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    [[nodiscard]] auto ends(std::string_view suffix) const -> bool
    {
        return w_.size() >= suffix.size() && std::string_view(w_).substr(w_.size() - suffix.size()) == suffix;
    }

    void replace_tail(std::size_t suffix_len, std::string_view replacement)
    {
        w_.resize(w_.size() - suffix_len);
        w_.append(replacement);
    }

    struct Rule {
        std::string_view suffix;
        std::string_view replacement;
    };

    /// Applies the first rule whose suffix matches, if the remaining stem has
    /// measure > `min_measure`. Only the first matching suffix is considered.
    template <std::size_t N>
    void apply_first(const Rule (&rules)[N], int min_measure)
    {
        for (const auto& rule : rules) {
            if (ends(rule.suffix)) {
                if (measure(w_.size() - rule.suffix.size()) > min_measure) {
                    replace_tail(rule.suffix.size(), rule.replacement);
                }
                return;
            }
        }
    }

    void step1a()
    {
        if (ends("sses")) {
            replace_tail(4, "ss");
        } else if (ends("ies")) {
            replace_tail(3, "i");
        } else if (ends("ss")) {
            // unchanged
        } else if (ends("s")) {
            replace_tail(1, "");
        }
    }

    void step1b()
    {
        if (ends("eed")) {
            if (measure(w_.size() - 3) > 0) {
                replace_tail(3, "ee");
            }
            return;
        }
        std::size_t cut = 0;
        if (ends("ed") && has_vowel(w_.size() - 2)) {
            cut = 2;
        } else if (ends("ing") && has_vowel(w_.size() - 3)) {
            cut = 3;
        }
        if (cut == 0) {
            return;
        }
        replace_tail(cut, "");
        if (ends("at") || ends("bl") || ends("iz")) {
            w_.push_back('e');
        } else if (double_consonant(w_.size())) {
            char last = w_.back();
            if (last != 'l' && last != 's' && last != 'z') {
                w_.pop_back();
            }
        } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
            w_.push_back('e');
        }
    }

    void step1c()
    {
        if (ends("y") && has_vowel(w_.size() - 1)) {
            w_.back() = 'i';
        }
    }

    void step2()
    {
        static constexpr Rule rules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"}, {"izer", "ize"},
            {"abli", "able"},   {"alli", "al"},     {"entli", "ent"}, {"eli", "e"},     {"ousli", "ous"},
            {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},  {"alism", "al"},  {"iveness", "ive"},
            {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},  {"iviti", "ive"}, {"biliti", "ble"},
        };
        apply_first(rules, 0);
    }

    void step3()
    {
        static constexpr Rule rules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        apply_first(rules, 0);
    }

    void step4()
    {
        static constexpr std::string_view suffixes[] = {
            "al",  "ance", "ence", "er", "ic",  "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism", "ate", "iti", "ous",  "ive", "ize",
        };
        for (auto suffix : suffixes) {
            if (!ends(suffix)) {
                continue;
            }
            std::size_t stem_len = w_.size() - suffix.size();
            bool ok = measure(stem_len) > 1;
            if (ok && suffix == "ion") {
                ok = stem_len > 0 && (w_[stem_len - 1] == 's' || w_[stem_len - 1] == 't');
            }
            if (ok) {
                w_.resize(stem_len);
            }
            return;
        }
    }

    void step5a()
    {
        if (!ends("e")) {
            return;
        }
        std::size_t stem_len = w_.size() - 1;
        int m = measure(stem_len);
        if (m > 1 || (m == 1 && !cvc(stem_len))) {
            w_.pop_back();
        }
    }

    void step5b()
    {
        if (ends("ll") && measure(w_.size()) > 1) {
            w_.pop_back();
        }
    }
};

}  // namespace

auto stem(std::string_view token) -> std::string
{
    if (token.size() <= 2) {
        return std::string(token);
    }
    bool ascii = std::all_of(token.begin(), token.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
    if (!ascii) {
        return std::string(token);
    }
    return PorterStemmer(token).run();
}

}  // namespace reform

#pragma once

// Part-of-speech tagging two ways: a bigram HMM decoded by Viterbi search
// over add-one smoothed tables, and an ordered list of context rules that
// pick among a word's attested tags. Open-class tags may emit unknown words;
// closed-class tags are restricted to the training vocabulary.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/text.hpp"

namespace nlc::tagger {

inline constexpr const char* kBoundary = "<s>";

struct Tagset {
    std::vector<std::string> labels;  // file order
    std::set<std::string> open;
    std::map<std::string, std::string> gloss;

    bool contains(const std::string& t) const {
        return std::find(labels.begin(), labels.end(), t) != labels.end();
    }
};

// A label is either all upper-case alphanumerics (NN, VB2) or all
// punctuation (",", "."); nothing mixed, so tags never collide with words.
inline bool valid_tag_label(const std::string& label) {
    if (label.empty()) return false;
    bool alnum = true, punct = true;
    for (const unsigned char c : label) {
        if (!(std::isdigit(c) || (std::isalpha(c) && std::isupper(c)))) alnum = false;
        if (!std::ispunct(c)) punct = false;
    }
    return alnum || punct;
}

// TSV: label<TAB>open|closed[<TAB>gloss]
inline Tagset parse_tagset(const std::string& content) {
    Tagset ts;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto f = text::split(raw, '\t');
        const std::string where = " (tagset line " + std::to_string(lineno) + ")";
        if (f.size() < 2 || f.size() > 3) throw ResourceError("expected 2 or 3 fields" + where);
        const std::string label = text::trim(f[0]);
        const std::string kind = text::trim(f[1]);
        if (!valid_tag_label(label))
            throw ResourceError("label must be upper-alphanumeric or punctuation" + where);
        if (ts.contains(label)) throw ResourceError("duplicate label " + label + where);
        if (kind == "open") ts.open.insert(label);
        else if (kind != "closed")
            throw ResourceError("class must be open or closed" + where);
        ts.labels.push_back(label);
        if (f.size() == 3) ts.gloss[label] = text::trim(f[2]);
    }
    return ts;
}

using TaggedSentence = std::vector<std::pair<std::string, std::string>>;

// One sentence per non-empty line; tokens are word/TAG with the tag after
// the last slash.
inline std::vector<TaggedSentence> parse_tagged(const std::string& content) {
    std::vector<TaggedSentence> out;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        TaggedSentence sentence;
        for (const auto& token : text::split_ws(line)) {
            const auto slash = token.rfind('/');
            const std::string where =
                " in '" + token + "' (corpus line " + std::to_string(lineno) + ")";
            if (slash == std::string::npos || slash == 0 || slash + 1 == token.size())
                throw ResourceError("expected word/TAG" + where);
            sentence.emplace_back(token.substr(0, slash), token.substr(slash + 1));
        }
        out.push_back(std::move(sentence));
    }
    return out;
}

// Per-word tag counts from a tagged corpus.
struct TagLexicon {
    std::map<std::string, std::map<std::string, std::size_t>> counts;

    static TagLexicon build(const std::vector<TaggedSentence>& sentences) {
        TagLexicon lex;
        for (const auto& s : sentences)
            for (const auto& [word, tag] : s) ++lex.counts[word][tag];
        return lex;
    }

    std::set<std::string> ambiguity_class(const std::string& word) const {
        std::set<std::string> out;
        const auto it = counts.find(word);
        if (it == counts.end()) return out;
        for (const auto& [tag, c] : it->second) out.insert(tag);
        return out;
    }

    // Most frequent tag for the word, lex-smaller on ties; empty if unseen.
    std::string head(const std::string& word) const {
        const auto it = counts.find(word);
        if (it == counts.end()) return "";
        std::string best;
        std::size_t best_count = 0;
        for (const auto& [tag, c] : it->second)
            if (c > best_count) {
                best = tag;
                best_count = c;
            }
        return best;
    }
};

class HmmTagger {
public:
    static HmmTagger train(const std::vector<TaggedSentence>& sentences, const Tagset& ts) {
        HmmTagger tg;
        tg.tagset_ = ts;
        tg.states_ = ts.labels;
        std::sort(tg.states_.begin(), tg.states_.end());
        for (const auto& sentence : sentences) {
            std::string prev = kBoundary;
            for (const auto& [word, tag] : sentence) {
                if (!ts.contains(tag))
                    throw Error("tag " + tag + " is not in the tagset");
                ++tg.trans_[prev][tag];
                ++tg.trans_total_[prev];
                ++tg.emis_[tag][word];
                ++tg.emis_total_[tag];
                tg.vocab_.insert(word);
                prev = tag;
            }
        }
        return tg;
    }

    const Tagset& tagset() const { return tagset_; }
    const std::set<std::string>& vocabulary() const { return vocab_; }

    // Add-one over the tagset: (c+1)/(C+|T|).
    double transition(const std::string& prev, const std::string& next) const {
        const double t = static_cast<double>(tagset_.labels.size());
        double c = 0.0, total = 0.0;
        const auto row = trans_.find(prev);
        if (row != trans_.end()) {
            const auto cell = row->second.find(next);
            if (cell != row->second.end()) c = static_cast<double>(cell->second);
        }
        const auto tot = trans_total_.find(prev);
        if (tot != trans_total_.end()) total = static_cast<double>(tot->second);
        return (c + 1.0) / (total + t);
    }

    // Add-one over the tag's emission domain: the vocabulary plus one
    // unknown-word slot for open classes, the vocabulary alone for closed
    // classes (which therefore cannot emit unknown words).
    double emission(const std::string& tag, const std::string& word) const {
        const bool open = tagset_.open.count(tag) > 0;
        const bool known = vocab_.count(word) > 0;
        if (!known && !open) return 0.0;
        const double domain = static_cast<double>(vocab_.size()) + (open ? 1.0 : 0.0);
        double c = 0.0, total = 0.0;
        if (known) {
            const auto row = emis_.find(tag);
            if (row != emis_.end()) {
                const auto cell = row->second.find(word);
                if (cell != row->second.end()) c = static_cast<double>(cell->second);
            }
        }
        const auto tot = emis_total_.find(tag);
        if (tot != emis_total_.end()) total = static_cast<double>(tot->second);
        return (c + 1.0) / (total + domain);
    }

    // Viterbi in log space. Predecessor and final-state ties go to the
    // lexicographically smaller tag, so among equally likely sequences the
    // one whose reversal is lex-smallest wins.
    std::vector<std::string> tag(const std::vector<std::string>& words) const {
        if (words.empty()) return {};
        const std::size_t n = words.size(), m = states_.size();
        constexpr double ninf = -std::numeric_limits<double>::infinity();
        std::vector<std::vector<double>> dp(n, std::vector<double>(m, ninf));
        std::vector<std::vector<std::size_t>> bp(n, std::vector<std::size_t>(m, 0));
        for (std::size_t j = 0; j < m; ++j)
            dp[0][j] = std::log(transition(kBoundary, states_[j])) +
                       std::log(emission(states_[j], words[0]));
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                double best = dp[i - 1][0] + std::log(transition(states_[0], states_[j]));
                std::size_t arg = 0;
                for (std::size_t p = 1; p < m; ++p) {
                    const double cand =
                        dp[i - 1][p] + std::log(transition(states_[p], states_[j]));
                    if (cand > best) {
                        best = cand;
                        arg = p;
                    }
                }
                dp[i][j] = best + std::log(emission(states_[j], words[i]));
                bp[i][j] = arg;
            }
        }
        std::size_t cur = 0;
        for (std::size_t j = 1; j < m; ++j)
            if (dp[n - 1][j] > dp[n - 1][cur]) cur = j;
        std::vector<std::string> out(n);
        for (std::size_t i = n; i-- > 0;) {
            out[i] = states_[cur];
            cur = bp[i][cur];
        }
        return out;
    }

    double sequence_log_score(const std::vector<std::string>& words,
                              const std::vector<std::string>& tags) const {
        if (words.size() != tags.size())
            throw Error("words and tags must have the same length");
        double acc = 0.0;
        std::string prev = kBoundary;
        for (std::size_t i = 0; i < words.size(); ++i) {
            acc += std::log(transition(prev, tags[i]));
            acc += std::log(emission(tags[i], words[i]));
            prev = tags[i];
        }
        return acc;
    }

private:
    Tagset tagset_;
    std::vector<std::string> states_;
    std::set<std::string> vocab_;
    std::map<std::string, std::map<std::string, std::size_t>> trans_;
    std::map<std::string, std::size_t> trans_total_;
    std::map<std::string, std::map<std::string, std::size_t>> emis_;
    std::map<std::string, std::size_t> emis_total_;
};

struct ContextRule {
    std::string prev;             // empty: no left-context condition
    std::set<std::string> ambig;  // empty: no attested-tags condition
    std::string result;
};

// Line format: [PREV=TAG] [AMBIG~T1,T2,...] => TAG
inline std::vector<ContextRule> parse_rules(const std::string& content) {
    std::vector<ContextRule> out;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto tokens = text::split_ws(line);
        const std::string where = " (rule line " + std::to_string(lineno) + ")";
        const auto arrow = std::find(tokens.begin(), tokens.end(), "=>");
        if (arrow == tokens.end() || arrow + 2 != tokens.end())
            throw ResourceError("expected 'conditions => TAG'" + where);
        ContextRule rule;
        rule.result = tokens.back();
        for (auto it = tokens.begin(); it != arrow; ++it) {
            if (it->rfind("PREV=", 0) == 0) {
                if (!rule.prev.empty()) throw ResourceError("duplicate PREV" + where);
                rule.prev = it->substr(5);
                if (rule.prev.empty()) throw ResourceError("empty PREV" + where);
            } else if (it->rfind("AMBIG~", 0) == 0) {
                if (!rule.ambig.empty()) throw ResourceError("duplicate AMBIG" + where);
                for (const auto& t : text::split(it->substr(6), ','))
                    if (!t.empty()) rule.ambig.insert(t);
                if (rule.ambig.empty()) throw ResourceError("empty AMBIG" + where);
            } else {
                throw ResourceError("unknown condition '" + *it + "'" + where);
            }
        }
        out.push_back(std::move(rule));
    }
    return out;
}

// First matching rule assigns the tag; a rule matches when its PREV equals
// the previously assigned tag (boundary marker before the first word) and
// its AMBIG set is contained in the word's attested tags. Without a match,
// known words take their most frequent tag and unknown words the corpus-wide
// most frequent open-class tag.
inline std::vector<std::string> apply_rules(const std::vector<std::string>& words,
                                            const std::vector<ContextRule>& rules,
                                            const TagLexicon& lex, const Tagset& ts) {
    std::map<std::string, std::size_t> open_totals;
    for (const auto& [word, tags] : lex.counts)
        for (const auto& [tag, c] : tags)
            if (ts.open.count(tag)) open_totals[tag] += c;
    std::string fallback;
    std::size_t fallback_count = 0;
    for (const auto& [tag, c] : open_totals)
        if (c > fallback_count) {
            fallback = tag;
            fallback_count = c;
        }

    std::vector<std::string> out;
    std::string prev = kBoundary;
    for (const auto& word : words) {
        const std::set<std::string> cls = lex.ambiguity_class(word);
        std::string assigned;
        for (const auto& rule : rules) {
            if (!rule.prev.empty() && rule.prev != prev) continue;
            if (!std::includes(cls.begin(), cls.end(), rule.ambig.begin(), rule.ambig.end()))
                continue;
            assigned = rule.result;
            break;
        }
        if (assigned.empty()) assigned = cls.empty() ? fallback : lex.head(word);
        out.push_back(assigned);
        prev = assigned;
    }
    return out;
}

}  // namespace nlc::tagger

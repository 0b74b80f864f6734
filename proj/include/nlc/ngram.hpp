#pragma once

// Count-based n-gram language model with sentence-boundary markers, an
// unknown-word class, and three estimators: maximum likelihood, add-one, and
// Witten-Bell. Counts are kept for every history length up to order-1 so the
// same table serves n-gram queries and the unigram prior.

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/text.hpp"

namespace nlc::ngram {

inline constexpr const char* kStart = "<s>";
inline constexpr const char* kEnd = "</s>";
inline constexpr const char* kUnk = "<unk>";

enum class Smoothing { MLE, ADD_ONE, WITTEN_BELL };

class Model {
public:
    static Model train(const std::vector<std::vector<std::string>>& sentences,
                       std::size_t order) {
        if (order == 0) throw Error("model order must be at least 1");
        Model m;
        m.order_ = order;
        m.vocab_ = {kStart, kEnd, kUnk};
        for (const auto& sentence : sentences)
            for (const auto& w : sentence) m.vocab_.insert(w);
        for (const auto& sentence : sentences) {
            std::vector<std::string> padded(order - 1, kStart);
            padded.insert(padded.end(), sentence.begin(), sentence.end());
            padded.push_back(kEnd);
            for (std::size_t i = order - 1; i < padded.size(); ++i) {
                for (std::size_t k = 0; k < order; ++k) {
                    const std::vector<std::string> history(padded.begin() + (i - k),
                                                           padded.begin() + i);
                    Hist& h = m.table_[history];
                    ++h.counts[padded[i]];
                    ++h.total;
                }
            }
        }
        return m;
    }

    std::size_t order() const { return order_; }
    const std::set<std::string>& vocabulary() const { return vocab_; }

    std::size_t count(const std::vector<std::string>& history, const std::string& word) const {
        const auto it = table_.find(history);
        if (it == table_.end()) return 0;
        const auto wit = it->second.counts.find(word);
        return wit == it->second.counts.end() ? 0 : wit->second;
    }

    std::size_t history_total(const std::vector<std::string>& history) const {
        const auto it = table_.find(history);
        return it == table_.end() ? 0 : it->second.total;
    }

    // P(word | last order-1 items of history), padding short histories with
    // the start marker and mapping out-of-vocabulary tokens to the unknown
    // class first.
    double probability(const std::string& word, std::vector<std::string> history,
                       Smoothing s) const {
        if (history.size() > order_ - 1)
            history.erase(history.begin(),
                          history.end() - static_cast<std::ptrdiff_t>(order_ - 1));
        while (history.size() < order_ - 1) history.insert(history.begin(), kStart);
        for (auto& h : history)
            if (!vocab_.count(h)) h = kUnk;
        return probability_at(history, word, s);
    }

    double unigram_probability(const std::string& word, Smoothing s) const {
        return probability_at({}, word, s);
    }

    double sequence_log_probability(const std::vector<std::string>& sentence,
                                    Smoothing s) const {
        std::vector<std::string> padded(order_ - 1, kStart);
        padded.insert(padded.end(), sentence.begin(), sentence.end());
        padded.push_back(kEnd);
        double sum = 0.0;
        for (std::size_t i = order_ - 1; i < padded.size(); ++i) {
            const std::vector<std::string> history(padded.begin() + (i - (order_ - 1)),
                                                   padded.begin() + i);
            sum += std::log(probability(padded[i], history, s));
        }
        return sum;
    }

    // Header line then one row per event: history (space-joined, empty for
    // the unigram table), word, count.
    std::string serialize() const {
        std::string out = "#ngram v1 order=" + std::to_string(order_) + "\n";
        for (const auto& [history, hist] : table_)
            for (const auto& [word, c] : hist.counts)
                out += text::join(history, " ") + "\t" + word + "\t" + std::to_string(c) + "\n";
        return out;
    }

    static Model deserialize(const std::string& content) {
        const auto lines = text::split_lines(content);
        const std::string prefix = "#ngram v1 order=";
        if (lines.empty() || lines[0].rfind(prefix, 0) != 0)
            throw ResourceError("model file must start with an '#ngram v1 order=' header");
        Model m;
        try {
            std::size_t used = 0;
            m.order_ = std::stoul(lines[0].substr(prefix.size()), &used);
            if (used != lines[0].size() - prefix.size()) throw std::invalid_argument("trail");
        } catch (const std::exception&) {
            throw ResourceError("bad order in model header: " + lines[0]);
        }
        if (m.order_ == 0) throw ResourceError("model order must be at least 1");
        m.vocab_ = {kStart, kEnd, kUnk};
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const std::string line = text::trim(lines[i]);
            if (line.empty() || line[0] == '#') continue;
            const auto fields = text::split(lines[i], '\t');
            const std::string where = " (model line " + std::to_string(i + 1) + ")";
            if (fields.size() != 3) throw ResourceError("expected 3 fields" + where);
            std::size_t c = 0;
            try {
                std::size_t used = 0;
                c = std::stoul(fields[2], &used);
                if (used != fields[2].size()) throw std::invalid_argument("trail");
            } catch (const std::exception&) {
                throw ResourceError("bad count" + where);
            }
            const std::vector<std::string> history = text::split_ws(fields[0]);
            if (history.size() >= m.order_)
                throw ResourceError("history longer than order allows" + where);
            Hist& h = m.table_[history];
            h.counts[fields[1]] += c;
            h.total += c;
            m.vocab_.insert(fields[1]);
            for (const auto& t : history) m.vocab_.insert(t);
        }
        return m;
    }

private:
    struct Hist {
        std::map<std::string, std::size_t> counts;
        std::size_t total = 0;
    };

    double probability_at(const std::vector<std::string>& history, const std::string& word,
                          Smoothing s) const {
        const std::string w = vocab_.count(word) ? word : kUnk;
        const double v = static_cast<double>(vocab_.size());
        const auto it = table_.find(history);
        if (it == table_.end() || it->second.total == 0) {
            if (s == Smoothing::MLE) return 0.0;
            return 1.0 / v;  // nothing observed: uniform over the vocabulary
        }
        const Hist& h = it->second;
        const auto wit = h.counts.find(w);
        const double c = wit == h.counts.end() ? 0.0 : static_cast<double>(wit->second);
        const double total = static_cast<double>(h.total);
        switch (s) {
            case Smoothing::MLE:
                return c / total;
            case Smoothing::ADD_ONE:
                return (c + 1.0) / (total + v);
            case Smoothing::WITTEN_BELL: {
                const double t = static_cast<double>(h.counts.size());
                if (c > 0.0) return c / (total + t);
                const double z = v - t;
                return t / (z * (total + t));
            }
        }
        return 0.0;
    }

    std::size_t order_ = 1;
    std::set<std::string> vocab_;
    std::map<std::vector<std::string>, Hist> table_;
};

// One sentence per non-empty line, whitespace tokens.
inline Model train_text(const std::string& text_content, std::size_t order) {
    std::vector<std::vector<std::string>> sentences;
    for (const auto& line : text::split_lines(text_content)) {
        auto tokens = text::split_ws(line);
        if (!tokens.empty()) sentences.push_back(std::move(tokens));
    }
    return Model::train(sentences, order);
}

}  // namespace nlc::ngram

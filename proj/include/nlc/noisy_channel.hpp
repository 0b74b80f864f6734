#pragma once

// Spelling correction as a noisy channel: a candidate's score is its add-one
// unigram prior times a channel likelihood that decays exponentially with
// edit distance from the observed form.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "nlc/edit_distance.hpp"
#include "nlc/error.hpp"
#include "nlc/ngram.hpp"

namespace nlc::noisy {

class BadLambda : public Error {
public:
    using Error::Error;
};

struct Candidate {
    std::string word;
    double distance = 0.0;
    double likelihood = 0.0;
    double prior = 0.0;
    double score = 0.0;
};

inline double channel_likelihood(const std::string& observed, const std::string& candidate,
                                 double lambda, const edit::EditCosts& costs = {}) {
    if (lambda <= 0.0) throw BadLambda("decay rate must be positive");
    return std::exp(-lambda * edit::min_edit_distance(observed, candidate, costs));
}

// Highest score first; exact ties fall back to lexicographic word order so
// the ranking is a deterministic function of (score, word) pairs alone.
inline void rank_scored(std::vector<Candidate>& candidates) {
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.word < b.word;
    });
}

inline std::vector<Candidate> correct(const std::string& observed, const ngram::Model& lm,
                                      const std::vector<std::string>& wordlist, double lambda,
                                      std::size_t max_results,
                                      const edit::EditCosts& costs = {}) {
    if (lambda <= 0.0) throw BadLambda("decay rate must be positive");
    std::vector<Candidate> out;
    out.reserve(wordlist.size());
    for (const auto& word : wordlist) {
        Candidate c;
        c.word = word;
        c.distance = edit::min_edit_distance(observed, word, costs);
        c.likelihood = std::exp(-lambda * c.distance);
        c.prior = lm.unigram_probability(word, ngram::Smoothing::ADD_ONE);
        c.score = c.prior * c.likelihood;
        out.push_back(std::move(c));
    }
    rank_scored(out);
    if (out.size() > max_results) out.resize(max_results);
    return out;
}

}  // namespace nlc::noisy

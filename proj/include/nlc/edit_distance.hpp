#pragma once

// Minimum edit distance between UTF-8 strings, computed per codepoint with a
// standard two-row dynamic program. Costs may differ per operation; the
// defaults give classic Levenshtein distance.

#include <algorithm>
#include <string>
#include <vector>

#include "nlc/text.hpp"

namespace nlc::edit {

struct EditCosts {
    double insertion = 1.0;
    double deletion = 1.0;
    double substitution = 1.0;
};

inline double min_edit_distance(const std::string& source, const std::string& target,
                                const EditCosts& costs = {}) {
    const std::vector<char32_t> src = text::utf8_codepoints(source);
    const std::vector<char32_t> dst = text::utf8_codepoints(target);
    std::vector<double> prev(dst.size() + 1), cur(dst.size() + 1);
    for (std::size_t j = 1; j <= dst.size(); ++j) prev[j] = prev[j - 1] + costs.insertion;
    for (std::size_t i = 1; i <= src.size(); ++i) {
        cur[0] = prev[0] + costs.deletion;
        for (std::size_t j = 1; j <= dst.size(); ++j) {
            const double sub = src[i - 1] == dst[j - 1] ? 0.0 : costs.substitution;
            cur[j] = std::min({prev[j - 1] + sub, prev[j] + costs.deletion,
                               cur[j - 1] + costs.insertion});
        }
        std::swap(prev, cur);
    }
    return prev[dst.size()];
}

}  // namespace nlc::edit

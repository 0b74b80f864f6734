#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "nlc/edit_distance.hpp"
#include "nlc/text.hpp"

using nlc::edit::EditCosts;
using nlc::edit::min_edit_distance;

namespace {

// Reference: try every alignment by plain recursion, no tables.
double oracle_rec(const std::vector<char32_t>& a, std::size_t i, const std::vector<char32_t>& b,
                  std::size_t j, const EditCosts& c) {
    if (i == a.size() && j == b.size()) return 0.0;
    double best = 1e300;
    if (i < a.size()) best = std::min(best, c.deletion + oracle_rec(a, i + 1, b, j, c));
    if (j < b.size()) best = std::min(best, c.insertion + oracle_rec(a, i, b, j + 1, c));
    if (i < a.size() && j < b.size()) {
        const double step = a[i] == b[j] ? 0.0 : c.substitution;
        best = std::min(best, step + oracle_rec(a, i + 1, b, j + 1, c));
    }
    return best;
}

double oracle(const std::string& s, const std::string& t, const EditCosts& c = {}) {
    return oracle_rec(nlc::text::utf8_codepoints(s), 0, nlc::text::utf8_codepoints(t), 0, c);
}

std::string random_word(std::mt19937& rng, int max_len) {
    static const std::vector<std::string> symbols = {"a", "b", "c", "\xc3\xa9"};
    std::uniform_int_distribution<int> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
    std::string out;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) out += symbols[pick(rng)];
    return out;
}

}  // namespace

TEST_CASE("edit distance matches hand-checked pairs") {
    CHECK(min_edit_distance("Ta", "Da") == 1.0);
    CHECK(min_edit_distance("Taes", "Days") == 2.0);
    CHECK(min_edit_distance("", "") == 0.0);
    CHECK(min_edit_distance("abc", "abc") == 0.0);
    CHECK(min_edit_distance("", "abc") == 3.0);
    CHECK(min_edit_distance("abc", "") == 3.0);
    CHECK(min_edit_distance("kitten", "sitting") == 3.0);
    CHECK(min_edit_distance("intention", "execution") == 5.0);
}

TEST_CASE("edit distance counts codepoints, not bytes") {
    // Two-byte e-acute differs from ascii e by one substitution.
    CHECK(min_edit_distance("caf\xc3\xa9", "cafe") == 1.0);
    CHECK(min_edit_distance("caf\xc3\xa9", "caf") == 1.0);
    CHECK(min_edit_distance("\xc3\xa9", "") == 1.0);
}

TEST_CASE("per-operation costs are honored") {
    const EditCosts costly_sub{1.0, 1.0, 3.0};
    // Substitution is priced out: delete plus insert wins.
    CHECK(min_edit_distance("a", "b", costly_sub) == 2.0);
    CHECK(min_edit_distance("a", "b", costly_sub) == oracle("a", "b", costly_sub));

    const EditCosts cheap_ins{0.25, 2.0, 1.5};
    CHECK(min_edit_distance("", "aa", cheap_ins) == 0.5);
    CHECK(min_edit_distance("ab", "ba", cheap_ins) == oracle("ab", "ba", cheap_ins));
}

TEST_CASE("edit distance agrees with the recursive reference") {
    std::mt19937 rng(20260819);
    const std::vector<EditCosts> cost_sets = {
        {1.0, 1.0, 1.0}, {1.0, 1.0, 2.0}, {0.5, 1.5, 1.0}};
    for (int trial = 0; trial < 150; ++trial) {
        const std::string s = random_word(rng, 5);
        const std::string t = random_word(rng, 5);
        const EditCosts& c = cost_sets[trial % cost_sets.size()];
        INFO("s=" << s << " t=" << t << " trial=" << trial);
        CHECK(min_edit_distance(s, t, c) == oracle(s, t, c));
    }
}

TEST_CASE("edit distance is a metric under unit costs") {
    std::mt19937 rng(7);
    std::vector<std::string> words;
    for (int i = 0; i < 12; ++i) words.push_back(random_word(rng, 4));
    for (const auto& a : words) {
        CHECK(min_edit_distance(a, a) == 0.0);
        for (const auto& b : words) {
            const double dab = min_edit_distance(a, b);
            CHECK(dab == min_edit_distance(b, a));
            if (a != b) CHECK(dab >= 1.0);
            for (const auto& c : words)
                CHECK(min_edit_distance(a, c) <= dab + min_edit_distance(b, c));
        }
    }
}

TEST_CASE("edit distance bounds") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::string s = random_word(rng, 6);
        const std::string t = random_word(rng, 6);
        const auto sn = nlc::text::utf8_codepoints(s).size();
        const auto tn = nlc::text::utf8_codepoints(t).size();
        const double d = min_edit_distance(s, t);
        const double longer = static_cast<double>(std::max(sn, tn));
        const double gap = static_cast<double>(sn > tn ? sn - tn : tn - sn);
        CHECK(d <= longer);
        CHECK(d >= gap);
    }
}

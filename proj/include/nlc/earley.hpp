#pragma once

// Earley chart parsing over a Grammar, parse-tree extraction with feature
// filtering, and an independent bottom-up CYK recognizer (with conversion to
// binary form) used to cross-check recognition.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/feature_structure.hpp"
#include "nlc/grammar.hpp"
#include "nlc/logic.hpp"

namespace nlc::earley {

class UnknownToken : public Error {
public:
    using Error::Error;
};
class NotCNF : public Error {
public:
    using Error::Error;
};

// One derivation step recorded on an item: `prev` is the same rule with the
// dot one position left; `child` is the completed item consumed to advance,
// or -1 when the dot moved over a scanned word.
struct Way {
    int prev = -1;
    int child = -1;
};

struct Item {
    int prod = 0;
    int dot = 0;
    int origin = 0;
    int end = 0;
    std::vector<Way> ways;
};

struct Chart {
    bool accepted = false;
    std::vector<Item> items;
    std::vector<std::string> tokens;

    std::size_t item_count() const { return items.size(); }
};

struct TreeNode {
    std::string label;
    std::string token;  // nonempty iff this is a preterminal over one word
    std::vector<TreeNode> children;
    fs::FeatureStructure features;
    logic::Expr sem;        // lexical semantics at leaves; composed above
    int production = -1;    // index into Grammar::productions; -1 at leaves
};

inline std::string tree_sexpr(const TreeNode& t) {
    if (t.children.empty()) return "(" + t.label + " " + t.token + ")";
    std::string out = "(" + t.label;
    for (const auto& c : t.children) out += " " + tree_sexpr(c);
    return out + ")";
}

inline Chart earley_parse(const grammar::Grammar& g, const std::vector<std::string>& tokens) {
    if (tokens.empty()) throw Error("cannot parse an empty token sequence");
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (g.categories_of(tokens[i]).empty())
            throw UnknownToken("unknown token '" + tokens[i] + "' at position " +
                               std::to_string(i + 1));

    Chart chart;
    chart.tokens = tokens;
    const int n = static_cast<int>(tokens.size());

    std::map<std::array<int, 4>, int> index;
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(n) + 1);

    const auto add = [&](int prod, int dot, int origin, int end,
                         const Way* way) {
        const std::array<int, 4> key = {prod, dot, origin, end};
        const auto [it, inserted] = index.try_emplace(key, static_cast<int>(chart.items.size()));
        if (inserted) {
            chart.items.push_back({prod, dot, origin, end, {}});
            cells[static_cast<std::size_t>(end)].push_back(it->second);
        }
        if (way != nullptr) chart.items[static_cast<std::size_t>(it->second)].ways.push_back(*way);
    };

    for (std::size_t p = 0; p < g.productions.size(); ++p)
        if (g.productions[p].lhs == g.start) add(static_cast<int>(p), 0, 0, 0, nullptr);

    for (int j = 0; j <= n; ++j) {
        auto& cell = cells[static_cast<std::size_t>(j)];
        for (std::size_t qi = 0; qi < cell.size(); ++qi) {
            const int id = cell[qi];
            const Item item = chart.items[static_cast<std::size_t>(id)];  // copy: vector grows
            const grammar::Production& prod = g.productions[static_cast<std::size_t>(item.prod)];

            if (item.dot < static_cast<int>(prod.rhs.size())) {
                const std::string& next = prod.rhs[static_cast<std::size_t>(item.dot)];
                for (std::size_t p = 0; p < g.productions.size(); ++p)
                    if (g.productions[p].lhs == next) add(static_cast<int>(p), 0, j, j, nullptr);
                if (j < n && !g.entries_for(tokens[static_cast<std::size_t>(j)], next).empty()) {
                    const Way way{id, -1};
                    add(item.prod, item.dot + 1, item.origin, j + 1, &way);
                }
                continue;
            }

            // item is complete: advance every rule waiting on its lhs
            const auto& waiting = cells[static_cast<std::size_t>(item.origin)];
            for (std::size_t wi = 0; wi < waiting.size(); ++wi) {
                const int wid = waiting[wi];
                const Item& w = chart.items[static_cast<std::size_t>(wid)];
                const grammar::Production& wp = g.productions[static_cast<std::size_t>(w.prod)];
                if (w.dot < static_cast<int>(wp.rhs.size()) &&
                    wp.rhs[static_cast<std::size_t>(w.dot)] == prod.lhs) {
                    const Way way{wid, id};
                    add(w.prod, w.dot + 1, w.origin, j, &way);
                }
            }
        }
    }

    for (const Item& it : chart.items) {
        const grammar::Production& p = g.productions[static_cast<std::size_t>(it.prod)];
        if (p.lhs == g.start && it.dot == static_cast<int>(p.rhs.size()) && it.origin == 0 &&
            it.end == n) {
            chart.accepted = true;
            break;
        }
    }
    return chart;
}

namespace detail {

// Lazy derivation enumeration over the chart's backpointers. Sinks return
// false to stop the whole walk (used to honor the extraction limit). Items
// already on the current recursion path are skipped, which terminates
// enumeration under cyclic unit derivations.
class Extractor {
public:
    Extractor(const Chart& chart, const grammar::Grammar& g) : chart_(chart), g_(g) {}

    bool item_trees(int id, const std::function<bool(TreeNode&&)>& sink) {
        if (path_.count(id)) return true;
        path_.insert(id);
        const Item& item = chart_.items[static_cast<std::size_t>(id)];
        const grammar::Production& prod = g_.productions[static_cast<std::size_t>(item.prod)];
        const bool cont = child_seqs(id, [&](std::vector<TreeNode>&& kids) {
            std::vector<fs::FeatureStructure> kfs;
            kfs.reserve(kids.size());
            for (const auto& k : kids) kfs.push_back(k.features);
            fs::UnifyResult r = grammar::apply_production(prod, kfs);
            if (!r.ok) return true;  // constraint conflict: filter, keep walking
            TreeNode node;
            node.label = prod.lhs;
            node.children = std::move(kids);
            node.features = std::move(r.value);
            node.production = item.prod;
            return sink(std::move(node));
        });
        path_.erase(id);
        return cont;
    }

private:
    bool child_seqs(int id, const std::function<bool(std::vector<TreeNode>&&)>& sink) {
        const Item& item = chart_.items[static_cast<std::size_t>(id)];
        if (item.dot == 0) return sink({});
        const grammar::Production& prod = g_.productions[static_cast<std::size_t>(item.prod)];
        const std::string& sym = prod.rhs[static_cast<std::size_t>(item.dot) - 1];

        for (const Way& way : item.ways) {
            const bool cont = child_seqs(way.prev, [&](std::vector<TreeNode>&& prefix) {
                if (way.child >= 0) {
                    return item_trees(way.child, [&](TreeNode&& sub) {
                        std::vector<TreeNode> seq = prefix;
                        seq.push_back(std::move(sub));
                        return sink(std::move(seq));
                    });
                }
                const std::string& tok = chart_.tokens[static_cast<std::size_t>(item.end) - 1];
                for (const auto* entry : g_.entries_for(tok, sym)) {
                    TreeNode leaf;
                    leaf.label = sym;
                    leaf.token = tok;
                    leaf.features = entry->features;
                    leaf.sem = entry->sem;
                    std::vector<TreeNode> seq = prefix;
                    seq.push_back(std::move(leaf));
                    if (!sink(std::move(seq))) return false;
                }
                return true;
            });
            if (!cont) return false;
        }
        return true;
    }

    const Chart& chart_;
    const grammar::Grammar& g_;
    std::set<int> path_;
};

}  // namespace detail

// Up to `limit` feature-valid trees, in deterministic backpointer order.
inline std::vector<TreeNode> extract_trees(const Chart& chart, const grammar::Grammar& g,
                                           std::size_t limit) {
    std::vector<TreeNode> out;
    if (!chart.accepted || limit == 0) return out;
    detail::Extractor ex(chart, g);
    const int n = static_cast<int>(chart.tokens.size());
    for (std::size_t id = 0; id < chart.items.size(); ++id) {
        const Item& item = chart.items[id];
        const grammar::Production& prod = g.productions[static_cast<std::size_t>(item.prod)];
        if (prod.lhs != g.start || item.dot != static_cast<int>(prod.rhs.size()) ||
            item.origin != 0 || item.end != n)
            continue;
        const bool cont = ex.item_trees(static_cast<int>(id), [&](TreeNode&& t) {
            out.push_back(std::move(t));
            return out.size() < limit;
        });
        if (!cont) break;
    }
    return out;
}

// Weakly equivalent binary-form grammar: long rules are split through fresh
// '_k' symbols, unit rules to other nonterminals are closed out, constraints
// and attachments are dropped. Rules of the shape A -> category are kept as
// lexical scans.
inline grammar::Grammar to_cnf(const grammar::Grammar& g) {
    grammar::Grammar out;
    out.start = g.start;
    out.lexicon = g.lexicon;

    std::vector<grammar::Production> bin;
    int fresh = 0;
    for (const auto& p : g.productions) {
        if (p.rhs.size() <= 2) {
            bin.push_back({p.lhs, p.rhs, {}, nullptr});
            continue;
        }
        std::string prev = p.lhs;
        for (std::size_t i = 0; i + 2 < p.rhs.size(); ++i) {
            const std::string name = "_" + std::to_string(++fresh);
            bin.push_back({prev, {p.rhs[i], name}, {}, nullptr});
            prev = name;
        }
        bin.push_back({prev, {p.rhs[p.rhs.size() - 2], p.rhs.back()}, {}, nullptr});
    }

    std::set<std::string> lhs_set;
    for (const auto& p : bin) lhs_set.insert(p.lhs);
    const auto is_unit = [&](const grammar::Production& p) {
        return p.rhs.size() == 1 && lhs_set.count(p.rhs[0]) == 1;
    };

    std::set<std::pair<std::string, std::vector<std::string>>> seen;
    const auto emit = [&](const std::string& lhs, const std::vector<std::string>& rhs) {
        if (seen.insert({lhs, rhs}).second) out.productions.push_back({lhs, rhs, {}, nullptr});
    };

    for (const auto& p : bin)
        if (!is_unit(p) || g.is_category(p.rhs[0])) emit(p.lhs, p.rhs);

    for (const auto& p : bin) {
        if (!is_unit(p)) continue;
        // close over the unit chain starting at this rule's rhs
        std::vector<std::string> frontier = {p.rhs[0]};
        std::set<std::string> visited = {p.rhs[0]};
        while (!frontier.empty()) {
            const std::string cur = frontier.back();
            frontier.pop_back();
            for (const auto& q : bin) {
                if (q.lhs != cur) continue;
                if (is_unit(q)) {
                    if (visited.insert(q.rhs[0]).second) frontier.push_back(q.rhs[0]);
                    if (!g.is_category(q.rhs[0])) continue;
                }
                emit(p.lhs, q.rhs);
            }
        }
    }
    return out;
}

inline bool cyk_recognize(const grammar::Grammar& g, const std::vector<std::string>& tokens) {
    for (const auto& p : g.productions) {
        if (p.rhs.size() > 2)
            throw NotCNF("rule " + p.lhs + " has " + std::to_string(p.rhs.size()) + " symbols");
        if (p.rhs.size() == 1 && !g.is_category(p.rhs[0]))
            throw NotCNF("rule " + p.lhs + " -> " + p.rhs[0] + " is a unit rule");
    }
    if (tokens.empty()) return false;
    const std::size_t n = tokens.size();

    // span table indexed [start][length-1]
    std::vector<std::vector<std::set<std::string>>> table(
        n, std::vector<std::set<std::string>>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto cats = g.categories_of(tokens[i]);
        if (cats.empty()) return false;
        table[i][0].insert(cats.begin(), cats.end());
        for (const auto& p : g.productions)
            if (p.rhs.size() == 1 &&
                std::find(cats.begin(), cats.end(), p.rhs[0]) != cats.end())
                table[i][0].insert(p.lhs);
    }

    for (std::size_t len = 2; len <= n; ++len) {
        for (std::size_t i = 0; i + len <= n; ++i) {
            auto& cell = table[i][len - 1];
            for (std::size_t split = 1; split < len; ++split) {
                const auto& left = table[i][split - 1];
                const auto& right = table[i + split][len - split - 1];
                for (const auto& p : g.productions)
                    if (p.rhs.size() == 2 && left.count(p.rhs[0]) == 1 &&
                        right.count(p.rhs[1]) == 1)
                        cell.insert(p.lhs);
            }
        }
    }
    return table[0][n - 1].count(g.start) == 1;
}

}  // namespace nlc::earley

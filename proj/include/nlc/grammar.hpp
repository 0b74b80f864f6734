#pragma once

// Context-free grammars with per-production feature constraints and semantic
// attachments, plus the terminal lexicon mapping words to preterminal
// categories. The feature-structure kernel lives in feature_structure.hpp;
// this header adds the grammar file format and constraint evaluation.

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/feature_structure.hpp"
#include "nlc/logic.hpp"
#include "nlc/text.hpp"

namespace nlc::grammar {

class SyntaxError : public Error {
public:
    using Error::Error;
};
class EpsilonProduction : public Error {
public:
    using Error::Error;
};
class UndefinedSymbol : public Error {
public:
    using Error::Error;
};
class BadConstraintPath : public Error {
public:
    using Error::Error;
};
class ArityMismatch : public Error {
public:
    using Error::Error;
};

// One side of a path equation: slot 0 is the lhs, slot k >= 1 the k-th rhs
// symbol; the path walks feature labels inside that constituent.
struct Ref {
    int slot = 0;
    std::vector<std::string> path;
};

// <left> = <right> equates two paths; <left> = atom pins a path to a value.
struct Constraint {
    Ref left;
    std::optional<Ref> right;
    std::optional<std::string> atom;
};

struct Production {
    std::string lhs;
    std::vector<std::string> rhs;
    std::vector<Constraint> constraints;
    logic::Expr attachment;  // null when the rule carries no semantics
};

struct LexEntry {
    std::string word;
    std::string category;
    fs::FeatureStructure features;
    logic::Expr sem;  // null when the entry carries no semantics
};

struct Grammar {
    std::vector<Production> productions;
    std::string start;
    std::vector<LexEntry> lexicon;

    bool is_nonterminal(const std::string& name) const {
        for (const auto& p : productions)
            if (p.lhs == name) return true;
        return false;
    }
    bool is_category(const std::string& name) const {
        for (const auto& e : lexicon)
            if (e.category == name) return true;
        return false;
    }
    std::vector<std::string> categories_of(const std::string& word) const {
        std::vector<std::string> out;
        for (const auto& e : lexicon)
            if (e.word == word &&
                std::find(out.begin(), out.end(), e.category) == out.end())
                out.push_back(e.category);
        return out;
    }
    std::vector<const LexEntry*> entries_for(const std::string& word) const {
        std::vector<const LexEntry*> out;
        for (const auto& e : lexicon)
            if (e.word == word) out.push_back(&e);
        return out;
    }
    std::vector<const LexEntry*> entries_for(const std::string& word,
                                             const std::string& category) const {
        std::vector<const LexEntry*> out;
        for (const auto& e : lexicon)
            if (e.word == word && e.category == category) out.push_back(&e);
        return out;
    }
    std::set<std::string> words() const {
        std::set<std::string> out;
        for (const auto& e : lexicon) out.insert(e.word);
        return out;
    }
};

namespace detail {

inline std::string at_line(int line) { return " (line " + std::to_string(line) + ")"; }

inline Ref parse_ref(const std::string& inner, std::size_t rhs_len, int line) {
    const std::vector<std::string> parts = text::split_ws(inner);
    if (parts.empty()) throw BadConstraintPath("empty path reference" + at_line(line));
    Ref ref;
    const std::string& slot = parts[0];
    if (slot == "lhs") {
        ref.slot = 0;
    } else if (slot.size() > 3 && slot.compare(0, 3, "rhs") == 0) {
        int k = 0;
        for (std::size_t i = 3; i < slot.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(slot[i])))
                throw BadConstraintPath("bad slot '" + slot + "'" + at_line(line));
            k = k * 10 + (slot[i] - '0');
        }
        if (k < 1 || static_cast<std::size_t>(k) > rhs_len)
            throw BadConstraintPath("slot '" + slot + "' is out of range for a " +
                                    std::to_string(rhs_len) + "-symbol rule" + at_line(line));
        ref.slot = k;
    } else {
        throw BadConstraintPath("slot must be lhs or rhs<k>, got '" + slot + "'" +
                                at_line(line));
    }
    ref.path.assign(parts.begin() + 1, parts.end());
    if (ref.path.empty())
        throw BadConstraintPath("path reference '<" + inner + ">' names no feature" +
                                at_line(line));
    return ref;
}

// "<lhs A B> = <rhs1 C>" or "<rhs2 A> = atom"
inline Constraint parse_constraint(const std::string& text, std::size_t rhs_len, int line) {
    const std::string t = text::trim(text);
    if (t.empty() || t[0] != '<')
        throw SyntaxError("constraint must start with a <...> path" + at_line(line));
    const std::size_t close = t.find('>');
    if (close == std::string::npos)
        throw SyntaxError("unterminated path reference" + at_line(line));
    Constraint c;
    c.left = parse_ref(t.substr(1, close - 1), rhs_len, line);
    std::string rest = text::trim(t.substr(close + 1));
    if (rest.empty() || rest[0] != '=')
        throw SyntaxError("expected '=' in constraint '" + t + "'" + at_line(line));
    rest = text::trim(rest.substr(1));
    if (rest.empty()) throw SyntaxError("constraint '" + t + "' has no right side" + at_line(line));
    if (rest[0] == '<') {
        const std::size_t rclose = rest.find('>');
        if (rclose == std::string::npos || !text::trim(rest.substr(rclose + 1)).empty())
            throw SyntaxError("malformed path reference in '" + t + "'" + at_line(line));
        c.right = parse_ref(rest.substr(1, rclose - 1), rhs_len, line);
    } else {
        if (text::split_ws(rest).size() != 1)
            throw SyntaxError("constraint value must be one atom, got '" + rest + "'" +
                              at_line(line));
        c.atom = rest;
    }
    return c;
}

inline logic::Expr parse_attachment(const std::string& text, int line) {
    try {
        return logic::parse(text);
    } catch (const logic::ParseError& e) {
        throw SyntaxError(std::string("bad semantic attachment: ") + e.what() + at_line(line));
    }
}

// Splits a line into its core and an optional "::" attachment tail.
inline std::pair<std::string, std::string> split_attachment(const std::string& line) {
    const std::size_t pos = line.find("::");
    if (pos == std::string::npos) return {text::trim(line), ""};
    return {text::trim(line.substr(0, pos)), text::trim(line.substr(pos + 2))};
}

// Extracts an optional "{ ... }" block; returns {before, inside} and fails
// on an unterminated or trailed block.
inline std::pair<std::string, std::optional<std::string>> split_block(const std::string& text,
                                                                      int line) {
    const std::size_t open = text.find('{');
    if (open == std::string::npos) return {text::trim(text), std::nullopt};
    const std::size_t close = text.find('}', open);
    if (close == std::string::npos)
        throw SyntaxError("unterminated { block" + at_line(line));
    if (!text::trim(text.substr(close + 1)).empty())
        throw SyntaxError("unexpected text after } block" + at_line(line));
    return {text::trim(text.substr(0, open)), text::trim(text.substr(open + 1, close - open - 1))};
}

inline void append_feature_leaves(const fs::FeatureStructure& f,
                                  std::vector<std::string>& prefix,
                                  std::vector<std::string>& out) {
    for (const auto& [label, value] : f.entries()) {
        prefix.push_back(label);
        if (value.is_atom()) {
            out.push_back(text::join(prefix, " ") + " = " + value.atom);
        } else {
            append_feature_leaves(*value.nested, prefix, out);
        }
        prefix.pop_back();
    }
}

inline std::string ref_text(const Ref& r) {
    const std::string slot = r.slot == 0 ? "lhs" : "rhs" + std::to_string(r.slot);
    return "<" + slot + " " + text::join(r.path, " ") + ">";
}

}  // namespace detail

inline Grammar load_grammar(const std::string& text) {
    Grammar g;
    const std::vector<std::string> lines = text::split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int line = static_cast<int>(li) + 1;
        std::string raw = lines[li];
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        raw = text::trim(raw);
        if (raw.empty()) continue;

        const auto [core, attachment_text] = detail::split_attachment(raw);
        const std::size_t arrow = core.find("->");
        if (arrow != std::string::npos) {
            const std::vector<std::string> lhs_part = text::split_ws(core.substr(0, arrow));
            if (lhs_part.size() != 1)
                throw SyntaxError("a rule needs exactly one lhs symbol" + detail::at_line(line));
            const auto [rhs_text, block] = detail::split_block(core.substr(arrow + 2), line);

            if (rhs_text.find('|') != std::string::npos) {
                if (block.has_value() || !attachment_text.empty())
                    throw SyntaxError(
                        "alternatives cannot carry constraints or attachments" +
                        detail::at_line(line));
                for (const std::string& alt : text::split(rhs_text, '|')) {
                    Production p;
                    p.lhs = lhs_part[0];
                    p.rhs = text::split_ws(alt);
                    if (p.rhs.empty())
                        throw EpsilonProduction("empty alternative" + detail::at_line(line));
                    g.productions.push_back(std::move(p));
                }
                continue;
            }

            Production p;
            p.lhs = lhs_part[0];
            p.rhs = text::split_ws(rhs_text);
            if (p.rhs.empty())
                throw EpsilonProduction("rule for " + p.lhs + " has an empty rhs" +
                                        detail::at_line(line));
            if (block.has_value() && !block->empty())
                for (const std::string& eq : text::split(*block, ';'))
                    p.constraints.push_back(detail::parse_constraint(eq, p.rhs.size(), line));
            if (!attachment_text.empty()) {
                p.attachment =
                    logic::resolve_child_refs(detail::parse_attachment(attachment_text, line));
                const int max_ref = logic::child_ref_max(p.attachment);
                if (static_cast<std::size_t>(max_ref) > p.rhs.size())
                    throw BadConstraintPath("attachment references rhs" +
                                            std::to_string(max_ref) + " on a " +
                                            std::to_string(p.rhs.size()) + "-symbol rule" +
                                            detail::at_line(line));
            }
            g.productions.push_back(std::move(p));
            continue;
        }

        const std::size_t colon = core.find(':');
        if (colon == std::string::npos)
            throw SyntaxError("expected a rule or a lexicon entry" + detail::at_line(line));
        LexEntry e;
        const std::vector<std::string> word_part = text::split_ws(core.substr(0, colon));
        if (word_part.size() != 1)
            throw SyntaxError("a lexicon entry needs exactly one word" + detail::at_line(line));
        e.word = word_part[0];
        const auto [cat_text, block] = detail::split_block(core.substr(colon + 1), line);
        const std::vector<std::string> cat_part = text::split_ws(cat_text);
        if (cat_part.size() != 1)
            throw SyntaxError("a lexicon entry needs exactly one category" +
                              detail::at_line(line));
        e.category = cat_part[0];
        if (block.has_value() && !block->empty()) {
            for (const std::string& seg : text::split(*block, ';')) {
                const std::size_t eqpos = seg.find('=');
                if (eqpos == std::string::npos)
                    throw SyntaxError("expected PATH = atom in feature block" +
                                      detail::at_line(line));
                const std::vector<std::string> path = text::split_ws(seg.substr(0, eqpos));
                const std::vector<std::string> value = text::split_ws(seg.substr(eqpos + 1));
                if (path.empty() || value.size() != 1)
                    throw SyntaxError("expected PATH = atom in feature block" +
                                      detail::at_line(line));
                e.features.set_path(path, fs::FeatValue::of_atom(value[0]));
            }
        }
        if (!attachment_text.empty()) e.sem = detail::parse_attachment(attachment_text, line);
        g.lexicon.push_back(std::move(e));
    }

    if (g.productions.empty()) throw SyntaxError("grammar defines no productions");
    g.start = g.productions.front().lhs;
    for (const auto& p : g.productions)
        for (const auto& sym : p.rhs)
            if (!g.is_nonterminal(sym) && !g.is_category(sym))
                throw UndefinedSymbol("symbol '" + sym +
                                      "' has no rule and no lexicon entry");
    return g;
}

inline std::string serialize(const Grammar& g) {
    std::string out;
    for (const auto& p : g.productions) {
        out += p.lhs + " -> " + text::join(p.rhs, " ");
        if (!p.constraints.empty()) {
            out += " { ";
            for (std::size_t i = 0; i < p.constraints.size(); ++i) {
                if (i) out += " ; ";
                const Constraint& c = p.constraints[i];
                out += detail::ref_text(c.left) + " = ";
                out += c.right.has_value() ? detail::ref_text(*c.right) : *c.atom;
            }
            out += " }";
        }
        if (p.attachment != nullptr) out += " :: " + logic::to_string(p.attachment);
        out += "\n";
    }
    for (const auto& e : g.lexicon) {
        out += e.word + " : " + e.category;
        if (!e.features.empty()) {
            std::vector<std::string> leaves;
            std::vector<std::string> prefix;
            detail::append_feature_leaves(e.features, prefix, leaves);
            out += " { " + text::join(leaves, " ; ") + " }";
        }
        if (e.sem != nullptr) out += " :: " + logic::to_string(e.sem);
        out += "\n";
    }
    return out;
}

namespace detail {

struct ValueUnify {
    bool ok = false;
    fs::FeatValue value;
    std::vector<std::string> conflict_path;
    std::string left, right;
};

inline ValueUnify unify_values(const fs::FeatValue& a, const fs::FeatValue& b) {
    ValueUnify r;
    if (a.is_atom() != b.is_atom() || (a.is_atom() && a.atom != b.atom)) {
        r.left = fs::detail::render(a);
        r.right = fs::detail::render(b);
        return r;
    }
    if (a.is_atom()) {
        r.ok = true;
        r.value = a;
        return r;
    }
    const fs::UnifyResult u = fs::unify(*a.nested, *b.nested);
    if (!u.ok) {
        r.conflict_path = u.conflict_path;
        r.left = u.left;
        r.right = u.right;
        return r;
    }
    r.ok = true;
    r.value = fs::FeatValue::of_nested(u.value);
    return r;
}

}  // namespace detail

// Evaluates the production's path equations over copies of the children,
// threading updates left to right, and returns the synthesized lhs structure
// (or the first conflict, reported at the left reference's path).
inline fs::UnifyResult apply_production(const Production& p,
                                        const std::vector<fs::FeatureStructure>& children) {
    if (children.size() != p.rhs.size())
        throw ArityMismatch("rule " + p.lhs + " expects " + std::to_string(p.rhs.size()) +
                            " children, got " + std::to_string(children.size()));
    fs::FeatureStructure lhs;
    std::vector<fs::FeatureStructure> kids = children;
    const auto slot = [&](int k) -> fs::FeatureStructure& {
        return k == 0 ? lhs : kids[static_cast<std::size_t>(k) - 1];
    };

    fs::UnifyResult result;
    for (const Constraint& c : p.constraints) {
        const fs::FeatValue* lv = slot(c.left.slot).at_path(c.left.path);
        const fs::FeatValue rv_atom = fs::FeatValue::of_atom(c.atom.value_or(""));
        const fs::FeatValue* rv = nullptr;
        if (c.atom.has_value()) {
            rv = &rv_atom;
        } else {
            rv = slot(c.right->slot).at_path(c.right->path);
        }

        if (lv == nullptr && rv == nullptr) continue;
        if (lv == nullptr) {
            const fs::FeatValue copy = *rv;
            slot(c.left.slot).set_path(c.left.path, copy);
            continue;
        }
        if (rv == nullptr) {
            const fs::FeatValue copy = *lv;
            slot(c.right->slot).set_path(c.right->path, copy);
            continue;
        }
        const detail::ValueUnify u = detail::unify_values(*lv, *rv);
        if (!u.ok) {
            result.ok = false;
            result.conflict_path = c.left.path;
            result.conflict_path.insert(result.conflict_path.end(), u.conflict_path.begin(),
                                        u.conflict_path.end());
            result.left = u.left;
            result.right = u.right;
            return result;
        }
        slot(c.left.slot).set_path(c.left.path, u.value);
        if (!c.atom.has_value()) slot(c.right->slot).set_path(c.right->path, u.value);
    }
    result.ok = true;
    result.value = std::move(lhs);
    return result;
}

}  // namespace nlc::grammar

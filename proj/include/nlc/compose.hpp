#pragma once

// Syntax-directed semantic composition: every parse-tree node's meaning is
// its production's attachment with rhs references replaced by the children's
// meanings, beta-reduced; a leaf's meaning is its lexical semantics. The
// root must come out closed.

#include <string>
#include <vector>

#include "nlc/earley.hpp"
#include "nlc/error.hpp"
#include "nlc/grammar.hpp"
#include "nlc/logic.hpp"

namespace nlc::compose {

class MissingAttachment : public Error {
public:
    using Error::Error;
};
class NonClosedResult : public Error {
public:
    using Error::Error;
};
class ArityError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string describe(const grammar::Production& p) {
    std::string out = p.lhs + " ->";
    for (const auto& s : p.rhs) out += " " + s;
    return out;
}

inline logic::Expr node_meaning(const earley::TreeNode& t, const grammar::Grammar& g) {
    if (t.children.empty()) {
        if (!t.sem)
            throw MissingAttachment("lexical entry '" + t.token + " : " + t.label +
                                    "' carries no semantics");
        return t.sem;
    }
    if (t.production < 0 || t.production >= static_cast<int>(g.productions.size()))
        throw Error("tree node '" + t.label + "' does not reference a production");
    const grammar::Production& prod = g.productions[static_cast<std::size_t>(t.production)];
    if (!prod.attachment)
        throw MissingAttachment("production '" + describe(prod) + "' has no attachment");
    if (logic::child_ref_max(prod.attachment) > static_cast<int>(t.children.size()))
        throw ArityError("attachment of '" + describe(prod) + "' references child " +
                         std::to_string(logic::child_ref_max(prod.attachment)) + " but only " +
                         std::to_string(t.children.size()) + " are present");
    std::vector<logic::Expr> kids;
    kids.reserve(t.children.size());
    for (const auto& c : t.children) kids.push_back(node_meaning(c, g));
    return logic::beta_normalize(logic::substitute_children(prod.attachment, kids));
}

inline bool fully_reduced_formula(const logic::Expr& e) {
    if (e->kind == logic::Kind::Lam || e->kind == logic::Kind::App ||
        e->kind == logic::Kind::ChildRef)
        return false;
    for (const auto& a : e->args)
        if (!fully_reduced_formula(a)) return false;
    return true;
}

}  // namespace detail

inline logic::Expr compose(const earley::TreeNode& tree, const grammar::Grammar& g) {
    logic::Expr e = detail::node_meaning(tree, g);
    const auto fv = logic::free_vars(e);
    if (!fv.empty()) {
        std::string names;
        for (const auto& v : fv) names += (names.empty() ? "" : ", ") + v;
        throw NonClosedResult("composed meaning has free variables: " + names);
    }
    if (!detail::fully_reduced_formula(e))
        throw NonClosedResult("composed meaning is not a closed formula: " +
                              logic::to_string(e));
    return e;
}

}  // namespace nlc::compose

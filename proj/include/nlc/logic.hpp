#pragma once

// First-order logic with lambda abstraction on one shared immutable node
// type: parsing and printing, normal-order beta reduction, a canonical form
// for comparing meanings, model-theoretic evaluation, and forward-chaining
// inference over the Horn fragment.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlc/error.hpp"

namespace nlc::logic {

class ParseError : public Error {
public:
    using Error::Error;
};
class NonTerminating : public Error {
public:
    using Error::Error;
};
class FreeVariable : public Error {
public:
    using Error::Error;
};
class UnboundVariable : public Error {
public:
    using Error::Error;
};
class UninterpretedSymbol : public Error {
public:
    using Error::Error;
};
class UnsupportedFormula : public Error {
public:
    using Error::Error;
};

enum class Kind { Const, Var, NamedApp, Not, And, Or, Implies, ForAll, Exists, Lam, App, ChildRef };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Const;
    std::string name;        // symbol, predicate, or binder name
    std::vector<Expr> args;  // operands; [fn, arg] for App, [body] for binders
    int index = 0;           // slot number for ChildRef
};

inline Expr make_node(Kind kind, std::string name, std::vector<Expr> args, int index = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->name = std::move(name);
    n->args = std::move(args);
    n->index = index;
    return n;
}

inline Expr make_const(std::string name) { return make_node(Kind::Const, std::move(name), {}); }
inline Expr make_var(std::string name) { return make_node(Kind::Var, std::move(name), {}); }
inline Expr make_pred(std::string name, std::vector<Expr> args) {
    return make_node(Kind::NamedApp, std::move(name), std::move(args));
}
inline Expr make_not(Expr e) { return make_node(Kind::Not, "", {std::move(e)}); }
inline Expr make_and(Expr a, Expr b) {
    return make_node(Kind::And, "", {std::move(a), std::move(b)});
}
inline Expr make_or(Expr a, Expr b) {
    return make_node(Kind::Or, "", {std::move(a), std::move(b)});
}
inline Expr make_implies(Expr a, Expr b) {
    return make_node(Kind::Implies, "", {std::move(a), std::move(b)});
}
inline Expr make_forall(std::string v, Expr body) {
    return make_node(Kind::ForAll, std::move(v), {std::move(body)});
}
inline Expr make_exists(std::string v, Expr body) {
    return make_node(Kind::Exists, std::move(v), {std::move(body)});
}
inline Expr make_lam(std::string v, Expr body) {
    return make_node(Kind::Lam, std::move(v), {std::move(body)});
}
inline Expr make_app(Expr f, Expr x) {
    return make_node(Kind::App, "", {std::move(f), std::move(x)});
}
inline Expr make_child_ref(int index) { return make_node(Kind::ChildRef, "", {}, index); }

inline std::string to_string(const Expr& e) {
    switch (e->kind) {
        case Kind::Const:
        case Kind::Var:
            return e->name;
        case Kind::ChildRef:
            return "rhs" + std::to_string(e->index);
        case Kind::NamedApp: {
            std::string out = e->name + "(";
            for (std::size_t i = 0; i < e->args.size(); ++i) {
                if (i) out += ", ";
                out += to_string(e->args[i]);
            }
            return out + ")";
        }
        case Kind::Not:
            return "~" + to_string(e->args[0]);
        case Kind::And:
            return "(" + to_string(e->args[0]) + " & " + to_string(e->args[1]) + ")";
        case Kind::Or:
            return "(" + to_string(e->args[0]) + " | " + to_string(e->args[1]) + ")";
        case Kind::Implies:
            return "(" + to_string(e->args[0]) + " -> " + to_string(e->args[1]) + ")";
        case Kind::ForAll:
            return "forall " + e->name + ". " + to_string(e->args[0]);
        case Kind::Exists:
            return "exists " + e->name + ". " + to_string(e->args[0]);
        case Kind::Lam:
            return "\\" + e->name + ". " + to_string(e->args[0]);
        case Kind::App:
            return "(" + to_string(e->args[0]) + " " + to_string(e->args[1]) + ")";
    }
    return "";
}

inline bool equal(const Expr& a, const Expr& b) {
    if (a->kind != b->kind || a->name != b->name || a->index != b->index ||
        a->args.size() != b->args.size())
        return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal(a->args[i], b->args[i])) return false;
    return true;
}

// ---------------------------------------------------------------- parsing

namespace detail {

struct Token {
    enum Type { Ident, LParen, RParen, Comma, Dot, Lambda, Neg, Amp, Bar, Arrow, End } type;
    std::string text;
    // for LParen: written directly against the preceding identifier, which
    // makes it predicate application rather than juxtaposition
    bool glued = false;
};

inline std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            ++i;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Ident, s.substr(i, j - i)});
            i = j;
        } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '>') {
            out.push_back({Token::Arrow, "->"});
            i += 2;
        } else {
            Token::Type t;
            bool glued = false;
            switch (c) {
                case '(':
                    t = Token::LParen;
                    glued = i > 0 && (std::isalnum(static_cast<unsigned char>(s[i - 1])) ||
                                      s[i - 1] == '_');
                    break;
                case ')': t = Token::RParen; break;
                case ',': t = Token::Comma; break;
                case '.': t = Token::Dot; break;
                case '\\': t = Token::Lambda; break;
                case '~': t = Token::Neg; break;
                case '&': t = Token::Amp; break;
                case '|': t = Token::Bar; break;
                default:
                    throw ParseError("unexpected character '" + std::string(1, c) +
                                     "' in formula");
            }
            out.push_back({t, std::string(1, c), glued});
            ++i;
        }
    }
    out.push_back({Token::End, ""});
    return out;
}

class Parser {
public:
    explicit Parser(const std::string& text) : tokens_(tokenize(text)) {}

    Expr run() {
        Expr e = expr();
        if (peek().type != Token::End)
            throw ParseError("trailing input after formula: '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token take() { return tokens_[pos_++]; }
    void expect(Token::Type t, const std::string& what) {
        if (peek().type != t) throw ParseError("expected " + what + " before '" + peek().text + "'");
        ++pos_;
    }

    // implication: right-associative, loosest
    Expr expr() {
        Expr lhs = disjunction();
        if (peek().type == Token::Arrow) {
            ++pos_;
            return make_implies(std::move(lhs), expr());
        }
        return lhs;
    }

    Expr disjunction() {
        Expr e = conjunction();
        while (peek().type == Token::Bar) {
            ++pos_;
            e = make_or(std::move(e), conjunction());
        }
        return e;
    }

    Expr conjunction() {
        Expr e = unary();
        while (peek().type == Token::Amp) {
            ++pos_;
            e = make_and(std::move(e), unary());
        }
        return e;
    }

    Expr unary() {
        if (peek().type == Token::Neg) {
            ++pos_;
            return make_not(unary());
        }
        if (peek().type == Token::Lambda) {
            ++pos_;
            return binder(Kind::Lam);
        }
        if (peek().type == Token::Ident && (peek().text == "forall" || peek().text == "exists")) {
            const Kind k = take().text == "forall" ? Kind::ForAll : Kind::Exists;
            return binder(k);
        }
        return primary();
    }

    // A binder's body extends as far right as possible.
    Expr binder(Kind k) {
        if (peek().type != Token::Ident || peek().text == "forall" || peek().text == "exists")
            throw ParseError("expected a variable name after the binder");
        const std::string name = take().text;
        expect(Token::Dot, "'.'");
        scope_.push_back(name);
        Expr body = expr();
        scope_.pop_back();
        return make_node(k, name, {std::move(body)});
    }

    Expr primary() {
        if (peek().type == Token::Ident) {
            const std::string name = take().text;
            if (peek().type == Token::LParen && peek().glued) {
                ++pos_;
                std::vector<Expr> args;
                if (peek().type != Token::RParen) {
                    args.push_back(expr());
                    while (peek().type == Token::Comma) {
                        ++pos_;
                        args.push_back(expr());
                    }
                }
                expect(Token::RParen, "')'");
                return make_pred(name, std::move(args));
            }
            if (std::find(scope_.rbegin(), scope_.rend(), name) != scope_.rend())
                return make_var(name);
            return make_const(name);
        }
        if (peek().type == Token::LParen) {
            ++pos_;
            Expr e = expr();
            // Juxtaposition inside parentheses is application, folded left.
            while (peek().type != Token::RParen && peek().type != Token::End)
                e = make_app(std::move(e), expr());
            expect(Token::RParen, "')'");
            return e;
        }
        throw ParseError("expected a formula before '" + peek().text + "'");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> scope_;
};

}  // namespace detail

// Identifiers bound by an enclosing binder parse as variables, everything
// else as constants.
inline Expr parse(const std::string& text) { return detail::Parser(text).run(); }

// ------------------------------------------------------------ s-expressions
//
// Alternate textual form used for golden files and machine output:
// (forall (x) (implies (P x) (Q x))). Same Expr model, same variable rule:
// a symbol is a variable iff some enclosing binder introduced it.

inline std::string to_sexpr(const Expr& e) {
    const auto flatten = [](Kind kind, const Expr& root, auto&& self,
                            std::vector<const Node*>& out) -> void {
        if (root->kind == kind) {
            self(kind, root->args[0], self, out);
            self(kind, root->args[1], self, out);
        } else {
            out.push_back(root.get());
        }
    };
    switch (e->kind) {
        case Kind::Const:
        case Kind::Var:
            return e->name;
        case Kind::ChildRef:
            return "rhs" + std::to_string(e->index);
        case Kind::NamedApp: {
            std::string out = "(" + e->name;
            for (const auto& a : e->args) out += " " + to_sexpr(a);
            return out + ")";
        }
        case Kind::Not:
            return "(not " + to_sexpr(e->args[0]) + ")";
        case Kind::And:
        case Kind::Or: {
            std::vector<const Node*> parts;
            flatten(e->kind, e, flatten, parts);
            std::string out = e->kind == Kind::And ? "(and" : "(or";
            for (const Node* p : parts)
                out += " " + to_sexpr(std::shared_ptr<const Node>(e, p));
            return out + ")";
        }
        case Kind::Implies:
            return "(implies " + to_sexpr(e->args[0]) + " " + to_sexpr(e->args[1]) + ")";
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            const char* head = e->kind == Kind::ForAll ? "forall"
                               : e->kind == Kind::Exists ? "exists"
                                                         : "lambda";
            std::string vars = e->name;
            Expr body = e->args[0];
            while (body->kind == e->kind) {
                vars += " " + body->name;
                body = body->args[0];
            }
            return "(" + std::string(head) + " (" + vars + ") " + to_sexpr(body) + ")";
        }
        case Kind::App: {
            // collapse left-nested application chains
            std::vector<Expr> chain;
            Expr cur = e;
            while (cur->kind == Kind::App) {
                chain.push_back(cur->args[1]);
                cur = cur->args[0];
            }
            chain.push_back(cur);
            std::string out = "(apply";
            for (auto it = chain.rbegin(); it != chain.rend(); ++it)
                out += " " + to_sexpr(*it);
            return out + ")";
        }
    }
    return "";
}

namespace detail {

class SexprParser {
public:
    explicit SexprParser(const std::string& text) {
        std::size_t i = 0;
        while (i < text.size()) {
            const char c = text[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (c == '(' || c == ')') {
                tokens_.push_back(std::string(1, c));
                ++i;
            } else {
                std::size_t j = i;
                while (j < text.size() && text[j] != '(' && text[j] != ')' &&
                       !std::isspace(static_cast<unsigned char>(text[j])))
                    ++j;
                tokens_.push_back(text.substr(i, j - i));
                i = j;
            }
        }
    }

    Expr run() {
        Expr e = expr();
        if (pos_ != tokens_.size()) throw ParseError("trailing input after s-expression");
        return e;
    }

private:
    const std::string& peek() const {
        static const std::string kEnd = "";
        return pos_ < tokens_.size() ? tokens_[pos_] : kEnd;
    }
    std::string next() {
        if (pos_ >= tokens_.size()) throw ParseError("unexpected end of s-expression");
        return tokens_[pos_++];
    }
    void expect(const std::string& t) {
        if (next() != t) throw ParseError("expected '" + t + "' in s-expression");
    }
    bool bound(const std::string& name) const {
        return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
    }

    Expr atom(const std::string& name) {
        if (name.empty() || name == "(" || name == ")")
            throw ParseError("expected a symbol");
        return bound(name) ? make_var(name) : make_const(name);
    }

    Expr expr() {
        const std::string t = next();
        if (t != "(") return atom(t);
        const std::string head = next();
        if (head == "(" || head == ")")
            throw ParseError("expected an operator or predicate symbol after '('");

        if (head == "not") {
            Expr a = expr();
            expect(")");
            return make_not(std::move(a));
        }
        if (head == "and" || head == "or" || head == "implies") {
            std::vector<Expr> parts;
            while (peek() != ")") parts.push_back(expr());
            expect(")");
            if (parts.size() < 2)
                throw ParseError("'" + head + "' needs at least two operands");
            if (head == "implies") {
                if (parts.size() != 2) throw ParseError("'implies' takes exactly two operands");
                return make_implies(parts[0], parts[1]);
            }
            Expr out = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i)
                out = head == "and" ? make_and(out, parts[i]) : make_or(out, parts[i]);
            return out;
        }
        if (head == "forall" || head == "exists" || head == "lambda") {
            expect("(");
            std::vector<std::string> vars;
            while (peek() != ")") {
                const std::string v = next();
                if (v == "(") throw ParseError("binder variables must be symbols");
                vars.push_back(v);
            }
            expect(")");
            if (vars.empty()) throw ParseError("'" + head + "' binds no variables");
            for (const auto& v : vars) scope_.push_back(v);
            Expr body = expr();
            expect(")");
            for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
                scope_.pop_back();
                body = head == "forall"   ? make_forall(*it, std::move(body))
                       : head == "exists" ? make_exists(*it, std::move(body))
                                          : make_lam(*it, std::move(body));
            }
            return body;
        }
        if (head == "apply") {
            std::vector<Expr> parts;
            while (peek() != ")") parts.push_back(expr());
            expect(")");
            if (parts.size() < 2) throw ParseError("'apply' needs a function and an argument");
            Expr out = parts[0];
            for (std::size_t i = 1; i < parts.size(); ++i) out = make_app(out, parts[i]);
            return out;
        }

        std::vector<Expr> args;
        while (peek() != ")") args.push_back(expr());
        expect(")");
        return make_pred(head, std::move(args));
    }

    std::vector<std::string> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> scope_;
};

}  // namespace detail

inline Expr parse_sexpr(const std::string& text) { return detail::SexprParser(text).run(); }

// ----------------------------------------------------- free vars and subst

namespace detail {

inline void free_vars_rec(const Expr& e, std::vector<std::string>& scope,
                          std::set<std::string>& out) {
    switch (e->kind) {
        case Kind::Var:
            if (std::find(scope.begin(), scope.end(), e->name) == scope.end())
                out.insert(e->name);
            return;
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam:
            scope.push_back(e->name);
            free_vars_rec(e->args[0], scope, out);
            scope.pop_back();
            return;
        default:
            for (const auto& a : e->args) free_vars_rec(a, scope, out);
    }
}

}  // namespace detail

inline std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    std::vector<std::string> scope;
    detail::free_vars_rec(e, scope, out);
    return out;
}

// Capture-avoiding substitution of `value` for the free variable `var`.
// Binders whose name occurs free in `value` are renamed name1, name2, ...
inline Expr subst(const Expr& e, const std::string& var, const Expr& value) {
    switch (e->kind) {
        case Kind::Var:
            return e->name == var ? value : e;
        case Kind::Const:
        case Kind::ChildRef:
            return e;
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            if (e->name == var) return e;  // shadowed below this binder
            std::string bound = e->name;
            Expr body = e->args[0];
            const std::set<std::string> fv = free_vars(value);
            if (fv.count(bound)) {
                const std::set<std::string> fb = free_vars(body);
                std::string fresh;
                for (int i = 1;; ++i) {
                    fresh = bound + std::to_string(i);
                    if (!fv.count(fresh) && !fb.count(fresh) && fresh != var) break;
                }
                body = subst(body, bound, make_var(fresh));
                bound = fresh;
            }
            return make_node(e->kind, bound, {subst(body, var, value)});
        }
        default: {
            Node n = *e;
            for (auto& a : n.args) a = subst(a, var, value);
            return std::make_shared<const Node>(std::move(n));
        }
    }
}

// ------------------------------------------------------------- reduction

namespace detail {

inline bool reduce_once(const Expr& e, Expr& out) {
    if (e->kind == Kind::App && e->args[0]->kind == Kind::Lam) {
        out = subst(e->args[0]->args[0], e->args[0]->name, e->args[1]);
        return true;
    }
    for (std::size_t i = 0; i < e->args.size(); ++i) {
        Expr sub;
        if (reduce_once(e->args[i], sub)) {
            Node n = *e;
            n.args[i] = std::move(sub);
            out = std::make_shared<const Node>(std::move(n));
            return true;
        }
    }
    return false;
}

}  // namespace detail

// Normal-order reduction to beta normal form, bounded by a step budget.
inline Expr beta_normalize(Expr e, std::size_t budget = 10000) {
    for (std::size_t step = 0; step < budget; ++step) {
        Expr next;
        if (!detail::reduce_once(e, next)) return e;
        e = std::move(next);
    }
    Expr probe;
    if (!detail::reduce_once(e, probe)) return e;
    throw NonTerminating("no beta normal form within the step budget");
}

// ---------------------------------------------------------- canonical form

namespace detail {

// Structure-only rendering: bound occurrences become d<k> where k is the
// number of binders crossed since the occurrence's own binder, so the text
// is independent of variable names.
inline std::string skeleton(const Expr& e, std::vector<std::string>& env) {
    switch (e->kind) {
        case Kind::Var: {
            for (std::size_t i = env.size(); i-- > 0;)
                if (env[i] == e->name) return "d" + std::to_string(env.size() - 1 - i);
            return e->name;
        }
        case Kind::Const:
            return e->name;
        case Kind::ChildRef:
            return "rhs" + std::to_string(e->index);
        case Kind::NamedApp: {
            std::string out = e->name + "(";
            for (std::size_t i = 0; i < e->args.size(); ++i) {
                if (i) out += ",";
                out += skeleton(e->args[i], env);
            }
            return out + ")";
        }
        case Kind::Not:
            return "~" + skeleton(e->args[0], env);
        case Kind::And:
            return "(" + skeleton(e->args[0], env) + " & " + skeleton(e->args[1], env) + ")";
        case Kind::Or:
            return "(" + skeleton(e->args[0], env) + " | " + skeleton(e->args[1], env) + ")";
        case Kind::Implies:
            return "(" + skeleton(e->args[0], env) + " -> " + skeleton(e->args[1], env) + ")";
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            env.push_back(e->name);
            const std::string body = skeleton(e->args[0], env);
            env.pop_back();
            const char* head = e->kind == Kind::ForAll ? "forall. "
                               : e->kind == Kind::Exists ? "exists. "
                                                         : "\\. ";
            return head + body;
        }
        case Kind::App:
            return "(" + skeleton(e->args[0], env) + " " + skeleton(e->args[1], env) + ")";
    }
    return "";
}

inline Expr canonical_structure(const Expr& e, std::vector<std::string>& env);

inline void flatten_and(const Expr& e, std::vector<std::string>& env, std::vector<Expr>& out) {
    if (e->kind == Kind::And) {
        flatten_and(e->args[0], env, out);
        flatten_and(e->args[1], env, out);
    } else {
        out.push_back(canonical_structure(e, env));
    }
}

inline Expr canonical_structure(const Expr& e, std::vector<std::string>& env) {
    switch (e->kind) {
        case Kind::And: {
            std::vector<Expr> conjuncts;
            flatten_and(e, env, conjuncts);
            std::stable_sort(conjuncts.begin(), conjuncts.end(),
                             [&env](const Expr& a, const Expr& b) {
                                 std::vector<std::string> ea = env, eb = env;
                                 return skeleton(a, ea) < skeleton(b, eb);
                             });
            Expr acc = conjuncts[0];
            for (std::size_t i = 1; i < conjuncts.size(); ++i)
                acc = make_and(std::move(acc), conjuncts[i]);
            return acc;
        }
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            env.push_back(e->name);
            Expr body = canonical_structure(e->args[0], env);
            env.pop_back();
            return make_node(e->kind, e->name, {std::move(body)});
        }
        case Kind::Const:
        case Kind::Var:
        case Kind::ChildRef:
            return e;
        default: {
            Node n = *e;
            for (auto& a : n.args) a = canonical_structure(a, env);
            return std::make_shared<const Node>(std::move(n));
        }
    }
}

struct RenameScan {
    int counter = 0;
    std::vector<int> first_occurrence;  // binder ids in occurrence order
    std::vector<int> preorder;          // binder ids in binder order
};

inline void rename_scan(const Expr& e, std::vector<std::pair<std::string, int>>& env,
                        RenameScan& st) {
    switch (e->kind) {
        case Kind::Var: {
            for (std::size_t i = env.size(); i-- > 0;) {
                if (env[i].first == e->name) {
                    const int id = env[i].second;
                    if (std::find(st.first_occurrence.begin(), st.first_occurrence.end(), id) ==
                        st.first_occurrence.end())
                        st.first_occurrence.push_back(id);
                    return;
                }
            }
            return;
        }
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            const int id = st.counter++;
            st.preorder.push_back(id);
            env.push_back({e->name, id});
            rename_scan(e->args[0], env, st);
            env.pop_back();
            return;
        }
        default:
            for (const auto& a : e->args) rename_scan(a, env, st);
    }
}

inline Expr rename_apply(const Expr& e, std::vector<std::pair<std::string, int>>& env,
                         int& counter, const std::map<int, std::string>& names) {
    switch (e->kind) {
        case Kind::Var: {
            for (std::size_t i = env.size(); i-- > 0;)
                if (env[i].first == e->name) return make_var(names.at(env[i].second));
            return e;
        }
        case Kind::ForAll:
        case Kind::Exists:
        case Kind::Lam: {
            const int id = counter++;
            env.push_back({e->name, id});
            Expr body = rename_apply(e->args[0], env, counter, names);
            env.pop_back();
            return make_node(e->kind, names.at(id), {std::move(body)});
        }
        case Kind::Const:
        case Kind::ChildRef:
            return e;
        default: {
            Node n = *e;
            for (auto& a : n.args) a = rename_apply(a, env, counter, names);
            return std::make_shared<const Node>(std::move(n));
        }
    }
}

}  // namespace detail

// Reduce, require a closed formula, flatten and sort conjuncts by their
// name-free skeletons, then rename binders x1, x2, ... in order of first
// occurrence in the body (binders that never occur follow, in binder order).
inline Expr canonicalize(const Expr& input) {
    Expr e = beta_normalize(input);
    const std::set<std::string> fv = free_vars(e);
    if (!fv.empty()) throw FreeVariable("free variable '" + *fv.begin() + "'");

    std::vector<std::string> env;
    Expr structured = detail::canonical_structure(e, env);

    detail::RenameScan st;
    std::vector<std::pair<std::string, int>> scan_env;
    detail::rename_scan(structured, scan_env, st);
    std::map<int, std::string> names;
    int rank = 0;
    for (const int id : st.first_occurrence) names[id] = "x" + std::to_string(++rank);
    for (const int id : st.preorder)
        if (!names.count(id)) names[id] = "x" + std::to_string(++rank);

    int counter = 0;
    std::vector<std::pair<std::string, int>> apply_env;
    return detail::rename_apply(structured, apply_env, counter, names);
}

// ------------------------------------------------------------- evaluation

struct WorldModel {
    std::set<std::string> domain;
    std::map<std::string, std::string> constants;  // symbol -> entity
    std::map<std::string, std::set<std::vector<std::string>>> predicates;
};

namespace detail {

using Env = std::vector<std::pair<std::string, std::string>>;

inline std::string term_entity(const Expr& t, const WorldModel& w, const Env& env) {
    if (t->kind == Kind::Var) {
        for (std::size_t i = env.size(); i-- > 0;)
            if (env[i].first == t->name) return env[i].second;
        throw UnboundVariable("variable '" + t->name + "' has no binding");
    }
    if (t->kind == Kind::Const) {
        const auto it = w.constants.find(t->name);
        if (it != w.constants.end()) return it->second;
        if (w.domain.count(t->name)) return t->name;
        throw UninterpretedSymbol("constant '" + t->name + "' is not in the model");
    }
    throw UnsupportedFormula("predicate arguments must be constants or variables");
}

inline bool eval_rec(const Expr& e, const WorldModel& w, Env& env) {
    switch (e->kind) {
        case Kind::NamedApp: {
            const auto it = w.predicates.find(e->name);
            if (it == w.predicates.end())
                throw UninterpretedSymbol("predicate '" + e->name + "' is not in the model");
            std::vector<std::string> tuple;
            tuple.reserve(e->args.size());
            for (const auto& a : e->args) tuple.push_back(term_entity(a, w, env));
            return it->second.count(tuple) == 1;
        }
        case Kind::Not:
            return !eval_rec(e->args[0], w, env);
        case Kind::And:
            return eval_rec(e->args[0], w, env) && eval_rec(e->args[1], w, env);
        case Kind::Or:
            return eval_rec(e->args[0], w, env) || eval_rec(e->args[1], w, env);
        case Kind::Implies:
            return !eval_rec(e->args[0], w, env) || eval_rec(e->args[1], w, env);
        case Kind::ForAll:
        case Kind::Exists: {
            const bool want_all = e->kind == Kind::ForAll;
            for (const auto& d : w.domain) {
                env.push_back({e->name, d});
                const bool v = eval_rec(e->args[0], w, env);
                env.pop_back();
                if (want_all && !v) return false;
                if (!want_all && v) return true;
            }
            return want_all;
        }
        default:
            throw UnsupportedFormula("not a first-order formula: " + to_string(e));
    }
}

}  // namespace detail

inline bool evaluate(const Expr& e, const WorldModel& w) {
    detail::Env env;
    return detail::eval_rec(e, w, env);
}

// ------------------------------------------------- composition references

// Rewrites free constants named rhs1, rhs2, ... into child-slot references.
// Bound variables of those names are untouched (the parser already resolved
// them), so only genuinely free occurrences are rewritten.
inline Expr resolve_child_refs(const Expr& e) {
    if (e->kind == Kind::Const && e->name.size() > 3 && e->name.compare(0, 3, "rhs") == 0) {
        bool digits = e->name[3] != '0';
        for (std::size_t i = 3; i < e->name.size() && digits; ++i)
            digits = std::isdigit(static_cast<unsigned char>(e->name[i])) != 0;
        if (digits) return make_child_ref(std::stoi(e->name.substr(3)));
    }
    if (e->args.empty()) return e;
    Node n = *e;
    for (auto& a : n.args) a = resolve_child_refs(a);
    return std::make_shared<const Node>(std::move(n));
}

inline int child_ref_max(const Expr& e) {
    int best = e->kind == Kind::ChildRef ? e->index : 0;
    for (const auto& a : e->args) best = std::max(best, child_ref_max(a));
    return best;
}

// Replaces ChildRef k with children[k-1]. The substituted values are whole
// expressions; callers pass closed terms, so no capture analysis is needed.
inline Expr substitute_children(const Expr& e, const std::vector<Expr>& children) {
    if (e->kind == Kind::ChildRef) {
        if (e->index < 1 || static_cast<std::size_t>(e->index) > children.size())
            throw UnsupportedFormula("child reference rhs" + std::to_string(e->index) +
                                     " has no matching child");
        return children[static_cast<std::size_t>(e->index) - 1];
    }
    if (e->args.empty()) return e;
    Node n = *e;
    for (auto& a : n.args) a = substitute_children(a, children);
    return std::make_shared<const Node>(std::move(n));
}

// -------------------------------------------------------------- inference

namespace detail {

struct HornTerm {
    bool is_var = false;
    std::string name;
};

struct HornAtom {
    std::string pred;
    std::vector<HornTerm> terms;
};

struct HornRule {
    std::vector<std::string> vars;
    std::vector<HornAtom> premises;
    HornAtom conclusion;
};

inline HornAtom to_horn_atom(const Expr& e, const std::set<std::string>& qvars) {
    if (e->kind != Kind::NamedApp)
        throw UnsupportedFormula("expected an atomic formula, got " + to_string(e));
    HornAtom atom;
    atom.pred = e->name;
    for (const auto& a : e->args) {
        if (a->kind == Kind::Var) {
            if (!qvars.count(a->name))
                throw UnsupportedFormula("unquantified variable '" + a->name + "'");
            atom.terms.push_back({true, a->name});
        } else if (a->kind == Kind::Const) {
            atom.terms.push_back({false, a->name});
        } else {
            throw UnsupportedFormula("atom arguments must be constants or variables");
        }
    }
    return atom;
}

inline void flatten_atoms(const Expr& e, const std::set<std::string>& qvars,
                          std::vector<HornAtom>& out) {
    if (e->kind == Kind::And) {
        flatten_atoms(e->args[0], qvars, out);
        flatten_atoms(e->args[1], qvars, out);
    } else {
        out.push_back(to_horn_atom(e, qvars));
    }
}

inline std::string ground_key(const HornAtom& atom,
                              const std::map<std::string, std::string>& binding) {
    std::string out = atom.pred + "(";
    for (std::size_t i = 0; i < atom.terms.size(); ++i) {
        if (i) out += ",";
        out += atom.terms[i].is_var ? binding.at(atom.terms[i].name) : atom.terms[i].name;
    }
    return out + ")";
}

}  // namespace detail

// Entailment over ground atoms and universally quantified Horn implications
// (premises a conjunction of atoms, conclusion one atom). The query is a
// ground atom or a conjunction of ground atoms. Anything else is rejected.
inline bool infer(const std::vector<Expr>& kb, const Expr& query) {
    using detail::HornAtom;
    using detail::HornRule;

    std::set<std::string> universe;
    std::set<std::string> facts;
    std::vector<HornRule> rules;
    const std::map<std::string, std::string> no_binding;

    auto collect_consts = [&universe](const HornAtom& atom) {
        for (const auto& t : atom.terms)
            if (!t.is_var) universe.insert(t.name);
    };

    for (const auto& item : kb) {
        Expr body = item;
        HornRule rule;
        std::set<std::string> qvars;
        while (body->kind == Kind::ForAll) {
            rule.vars.push_back(body->name);
            qvars.insert(body->name);
            body = body->args[0];
        }
        if (body->kind == Kind::Implies) {
            detail::flatten_atoms(body->args[0], qvars, rule.premises);
            rule.conclusion = detail::to_horn_atom(body->args[1], qvars);
        } else {
            rule.conclusion = detail::to_horn_atom(body, qvars);
        }
        for (const auto& p : rule.premises) collect_consts(p);
        collect_consts(rule.conclusion);
        if (rule.vars.empty() && rule.premises.empty()) {
            facts.insert(detail::ground_key(rule.conclusion, no_binding));
        } else {
            rules.push_back(std::move(rule));
        }
    }

    std::vector<HornAtom> query_atoms;
    detail::flatten_atoms(query, {}, query_atoms);
    for (const auto& atom : query_atoms) collect_consts(atom);

    const std::vector<std::string> consts(universe.begin(), universe.end());
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& rule : rules) {
            const std::size_t k = rule.vars.size();
            if (k > 0 && consts.empty()) continue;
            std::vector<std::size_t> odo(k, 0);
            while (true) {
                std::map<std::string, std::string> binding;
                for (std::size_t i = 0; i < k; ++i) binding[rule.vars[i]] = consts[odo[i]];
                bool all = true;
                for (const auto& p : rule.premises)
                    if (!facts.count(detail::ground_key(p, binding))) {
                        all = false;
                        break;
                    }
                if (all && facts.insert(detail::ground_key(rule.conclusion, binding)).second)
                    changed = true;
                std::size_t i = 0;
                for (; i < k; ++i) {
                    if (++odo[i] < consts.size()) break;
                    odo[i] = 0;
                }
                if (i == k) break;
            }
        }
    }

    for (const auto& atom : query_atoms)
        if (!facts.count(detail::ground_key(atom, no_binding))) return false;
    return true;
}

}  // namespace nlc::logic

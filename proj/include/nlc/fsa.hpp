#pragma once

// Deterministic finite-state acceptors over abstract string symbols, with
// optional sub-probability transition weights. compile() validates the
// machine up front; run() is a total function that reports how far a
// rejected input got instead of failing.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/text.hpp"

namespace nlc::fsa {

class DeterminismViolation : public Error {
public:
    using Error::Error;
};

class DanglingState : public Error {
public:
    using Error::Error;
};

class BadWeight : public Error {
public:
    using Error::Error;
};

class NotWeighted : public Error {
public:
    using Error::Error;
};

class NotAccepted : public Error {
public:
    using Error::Error;
};

struct Transition {
    std::string from;
    std::string symbol;
    std::string to;
    std::optional<double> weight;  // in (0, 1] when present
};

// states may be left empty, in which case the state set is inferred from the
// start state, final states, and transition endpoints. When states is given
// explicitly, every reference must stay inside it.
struct AutomatonSpec {
    std::set<std::string> states;
    std::string start;
    std::set<std::string> finals;
    std::vector<Transition> transitions;
};

struct RunResult {
    bool accepted = false;
    std::vector<std::string> trace;  // visited states; trace.size() == consumed + 1
    std::size_t consumed = 0;        // symbols consumed before stopping
    std::optional<double> weight;    // product of traversed weights (weighted machines only)
};

class Automaton {
public:
    std::string start;
    std::set<std::string> states;
    std::set<std::string> finals;
    // from -> symbol -> (to, weight); weight is 1.0 on unweighted machines.
    std::map<std::string, std::map<std::string, std::pair<std::string, double>>> delta;
    bool weighted = false;

    RunResult run(const std::vector<std::string>& input) const {
        RunResult r;
        r.trace.push_back(start);
        if (weighted) r.weight = 1.0;
        std::string cur = start;
        for (const auto& sym : input) {
            const auto row = delta.find(cur);
            if (row == delta.end()) return finish(std::move(r), cur);
            const auto edge = row->second.find(sym);
            if (edge == row->second.end()) return finish(std::move(r), cur);
            cur = edge->second.first;
            if (weighted) *r.weight *= edge->second.second;
            ++r.consumed;
            r.trace.push_back(cur);
        }
        r.accepted = finals.count(cur) > 0;
        return r;
    }

private:
    RunResult finish(RunResult r, const std::string&) const {
        r.accepted = false;
        return r;
    }
};

inline Automaton compile(const AutomatonSpec& spec) {
    if (spec.start.empty()) throw DanglingState("automaton has no start state");

    std::set<std::string> referenced;
    referenced.insert(spec.start);
    for (const auto& f : spec.finals) referenced.insert(f);
    for (const auto& t : spec.transitions) {
        referenced.insert(t.from);
        referenced.insert(t.to);
    }
    if (!spec.states.empty()) {
        for (const auto& s : referenced)
            if (!spec.states.count(s))
                throw DanglingState("state '" + s + "' is referenced but not declared");
    }

    std::size_t weighted_edges = 0;
    for (const auto& t : spec.transitions)
        if (t.weight) ++weighted_edges;
    if (weighted_edges != 0 && weighted_edges != spec.transitions.size())
        throw BadWeight("automaton mixes weighted and unweighted transitions");

    Automaton a;
    a.start = spec.start;
    a.states = spec.states.empty() ? referenced : spec.states;
    a.finals = spec.finals;
    a.weighted = weighted_edges > 0;

    for (const auto& t : spec.transitions) {
        double w = 1.0;
        if (t.weight) {
            w = *t.weight;
            if (!(w > 0.0) || w > 1.0)
                throw BadWeight("transition weight " + std::to_string(w) + " outside (0, 1]");
        }
        auto& row = a.delta[t.from];
        if (!row.emplace(t.symbol, std::make_pair(t.to, w)).second)
            throw DeterminismViolation("state '" + t.from + "' has two transitions on symbol '" +
                                       t.symbol + "'");
    }

    if (a.weighted) {
        for (const auto& [from, row] : a.delta) {
            double sum = 0.0;
            for (const auto& [sym, edge] : row) sum += edge.second;
            if (sum > 1.0 + 1e-9)
                throw BadWeight("outgoing weight mass at state '" + from + "' exceeds 1");
        }
    }
    return a;
}

inline RunResult run(const Automaton& a, const std::vector<std::string>& input) {
    return a.run(input);
}

inline double path_weight(const Automaton& a, const std::vector<std::string>& input) {
    if (!a.weighted) throw NotWeighted("automaton carries no transition weights");
    const RunResult r = a.run(input);
    if (!r.accepted) throw NotAccepted("input is not accepted; consumed " +
                                       std::to_string(r.consumed) + " symbols");
    return *r.weight;
}

// Text format, one declaration per line:
//   start S
//   final F
//   edge FROM SYMBOL TO [WEIGHT]
// Blank lines and lines starting with '#' are skipped. States are declared
// implicitly by appearing in a declaration.
inline AutomatonSpec parse_spec(const std::string& content) {
    AutomatonSpec spec;
    bool saw_start = false;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto tok = text::split_ws(line);
        const std::string where = " (line " + std::to_string(lineno) + ")";
        if (tok[0] == "start" && tok.size() == 2) {
            if (saw_start) throw ResourceError("duplicate start declaration" + where);
            saw_start = true;
            spec.start = tok[1];
        } else if (tok[0] == "final" && tok.size() == 2) {
            spec.finals.insert(tok[1]);
        } else if (tok[0] == "edge" && (tok.size() == 4 || tok.size() == 5)) {
            Transition t;
            t.from = tok[1];
            t.symbol = tok[2];
            t.to = tok[3];
            if (tok.size() == 5) {
                std::size_t used = 0;
                double w = 0.0;
                try {
                    w = std::stod(tok[4], &used);
                } catch (const std::exception&) {
                    throw ResourceError("bad weight '" + tok[4] + "'" + where);
                }
                if (used != tok[4].size())
                    throw ResourceError("bad weight '" + tok[4] + "'" + where);
                t.weight = w;
            }
            spec.transitions.push_back(std::move(t));
        } else {
            throw ResourceError("unrecognized declaration '" + line + "'" + where);
        }
    }
    if (!saw_start) throw ResourceError("automaton spec declares no start state");
    return spec;
}

}  // namespace nlc::fsa

#pragma once

// Morphological parsing and generation: a stem lexicon, an affix inventory,
// and ordered orthographic rewrite rules, gated by a finite-state automaton
// over morpheme classes. Irregular entries override the affix route for the
// bundles they list and block it for those bundles.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "nlc/error.hpp"
#include "nlc/fsa.hpp"
#include "nlc/text.hpp"

namespace nlc::morph {

class UnknownStem : public Error {
public:
    using Error::Error;
};

class UnrealizableFeatures : public Error {
public:
    using Error::Error;
};

// Flat label set at this layer, e.g. {"+PLURAL"}.
using FeatureBundle = std::set<std::string>;

struct LexiconEntry {
    std::string stem;
    std::string category;
    bool irregular = false;
    std::map<FeatureBundle, std::string> irregular_forms;  // bundle -> surface
};

struct Affix {
    std::string form;  // with leading hyphen, e.g. "-s"
    std::string attaches_to;
    std::string yields;
    FeatureBundle features;
    bool derivational = false;
};

// First rule whose (pattern, affix) matches wins; replacement covers both the
// rewritten stem tail and the affix surface.
struct OrthoRule {
    std::string pattern;
    std::string affix;
    std::string replacement;
};

struct Analysis {
    std::string surface;
    std::string stem;
    std::string category;
    FeatureBundle features;

    friend bool operator==(const Analysis& a, const Analysis& b) {
        return std::tie(a.stem, a.category, a.features, a.surface) ==
               std::tie(b.stem, b.category, b.features, b.surface);
    }
    friend bool operator<(const Analysis& a, const Analysis& b) {
        return std::tie(a.stem, a.category, a.features, a.surface) <
               std::tie(b.stem, b.category, b.features, b.surface);
    }
};

inline std::string bundle_to_string(const FeatureBundle& f) {
    std::string out = "{";
    bool first = true;
    for (const auto& label : f) {
        if (!first) out += ",";
        first = false;
        out += label;
    }
    return out + "}";
}

inline FeatureBundle parse_bundle(const std::string& s) {
    FeatureBundle f;
    for (const auto& part : text::split(s, ',')) {
        const std::string label = text::trim(part);
        if (!label.empty()) f.insert(label);
    }
    return f;
}

namespace detail {

inline std::string category_name(const std::string& cat) {
    if (cat == "N" || cat == "PN") return "noun";
    if (cat == "V") return "verb";
    return text::lower(cat);
}

// PN is the plural counterpart of N; everything else is its own family.
inline std::string category_family(const std::string& cat) {
    return cat == "PN" ? "N" : cat;
}

}  // namespace detail

// Morpheme class of the bare stem.
inline std::string stem_class(const LexiconEntry& e) {
    if (e.irregular && e.category == "N") return "irreg-sg-stem";
    return "reg-" + detail::category_name(e.category) + "-stem";
}

// Morpheme class of an irregular realized form.
inline std::string irregular_class(const LexiconEntry& e, const FeatureBundle& bundle) {
    if (e.category == "N" && bundle.count("+PLURAL")) return "irreg-pl-stem";
    return "irreg-" + detail::category_name(e.category) + "-form";
}

// Morpheme class contributed by an affix, from its feature bundle:
// {+PRES-PART} -> "pres-part-affix".
inline std::string affix_class(const Affix& a) {
    std::string out;
    for (const auto& label : a.features) {
        std::string body = label;
        if (!body.empty() && body[0] == '+') body.erase(0, 1);
        if (!out.empty()) out += "-";
        out += text::lower(body);
    }
    return out + "-affix";
}

// TSV: stem<TAB>category<TAB>paradigm[<TAB>bundle=form;bundle=form]
inline std::vector<LexiconEntry> parse_lexicon(const std::string& content) {
    std::vector<LexiconEntry> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto f = text::split(raw, '\t');
        const std::string where = " (lexicon line " + std::to_string(lineno) + ")";
        if (f.size() < 3 || f.size() > 4) throw ResourceError("expected 3 or 4 fields" + where);
        LexiconEntry e;
        e.stem = text::trim(f[0]);
        e.category = text::trim(f[1]);
        const std::string paradigm = text::trim(f[2]);
        if (e.stem.empty() || e.category.empty())
            throw ResourceError("empty stem or category" + where);
        if (paradigm == "irregular") e.irregular = true;
        else if (paradigm != "regular")
            throw ResourceError("paradigm must be regular or irregular" + where);
        if (f.size() == 4 && !text::trim(f[3]).empty()) {
            for (const auto& item : text::split(text::trim(f[3]), ';')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos)
                    throw ResourceError("irregular form needs bundle=surface" + where);
                const FeatureBundle bundle = parse_bundle(item.substr(0, eq));
                const std::string form = text::trim(item.substr(eq + 1));
                if (bundle.empty() || form.empty())
                    throw ResourceError("empty bundle or surface" + where);
                e.irregular_forms[bundle] = form;
            }
        }
        if (e.irregular != !e.irregular_forms.empty())
            throw ResourceError("paradigm and irregular forms disagree" + where);
        if (!seen.insert({e.stem, e.category}).second)
            throw ResourceError("duplicate entry for " + e.stem + "/" + e.category + where);
        out.push_back(std::move(e));
    }
    return out;
}

// TSV: form<TAB>attaches_to<TAB>yields<TAB>features<TAB>kind
inline std::vector<Affix> parse_affixes(const std::string& content) {
    std::vector<Affix> out;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto f = text::split(raw, '\t');
        const std::string where = " (affix line " + std::to_string(lineno) + ")";
        if (f.size() != 5) throw ResourceError("expected 5 fields" + where);
        Affix a;
        a.form = text::trim(f[0]);
        a.attaches_to = text::trim(f[1]);
        a.yields = text::trim(f[2]);
        a.features = parse_bundle(f[3]);
        const std::string kind = text::trim(f[4]);
        if (a.form.empty() || a.attaches_to.empty() || a.yields.empty() || a.features.empty())
            throw ResourceError("empty affix field" + where);
        if (kind == "derivational") a.derivational = true;
        else if (kind != "inflectional")
            throw ResourceError("kind must be inflectional or derivational" + where);
        if (!a.derivational &&
            detail::category_family(a.attaches_to) != detail::category_family(a.yields))
            throw ResourceError("inflection may not change category family" + where);
        out.push_back(std::move(a));
    }
    return out;
}

// TSV: pattern<TAB>affix<TAB>replacement
inline std::vector<OrthoRule> parse_ortho(const std::string& content) {
    std::vector<OrthoRule> out;
    std::size_t lineno = 0;
    for (const auto& raw : text::split_lines(content)) {
        ++lineno;
        const std::string line = text::trim(raw);
        if (line.empty() || line[0] == '#') continue;
        const auto f = text::split(raw, '\t');
        const std::string where = " (ortho line " + std::to_string(lineno) + ")";
        if (f.size() != 3) throw ResourceError("expected 3 fields" + where);
        OrthoRule r{text::trim(f[0]), text::trim(f[1]), text::trim(f[2])};
        if (r.pattern.empty() || r.affix.empty())
            throw ResourceError("empty pattern or affix" + where);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string apply_orthography(const std::string& stem, const Affix& affix,
                                     const std::vector<OrthoRule>& rules) {
    for (const auto& r : rules) {
        if (r.affix != affix.form) continue;
        if (stem.size() >= r.pattern.size() &&
            stem.compare(stem.size() - r.pattern.size(), r.pattern.size(), r.pattern) == 0)
            return stem.substr(0, stem.size() - r.pattern.size()) + r.replacement;
    }
    std::string suffix = affix.form;
    if (!suffix.empty() && suffix[0] == '-') suffix.erase(0, 1);
    return stem + suffix;
}

// Builds the morpheme-class automaton: bare regular stems may take affixes,
// inflection ends the word, derivation moves to the target category's state,
// and irregular realized forms are complete words with no affixes after them.
inline fsa::Automaton build_morphotactics(const std::vector<LexiconEntry>& lex,
                                          const std::vector<Affix>& affixes) {
    fsa::AutomatonSpec spec;
    spec.start = "q0";
    std::set<std::tuple<std::string, std::string, std::string>> seen;
    auto add = [&](const std::string& from, const std::string& sym, const std::string& to) {
        if (seen.insert({from, sym, to}).second)
            spec.transitions.push_back({from, sym, to, {}});
    };

    for (const auto& e : lex) {
        const std::string cls = stem_class(e);
        if (e.irregular && e.category == "N") {
            add("q0", cls, "irr");
            spec.finals.insert("irr");
        } else {
            const std::string st = "st:" + e.category;
            add("q0", cls, st);
            spec.finals.insert(st);
        }
        for (const auto& [bundle, form] : e.irregular_forms) {
            add("q0", irregular_class(e, bundle), "irr");
            spec.finals.insert("irr");
        }
    }
    for (const auto& a : affixes) {
        const std::string from = "st:" + a.attaches_to;
        const std::string to = a.derivational ? "st:" + a.yields : "done";
        add(from, affix_class(a), to);
        spec.finals.insert(to);
    }
    return fsa::compile(spec);
}

namespace detail {

// Walks affix chains from a stem entry (depth-capped; the morphotactic gate
// is the authority on which chains denote words). The callback receives the
// surface, accumulated bundle, final category, and gate verdict per chain.
template <typename Fn>
inline void enumerate_chains(const LexiconEntry& entry, const std::vector<Affix>& affixes,
                             const std::vector<OrthoRule>& rules, const fsa::Automaton& gate,
                             const std::string& surface, const std::string& category,
                             const FeatureBundle& bundle, std::vector<std::string>& classes,
                             int depth, Fn&& fn) {
    if (depth >= 3) return;
    for (const auto& a : affixes) {
        if (a.attaches_to != category) continue;
        FeatureBundle nb = bundle;
        nb.insert(a.features.begin(), a.features.end());
        if (entry.irregular_forms.count(nb)) continue;  // irregular entry blocks this bundle
        const std::string ns = apply_orthography(surface, a, rules);
        classes.push_back(affix_class(a));
        fn(ns, a.yields, nb, gate.run(classes).accepted);
        enumerate_chains(entry, affixes, rules, gate, ns, a.yields, nb, classes, depth + 1, fn);
        classes.pop_back();
    }
}

inline std::string category_after(const std::string& category, const FeatureBundle& bundle,
                                  const std::vector<Affix>& affixes) {
    for (const auto& a : affixes)
        if (a.attaches_to == category && a.features == bundle) return a.yields;
    return category;
}

}  // namespace detail

inline std::vector<Analysis> parse_word(const std::string& surface,
                                        const std::vector<LexiconEntry>& lex,
                                        const std::vector<Affix>& affixes,
                                        const std::vector<OrthoRule>& rules,
                                        const fsa::Automaton& gate) {
    std::set<Analysis> found;
    for (const auto& entry : lex) {
        if (entry.stem == surface && gate.run({stem_class(entry)}).accepted)
            found.insert({surface, entry.stem, entry.category, {}});
        for (const auto& [bundle, form] : entry.irregular_forms) {
            if (form == surface && gate.run({irregular_class(entry, bundle)}).accepted)
                found.insert({surface, entry.stem,
                              detail::category_after(entry.category, bundle, affixes), bundle});
        }
        std::vector<std::string> classes = {stem_class(entry)};
        detail::enumerate_chains(
            entry, affixes, rules, gate, entry.stem, entry.category, {}, classes, 0,
            [&](const std::string& s, const std::string& cat, const FeatureBundle& b, bool ok) {
                if (ok && s == surface) found.insert({surface, entry.stem, cat, b});
            });
    }
    return std::vector<Analysis>(found.begin(), found.end());
}

inline std::vector<Analysis> parse_word(const std::string& surface,
                                        const std::vector<LexiconEntry>& lex,
                                        const std::vector<Affix>& affixes,
                                        const std::vector<OrthoRule>& rules) {
    return parse_word(surface, lex, affixes, rules, build_morphotactics(lex, affixes));
}

inline std::string generate(const std::string& stem, const FeatureBundle& features,
                            const std::vector<LexiconEntry>& lex,
                            const std::vector<Affix>& affixes,
                            const std::vector<OrthoRule>& rules, const fsa::Automaton& gate) {
    bool stem_known = false;
    std::set<std::string> results;
    for (const auto& entry : lex) {
        if (entry.stem != stem) continue;
        stem_known = true;
        if (features.empty() && gate.run({stem_class(entry)}).accepted) results.insert(stem);
        const auto it = entry.irregular_forms.find(features);
        if (it != entry.irregular_forms.end() &&
            gate.run({irregular_class(entry, features)}).accepted)
            results.insert(it->second);
        std::vector<std::string> classes = {stem_class(entry)};
        detail::enumerate_chains(
            entry, affixes, rules, gate, entry.stem, entry.category, {}, classes, 0,
            [&](const std::string& s, const std::string&, const FeatureBundle& b, bool ok) {
                if (ok && b == features) results.insert(s);
            });
    }
    if (!stem_known) throw UnknownStem("stem '" + stem + "' is not in the lexicon");
    if (results.empty())
        throw UnrealizableFeatures("no realization of " + bundle_to_string(features) +
                                   " for stem '" + stem + "'");
    if (results.size() > 1)
        throw UnrealizableFeatures("ambiguous realization of " + bundle_to_string(features) +
                                   " for stem '" + stem + "': " +
                                   text::join({results.begin(), results.end()}, ", "));
    return *results.begin();
}

inline std::string generate(const std::string& stem, const FeatureBundle& features,
                            const std::vector<LexiconEntry>& lex,
                            const std::vector<Affix>& affixes,
                            const std::vector<OrthoRule>& rules) {
    return generate(stem, features, lex, affixes, rules, build_morphotactics(lex, affixes));
}

// Every feature bundle generate() can realize for this entry, including the
// bare form. Mirrors the same chain walk and gate checks generation uses.
inline std::set<FeatureBundle> realizable_features(const LexiconEntry& entry,
                                                   const std::vector<Affix>& affixes,
                                                   const std::vector<OrthoRule>& rules,
                                                   const fsa::Automaton& gate) {
    std::set<FeatureBundle> out;
    if (gate.run({stem_class(entry)}).accepted) out.insert({});
    for (const auto& [bundle, form] : entry.irregular_forms)
        if (gate.run({irregular_class(entry, bundle)}).accepted) out.insert(bundle);
    std::vector<std::string> classes = {stem_class(entry)};
    detail::enumerate_chains(
        entry, affixes, rules, gate, entry.stem, entry.category, {}, classes, 0,
        [&](const std::string&, const std::string&, const FeatureBundle& b, bool ok) {
            if (ok) out.insert(b);
        });
    return out;
}

}  // namespace nlc::morph

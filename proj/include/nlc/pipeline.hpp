#pragma once

// End-to-end orchestration: tokenize -> morphology -> tag -> parse ->
// compose -> canonicalize -> evaluate, with per-stage diagnostics instead of
// exceptions for in-domain failures. Also owns configuration loading and the
// serialized stage renderings shared by the CLI subcommands, so a subcommand
// and the corresponding pipeline stage print byte-identical output.

#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "nlc/compose.hpp"
#include "nlc/earley.hpp"
#include "nlc/error.hpp"
#include "nlc/grammar.hpp"
#include "nlc/logic.hpp"
#include "nlc/morphology.hpp"
#include "nlc/ngram.hpp"
#include "nlc/noisy_channel.hpp"
#include "nlc/tagger.hpp"
#include "nlc/text.hpp"
#include "nlc/world.hpp"

namespace nlc::pipeline {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct PipelineConfig {
    // resource paths; empty means the resource is absent
    std::string lexicon;
    std::string affixes;
    std::string ortho;
    std::string grammar;
    std::string tagset;
    std::string rules;
    std::string tagged_corpus;
    std::string lm;
    std::string world;
    std::string smoothing = "add_one";
    double lambda = 1.0;
    int k = 3;
    std::string format = "json";
};

inline ngram::Smoothing smoothing_mode(const std::string& name) {
    if (name == "mle") return ngram::Smoothing::MLE;
    if (name == "add_one") return ngram::Smoothing::ADD_ONE;
    if (name == "witten_bell") return ngram::Smoothing::WITTEN_BELL;
    throw ConfigError("unknown smoothing mode '" + name +
                      "' (expected mle, add_one, or witten_bell)");
}

inline void validate_config(const PipelineConfig& cfg) {
    if (cfg.k < 1) throw ConfigError("k must be at least 1");
    if (cfg.lambda <= 0.0) throw ConfigError("lambda must be positive");
    smoothing_mode(cfg.smoothing);
    if (cfg.format != "text" && cfg.format != "json" && cfg.format != "sexpr")
        throw ConfigError("unknown output format '" + cfg.format +
                          "' (expected text, json, or sexpr)");
}

namespace detail {

inline std::string dirname(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

inline std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    return base_dir + "/" + path;
}

}  // namespace detail

// Reads a JSON config; relative resource paths are taken relative to the
// config file's own directory.
inline PipelineConfig load_config(const std::string& path) {
    std::string content;
    try {
        content = text::read_file(path);
    } catch (const Error& ex) {
        throw ConfigError(ex.what());
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(content);
    } catch (const nlohmann::json::exception& ex) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + ex.what());
    }
    if (!doc.is_object()) throw ConfigError("config '" + path + "' must be a JSON object");

    const std::string base = detail::dirname(path);
    PipelineConfig cfg;
    const auto path_field = [&](const char* name, std::string& slot) {
        if (!doc.contains(name)) return;
        if (!doc[name].is_string()) throw ConfigError(std::string(name) + " must be a string");
        slot = detail::resolve(base, doc[name].get<std::string>());
    };
    path_field("lexicon", cfg.lexicon);
    path_field("affixes", cfg.affixes);
    path_field("ortho", cfg.ortho);
    path_field("grammar", cfg.grammar);
    path_field("tagset", cfg.tagset);
    path_field("rules", cfg.rules);
    path_field("tagged_corpus", cfg.tagged_corpus);
    path_field("lm", cfg.lm);
    path_field("world", cfg.world);
    if (doc.contains("smoothing")) cfg.smoothing = doc["smoothing"].get<std::string>();
    if (doc.contains("lambda")) cfg.lambda = doc["lambda"].get<double>();
    if (doc.contains("k")) cfg.k = doc["k"].get<int>();
    if (doc.contains("format")) cfg.format = doc["format"].get<std::string>();
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        static const std::set<std::string> known = {
            "lexicon", "affixes",       "ortho", "grammar", "tagset", "rules",
            "tagged_corpus", "lm", "world", "smoothing", "lambda", "k", "format"};
        if (known.count(key) == 0) throw ConfigError("unknown config field '" + key + "'");
    }
    validate_config(cfg);
    return cfg;
}

// Everything load_resources produced; immutable once built.
struct Resources {
    std::vector<morph::LexiconEntry> lexicon;
    std::vector<morph::Affix> affixes;
    std::vector<morph::OrthoRule> ortho;
    std::optional<fsa::Automaton> gate;
    std::optional<grammar::Grammar> grammar;
    std::optional<tagger::Tagset> tagset;
    std::optional<tagger::HmmTagger> hmm;
    std::vector<tagger::ContextRule> rules;
    std::optional<ngram::Model> lm;
    std::optional<logic::WorldModel> world;

    bool has_morphology() const { return gate.has_value(); }
};

// Loads every configured resource eagerly; any unreadable or invalid file is
// a hard error (the operator gave a bad path, not a bad sentence).
inline Resources load_resources(const PipelineConfig& cfg) {
    validate_config(cfg);
    Resources r;
    try {
        if (!cfg.lexicon.empty()) r.lexicon = morph::parse_lexicon(text::read_file(cfg.lexicon));
        if (!cfg.affixes.empty()) r.affixes = morph::parse_affixes(text::read_file(cfg.affixes));
        if (!cfg.ortho.empty()) r.ortho = morph::parse_ortho(text::read_file(cfg.ortho));
        if (!cfg.lexicon.empty() && !cfg.affixes.empty())
            r.gate = morph::build_morphotactics(r.lexicon, r.affixes);
        if (!cfg.grammar.empty())
            r.grammar = grammar::load_grammar(text::read_file(cfg.grammar));
        if (!cfg.tagset.empty()) r.tagset = tagger::parse_tagset(text::read_file(cfg.tagset));
        if (!cfg.tagged_corpus.empty()) {
            if (!r.tagset) throw ConfigError("tagged_corpus requires a tagset");
            r.hmm = tagger::HmmTagger::train(
                tagger::parse_tagged(text::read_file(cfg.tagged_corpus)), *r.tagset);
        }
        if (!cfg.rules.empty()) r.rules = tagger::parse_rules(text::read_file(cfg.rules));
        if (!cfg.lm.empty()) r.lm = ngram::Model::deserialize(text::read_file(cfg.lm));
        if (!cfg.world.empty()) r.world = world::load_world(cfg.world);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& ex) {
        throw ConfigError(ex.what());
    }
    return r;
}

struct StageFailure {
    std::string stage;
    std::string detail;
};

struct Interpretation {
    earley::TreeNode tree;
    logic::Expr formula;          // composed meaning
    logic::Expr canonical;        // canonicalize(formula)
    std::string canonical_text;   // to_string(canonical)
    std::optional<bool> truth;    // present iff a world model was supplied
};

struct PipelineResult {
    std::vector<std::string> tokens;
    std::vector<std::vector<morph::Analysis>> analyses;  // parallel to tokens
    std::vector<std::string> tags;                       // empty without a tagger
    std::vector<earley::TreeNode> trees;                 // all parses, pre-composition
    std::vector<Interpretation> interpretations;
    std::vector<StageFailure> diagnostics;

    bool failed() const { return !diagnostics.empty(); }
};

// Whitespace split, then leading/trailing ASCII punctuation becomes separate
// single-character tokens; interior punctuation stays attached.
inline std::vector<std::string> tokenize(const std::string& input) {
    std::vector<std::string> out;
    for (const auto& raw : text::split_ws(input)) {
        std::size_t b = 0;
        std::size_t e = raw.size();
        while (b < e && std::ispunct(static_cast<unsigned char>(raw[b]))) ++b;
        while (e > b && std::ispunct(static_cast<unsigned char>(raw[e - 1]))) --e;
        for (std::size_t i = 0; i < b; ++i) out.push_back(raw.substr(i, 1));
        if (b < e) out.push_back(raw.substr(b, e - b));
        for (std::size_t i = e; i < raw.size(); ++i) out.push_back(raw.substr(i, 1));
    }
    return out;
}

namespace detail {

inline std::string suggestions_for(const std::string& token, const Resources& r, double lambda) {
    if (!r.lm || !r.grammar) return "";
    const auto& known = r.grammar->words();
    const std::vector<std::string> wordlist(known.begin(), known.end());
    const auto ranked = noisy::correct(token, *r.lm, wordlist, lambda, 3);
    std::string out;
    for (const auto& c : ranked) out += (out.empty() ? "" : ", ") + c.word;
    return out.empty() ? out : "; suggestions: " + out;
}

}  // namespace detail

inline PipelineResult run_pipeline(const std::string& input, const Resources& res,
                                   const PipelineConfig& cfg) {
    validate_config(cfg);
    PipelineResult result;

    result.tokens = tokenize(input);
    if (result.tokens.empty()) {
        result.diagnostics.push_back({"tokenize", "no tokens"});
        return result;
    }

    for (const auto& tok : result.tokens) {
        if (res.has_morphology())
            result.analyses.push_back(
                morph::parse_word(tok, res.lexicon, res.affixes, res.ortho, *res.gate));
        else
            result.analyses.push_back({});
    }

    if (res.hmm) result.tags = res.hmm->tag(result.tokens);

    if (!res.grammar) {
        result.diagnostics.push_back({"parse", "no grammar loaded"});
        return result;
    }
    const grammar::Grammar& g = *res.grammar;

    bool unknown = false;
    for (std::size_t i = 0; i < result.tokens.size(); ++i) {
        if (g.categories_of(result.tokens[i]).empty()) {
            unknown = true;
            result.diagnostics.push_back(
                {"parse", "unknown token '" + result.tokens[i] + "' at position " +
                              std::to_string(i + 1) +
                              detail::suggestions_for(result.tokens[i], res, cfg.lambda)});
        }
    }
    if (unknown) return result;

    const earley::Chart chart = earley::earley_parse(g, result.tokens);
    if (!chart.accepted) {
        result.diagnostics.push_back({"parse", "no parse"});
        return result;
    }
    const auto trees = earley::extract_trees(chart, g, static_cast<std::size_t>(cfg.k));
    if (trees.empty()) {
        result.diagnostics.push_back(
            {"parse", "no parse: every derivation violates a feature constraint"});
        return result;
    }
    result.trees = trees;

    for (const auto& tree : trees) {
        Interpretation interp;
        interp.tree = tree;
        try {
            interp.formula = compose::compose(tree, g);
        } catch (const Error& ex) {
            result.diagnostics.push_back({"compose", ex.what()});
            continue;
        }
        try {
            interp.canonical = logic::canonicalize(interp.formula);
            interp.canonical_text = logic::to_string(interp.canonical);
        } catch (const Error& ex) {
            result.diagnostics.push_back({"canonicalize", ex.what()});
            continue;
        }
        if (res.world) {
            try {
                interp.truth = logic::evaluate(interp.canonical, *res.world);
            } catch (const Error& ex) {
                result.diagnostics.push_back({"evaluate", ex.what()});
            }
        }
        result.interpretations.push_back(std::move(interp));
    }
    return result;
}

// ------------------------------------------------------------- renderings
//
// One serialization function per stage value, shared between run_pipeline
// output and the stage's own subcommand. Formats: text, json, sexpr.

namespace render {

using ordered_json = nlohmann::ordered_json;

inline ordered_json features_json(const fs::FeatureStructure& f) {
    ordered_json obj = ordered_json::object();
    for (const auto& [label, value] : f.entries()) {
        if (value.is_atom())
            obj[label] = value.atom;
        else
            obj[label] = features_json(*value.nested);
    }
    return obj;
}

inline ordered_json tree_json(const earley::TreeNode& t) {
    ordered_json obj = ordered_json::object();
    obj["label"] = t.label;
    if (!t.token.empty()) obj["token"] = t.token;
    obj["children"] = ordered_json::array();
    for (const auto& c : t.children) obj["children"].push_back(tree_json(c));
    obj["features"] = features_json(t.features);
    return obj;
}

inline std::string tokens_text(const std::vector<std::string>& tokens) {
    std::string out;
    for (const auto& t : tokens) out += t + "\n";
    return out;
}

inline std::string tokens_render(const std::vector<std::string>& tokens,
                                 const std::string& format) {
    if (format == "json") return ordered_json(tokens).dump(2) + "\n";
    if (format == "sexpr") {
        std::string out = "(tokens";
        for (const auto& t : tokens) out += " " + t;
        return out + ")\n";
    }
    return tokens_text(tokens);
}

inline std::string analyses_text(const std::string& word,
                                 const std::vector<morph::Analysis>& as) {
    if (as.empty()) return word + ": no analysis\n";
    std::string out;
    for (const auto& a : as) {
        out += word + ": " + a.stem + " " + a.category;
        const std::string feats = morph::bundle_to_string(a.features);
        if (!feats.empty()) out += " " + feats;
        out += "\n";
    }
    return out;
}

inline std::string analyses_render(const std::vector<std::string>& tokens,
                                   const std::vector<std::vector<morph::Analysis>>& analyses,
                                   const std::string& format) {
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ordered_json row = ordered_json::object();
            row["word"] = tokens[i];
            row["analyses"] = ordered_json::array();
            for (const auto& a : analyses[i]) {
                ordered_json one = ordered_json::object();
                one["stem"] = a.stem;
                one["category"] = a.category;
                one["features"] = std::vector<std::string>(a.features.begin(), a.features.end());
                row["analyses"].push_back(std::move(one));
            }
            arr.push_back(std::move(row));
        }
        return arr.dump(2) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (format == "sexpr") {
            out += "(analyses " + tokens[i];
            for (const auto& a : analyses[i]) {
                out += " (" + a.stem + " " + a.category;
                for (const auto& f : a.features) out += " " + f;
                out += ")";
            }
            out += ")\n";
        } else {
            out += analyses_text(tokens[i], analyses[i]);
        }
    }
    return out;
}

inline std::string tags_render(const std::vector<std::string>& tokens,
                               const std::vector<std::string>& tags,
                               const std::string& format) {
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            ordered_json one = ordered_json::object();
            one["word"] = tokens[i];
            one["tag"] = i < tags.size() ? tags[i] : "";
            arr.push_back(std::move(one));
        }
        return arr.dump(2) + "\n";
    }
    if (format == "sexpr") {
        std::string out = "(tags";
        for (std::size_t i = 0; i < tokens.size(); ++i)
            out += " (" + tokens[i] + " " + (i < tags.size() ? tags[i] : "") + ")";
        return out + ")\n";
    }
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += " ";
        out += tokens[i] + "/" + (i < tags.size() ? tags[i] : "");
    }
    return out + "\n";
}

inline std::string trees_render(const std::vector<earley::TreeNode>& trees,
                                const std::string& format) {
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& t : trees) arr.push_back(tree_json(t));
        return arr.dump(2) + "\n";
    }
    std::string out;
    for (const auto& t : trees) out += earley::tree_sexpr(t) + "\n";
    return out;
}

inline std::string interpretations_render(const std::vector<Interpretation>& interps,
                                          const std::string& format) {
    if (format == "json") {
        ordered_json arr = ordered_json::array();
        for (const auto& in : interps) {
            ordered_json one = ordered_json::object();
            one["tree"] = tree_json(in.tree);
            one["canonical"] = in.canonical_text;
            one["sexpr"] = logic::to_sexpr(in.canonical);
            if (in.truth.has_value()) one["truth"] = *in.truth;
            arr.push_back(std::move(one));
        }
        return arr.dump(2) + "\n";
    }
    std::string out;
    for (std::size_t i = 0; i < interps.size(); ++i) {
        const auto& in = interps[i];
        const std::string formula = format == "sexpr" ? logic::to_sexpr(in.canonical)
                                                      : in.canonical_text;
        out += "interpretation " + std::to_string(i + 1) + ": " + formula + "\n";
        if (in.truth.has_value())
            out += "truth " + std::to_string(i + 1) + ": " + (*in.truth ? "true" : "false") +
                   "\n";
    }
    return out;
}

inline std::string result_render(const PipelineResult& r, const std::string& format) {
    if (format == "json") {
        ordered_json doc = ordered_json::object();
        doc["tokens"] = r.tokens;
        doc["tags"] = r.tags;
        doc["interpretations"] = ordered_json::array();
        for (const auto& in : r.interpretations) {
            ordered_json one = ordered_json::object();
            one["tree"] = tree_json(in.tree);
            one["canonical"] = in.canonical_text;
            one["sexpr"] = logic::to_sexpr(in.canonical);
            if (in.truth.has_value()) one["truth"] = *in.truth;
            doc["interpretations"].push_back(std::move(one));
        }
        doc["diagnostics"] = ordered_json::array();
        for (const auto& d : r.diagnostics) {
            ordered_json one = ordered_json::object();
            one["stage"] = d.stage;
            one["detail"] = d.detail;
            doc["diagnostics"].push_back(std::move(one));
        }
        return doc.dump(2) + "\n";
    }
    std::string out = "tokens: " + text::join(r.tokens, " ") + "\n";
    if (!r.tags.empty()) {
        out += "tags:";
        for (std::size_t i = 0; i < r.tokens.size(); ++i)
            out += " " + r.tokens[i] + "/" + (i < r.tags.size() ? r.tags[i] : "");
        out += "\n";
    }
    out += interpretations_render(r.interpretations, format);
    return out;
}

inline std::string diagnostics_render(const std::vector<StageFailure>& ds) {
    std::string out;
    for (const auto& d : ds) out += d.stage + ": " + d.detail + "\n";
    return out;
}

}  // namespace render

}  // namespace nlc::pipeline

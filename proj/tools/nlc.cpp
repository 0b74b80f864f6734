// Command-line front end: every pipeline stage as a subcommand plus the
// end-to-end `run`. Results go to standard output, diagnostics to standard
// error. Exit 0: success; 1: well-formed input with a negative answer
// (no parse, unknown word, false premise); 2: usage or resource errors.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nlc/logic.hpp"
#include "nlc/pipeline.hpp"
#include "nlc/text.hpp"
#include "nlc/world.hpp"

namespace {

using nlc::pipeline::PipelineConfig;
using nlc::pipeline::PipelineResult;
using nlc::pipeline::Resources;
namespace render = nlc::pipeline::render;

struct Flags {
    std::string config;
    std::string lexicon, affixes, ortho, grammar, tagset, rules, tagged_corpus, lm, world;
    std::string smoothing, format;
    double lambda = -1.0;  // sentinel: not set
    int k = -1;
    int order = 2;
    std::vector<std::string> words;
    std::string corpus;
    std::string word;
    std::string formula;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON config file (default: $NLC_CONFIG)");
    cmd->add_option("--lexicon", f.lexicon, "morphological lexicon (TSV)");
    cmd->add_option("--affixes", f.affixes, "affix table (TSV)");
    cmd->add_option("--ortho", f.ortho, "orthographic rules (TSV)");
    cmd->add_option("--grammar", f.grammar, "grammar file");
    cmd->add_option("--tagset", f.tagset, "tagset file (TSV)");
    cmd->add_option("--rules", f.rules, "tagger context rules");
    cmd->add_option("--tagged_corpus", f.tagged_corpus, "tagged training corpus");
    cmd->add_option("--lm", f.lm, "serialized n-gram model");
    cmd->add_option("--world", f.world, "world model (JSON)");
    cmd->add_option("--smoothing", f.smoothing, "mle | add_one | witten_bell");
    cmd->add_option("--lambda", f.lambda, "channel decay rate for correction");
    cmd->add_option("--k", f.k, "how many results to keep");
    cmd->add_option("--format", f.format, "text | json | sexpr");
}

// Config file first (explicit flag, else $NLC_CONFIG), then flag overrides.
PipelineConfig effective_config(const Flags& f) {
    PipelineConfig cfg;
    std::string config_path = f.config;
    if (config_path.empty()) {
        if (const char* env = std::getenv("NLC_CONFIG")) config_path = env;
    }
    if (!config_path.empty()) cfg = nlc::pipeline::load_config(config_path);
    if (!f.lexicon.empty()) cfg.lexicon = f.lexicon;
    if (!f.affixes.empty()) cfg.affixes = f.affixes;
    if (!f.ortho.empty()) cfg.ortho = f.ortho;
    if (!f.grammar.empty()) cfg.grammar = f.grammar;
    if (!f.tagset.empty()) cfg.tagset = f.tagset;
    if (!f.rules.empty()) cfg.rules = f.rules;
    if (!f.tagged_corpus.empty()) cfg.tagged_corpus = f.tagged_corpus;
    if (!f.lm.empty()) cfg.lm = f.lm;
    if (!f.world.empty()) cfg.world = f.world;
    if (!f.smoothing.empty()) cfg.smoothing = f.smoothing;
    if (f.lambda > 0.0) cfg.lambda = f.lambda;
    if (f.k >= 0) cfg.k = f.k;
    if (!f.format.empty()) cfg.format = f.format;
    nlc::pipeline::validate_config(cfg);
    return cfg;
}

int require(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << what << "\n";
        return 2;
    }
    return 0;
}

std::string joined(const std::vector<std::string>& words) { return nlc::text::join(words, " "); }

int cmd_tokenize(const Flags& f) {
    const auto cfg = effective_config(f);
    const auto tokens = nlc::pipeline::tokenize(joined(f.words));
    if (tokens.empty()) {
        std::cerr << "tokenize: no tokens\n";
        return 1;
    }
    std::cout << render::tokens_render(tokens, cfg.format);
    return 0;
}

int cmd_morph(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.lexicon.empty() && !cfg.affixes.empty(),
                               "morph requires --lexicon and --affixes (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const auto analyses =
        nlc::morph::parse_word(f.word, res.lexicon, res.affixes, res.ortho, *res.gate);
    std::cout << render::analyses_render({f.word}, {analyses}, cfg.format);
    return analyses.empty() ? 1 : 0;
}

int cmd_train_lm(const Flags& f) {
    const auto model = nlc::ngram::train_text(nlc::text::read_file(f.corpus),
                                              static_cast<std::size_t>(f.order));
    std::cout << model.serialize();
    return 0;
}

int cmd_predict(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.lm.empty(), "predict requires --lm (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const auto mode = nlc::pipeline::smoothing_mode(cfg.smoothing);

    struct Row {
        std::string word;
        double p;
    };
    std::vector<Row> rows;
    for (const auto& w : res.lm->vocabulary()) {
        if (w == nlc::ngram::kStart) continue;
        rows.push_back({w, res.lm->probability(w, f.words, mode)});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        if (a.p != b.p) return a.p > b.p;
        return a.word < b.word;
    });
    if (rows.size() > static_cast<std::size_t>(cfg.k)) rows.resize(static_cast<std::size_t>(cfg.k));

    std::ostringstream out;
    out << std::setprecision(10);
    if (cfg.format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : rows) arr.push_back({{"word", r.word}, {"p", r.p}});
        out << arr.dump(2) << "\n";
    } else if (cfg.format == "sexpr") {
        out << "(predict";
        for (const auto& r : rows) out << " (" << r.word << " " << r.p << ")";
        out << ")\n";
    } else {
        for (const auto& r : rows) out << r.word << "\t" << r.p << "\n";
    }
    std::cout << out.str();
    return 0;
}

int cmd_correct(const Flags& f) {
    const auto cfg = effective_config(f);
    // for this subcommand --lexicon names the candidate wordlist
    if (const int rc = require(!cfg.lexicon.empty() && !cfg.lm.empty(),
                               "correct requires --lexicon <wordlist> and --lm"))
        return rc;
    nlc::ngram::Model lm = nlc::ngram::Model::deserialize(nlc::text::read_file(cfg.lm));
    std::vector<std::string> words;
    for (const auto& line : nlc::text::split_lines(nlc::text::read_file(cfg.lexicon)))
        for (const auto& w : nlc::text::split_ws(line)) words.push_back(w);
    const auto ranked = nlc::noisy::correct(f.word, lm, words, cfg.lambda,
                                            static_cast<std::size_t>(cfg.k));

    std::ostringstream out;
    out << std::setprecision(10);
    if (cfg.format == "json") {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& c : ranked)
            arr.push_back({{"word", c.word},
                           {"distance", c.distance},
                           {"likelihood", c.likelihood},
                           {"prior", c.prior},
                           {"score", c.score}});
        out << arr.dump(2) << "\n";
    } else if (cfg.format == "sexpr") {
        out << "(correct";
        for (const auto& c : ranked) out << " (" << c.word << " " << c.score << ")";
        out << ")\n";
    } else {
        for (const auto& c : ranked) out << c.word << "\t" << c.score << "\n";
    }
    std::cout << out.str();
    return ranked.empty() ? 1 : 0;
}

int cmd_train_tagger(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.tagset.empty() && !cfg.tagged_corpus.empty(),
                               "train-tagger requires --tagset and --tagged_corpus"))
        return rc;
    const auto ts = nlc::tagger::parse_tagset(nlc::text::read_file(cfg.tagset));
    const auto sentences = nlc::tagger::parse_tagged(nlc::text::read_file(cfg.tagged_corpus));
    const auto tagger = nlc::tagger::HmmTagger::train(sentences, ts);
    std::size_t tokens = 0;
    for (const auto& s : sentences) tokens += s.size();

    nlohmann::ordered_json doc;
    doc["sentences"] = sentences.size();
    doc["tokens"] = tokens;
    doc["tags"] = ts.labels;
    std::cout << doc.dump(2) << "\n";
    (void)tagger;
    return 0;
}

int cmd_tag(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.tagset.empty() && !cfg.tagged_corpus.empty(),
                               "tag requires --tagset and --tagged_corpus (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const auto tokens = nlc::pipeline::tokenize(joined(f.words));
    if (tokens.empty()) {
        std::cerr << "tokenize: no tokens\n";
        return 1;
    }
    std::cout << render::tags_render(tokens, res.hmm->tag(tokens), cfg.format);
    return 0;
}

int cmd_parse(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.grammar.empty(), "parse requires --grammar (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const PipelineResult r = nlc::pipeline::run_pipeline(joined(f.words), res, cfg);
    // this subcommand ends at the parse stage; semantic diagnostics are not its business
    std::vector<nlc::pipeline::StageFailure> mine;
    for (const auto& d : r.diagnostics)
        if (d.stage == "tokenize" || d.stage == "morph" || d.stage == "tag" || d.stage == "parse")
            mine.push_back(d);
    std::cerr << render::diagnostics_render(mine);
    if (r.trees.empty()) {
        std::cout << "no parse\n";
        return 1;
    }
    std::cout << render::trees_render(r.trees, cfg.format);
    return 0;
}

int cmd_interpret(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.grammar.empty(), "interpret requires --grammar (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const PipelineResult r = nlc::pipeline::run_pipeline(joined(f.words), res, cfg);
    std::cerr << render::diagnostics_render(r.diagnostics);
    if (r.interpretations.empty()) {
        std::cout << "no interpretation\n";
        return 1;
    }
    std::cout << render::interpretations_render(r.interpretations, cfg.format);
    return 0;
}

int cmd_eval(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.world.empty(), "eval requires --world (or a config)"))
        return rc;
    const auto w = nlc::world::load_world(cfg.world);
    nlc::logic::Expr formula;
    try {
        formula = nlc::logic::parse_sexpr(f.formula);
    } catch (const nlc::logic::ParseError&) {
        try {
            formula = nlc::logic::parse(f.formula);  // fall back to functional notation
        } catch (const nlc::logic::ParseError& ex) {
            std::cerr << ex.what() << "\n";
            return 2;
        }
    }
    const bool truth = nlc::logic::evaluate(formula, w);
    std::cout << (truth ? "true" : "false") << "\n";
    return 0;
}

int cmd_run(const Flags& f) {
    const auto cfg = effective_config(f);
    if (const int rc = require(!cfg.grammar.empty(), "run requires --grammar (or a config)"))
        return rc;
    const Resources res = nlc::pipeline::load_resources(cfg);
    const PipelineResult r = nlc::pipeline::run_pipeline(joined(f.words), res, cfg);
    std::cerr << render::diagnostics_render(r.diagnostics);
    std::cout << render::result_render(r, cfg.format);
    return r.interpretations.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"natural language understanding pipeline"};
    app.require_subcommand(1);
    Flags f;

    auto* tok = app.add_subcommand("tokenize", "split text into tokens");
    tok->add_option("text", f.words, "input text")->required();
    add_common_flags(tok, f);

    auto* mo = app.add_subcommand("morph", "morphological analyses of a word");
    mo->add_option("word", f.word, "surface form")->required();
    add_common_flags(mo, f);

    auto* tl = app.add_subcommand("train-lm", "train an n-gram model, print it");
    tl->add_option("corpus", f.corpus, "training text, one sentence per line")->required();
    tl->add_option("--order", f.order, "n-gram order (default 2)");
    add_common_flags(tl, f);

    auto* pr = app.add_subcommand("predict", "most likely next words");
    pr->add_option("history", f.words, "preceding words");
    add_common_flags(pr, f);

    auto* co = app.add_subcommand("correct", "ranked spelling corrections");
    co->add_option("word", f.word, "observed word")->required();
    add_common_flags(co, f);

    auto* tt = app.add_subcommand("train-tagger", "train the HMM tagger, print a summary");
    add_common_flags(tt, f);

    auto* tg = app.add_subcommand("tag", "part-of-speech tag a sentence");
    tg->add_option("text", f.words, "input text")->required();
    add_common_flags(tg, f);

    auto* pa = app.add_subcommand("parse", "parse a sentence into trees");
    pa->add_option("text", f.words, "input text")->required();
    add_common_flags(pa, f);

    auto* in = app.add_subcommand("interpret", "compose meanings for a sentence");
    in->add_option("text", f.words, "input text")->required();
    add_common_flags(in, f);

    auto* ev = app.add_subcommand("eval", "evaluate a formula against the world model");
    ev->add_option("formula", f.formula, "formula text")->required();
    add_common_flags(ev, f);

    auto* ru = app.add_subcommand("run", "full pipeline: text to evaluated meanings");
    ru->add_option("text", f.words, "input text")->required();
    add_common_flags(ru, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints message and synopsis to stderr
        return 2;
    }

    try {
        if (tok->parsed()) return cmd_tokenize(f);
        if (mo->parsed()) return cmd_morph(f);
        if (tl->parsed()) return cmd_train_lm(f);
        if (pr->parsed()) return cmd_predict(f);
        if (co->parsed()) return cmd_correct(f);
        if (tt->parsed()) return cmd_train_tagger(f);
        if (tg->parsed()) return cmd_tag(f);
        if (pa->parsed()) return cmd_parse(f);
        if (in->parsed()) return cmd_interpret(f);
        if (ev->parsed()) return cmd_eval(f);
        if (ru->parsed()) return cmd_run(f);
    } catch (const nlc::pipeline::ConfigError& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    } catch (const nlc::Error& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    }
    return 2;
}

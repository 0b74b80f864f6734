#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "model_enum.hpp"
#include "nlc/compose.hpp"
#include "nlc/earley.hpp"
#include "nlc/grammar.hpp"
#include "nlc/logic.hpp"
#include "nlc/pipeline.hpp"
#include "nlc/text.hpp"
#include "nlc/world.hpp"

using nlc::compose::compose;
using nlc::earley::earley_parse;
using nlc::earley::extract_trees;
using nlc::earley::TreeNode;
using nlc::grammar::Grammar;
using nlc::grammar::load_grammar;
using nlc::logic::Expr;
using nlc::logic::parse;
using nlc::logic::to_string;
using nlc::pipeline::load_config;
using nlc::pipeline::load_resources;
using nlc::pipeline::PipelineConfig;
using nlc::pipeline::PipelineResult;
using nlc::pipeline::Resources;
using nlc::pipeline::run_pipeline;
using nlc::pipeline::tokenize;

namespace {

const std::string kData = NLC_DATA_DIR;

struct SemanticsFixture {
    PipelineConfig cfg = load_config(kData + "/bundles/semantics.json");
    Resources res = load_resources(cfg);
};

struct AgreementFixture {
    PipelineConfig cfg = load_config(kData + "/bundles/agreement.json");
    Resources res = load_resources(cfg);
};

std::string meaning_of(const std::string& sentence, const Grammar& g) {
    const auto chart = earley_parse(g, nlc::text::split_ws(sentence));
    REQUIRE(chart.accepted);
    const auto trees = extract_trees(chart, g, 4);
    REQUIRE(trees.size() == 1);
    return to_string(nlc::logic::canonicalize(compose(trees[0], g)));
}

}  // namespace

TEST_CASE("tokenization splits words and peels boundary punctuation") {
    CHECK(tokenize("Julia sleeps") == std::vector<std::string>{"Julia", "sleeps"});
    CHECK(tokenize("Julia sleeps.") == std::vector<std::string>{"Julia", "sleeps", "."});
    CHECK(tokenize("  spaced\tout\n") == std::vector<std::string>{"spaced", "out"});
    CHECK(tokenize("(well,") == std::vector<std::string>{"(", "well", ","});
    CHECK(tokenize("don't stop") == std::vector<std::string>{"don't", "stop"});
    CHECK(tokenize("...") == std::vector<std::string>{".", ".", "."});
    CHECK(tokenize("").empty());
    CHECK(tokenize("   ").empty());
}

TEST_CASE("the fixture grammar composes the expected meanings") {
    const SemanticsFixture fx;
    const Grammar& g = *fx.res.grammar;
    CHECK(meaning_of("John runs", g) == "runs(John)");
    CHECK(meaning_of("Sally eats", g) == "eats(Sally)");
    CHECK(meaning_of("Julia sleeps", g) == "sleep(Julia)");
    CHECK(meaning_of("Maharani serves vegetarian food", g) ==
          "Serves(Maharani, VegetarianFood)");
    CHECK(meaning_of("Julia serves Sally", g) == "Serves(Julia, Sally)");
}

TEST_CASE("composition failures carry their own error types") {
    // no attachment on the production
    const Grammar bare = load_grammar("S -> A\nu : A :: U\n");
    const auto t1 = extract_trees(earley_parse(bare, {"u"}), bare, 1);
    REQUIRE(t1.size() == 1);
    CHECK_THROWS_AS(compose(t1[0], bare), nlc::compose::MissingAttachment);

    // no semantics on the lexical entry
    const Grammar mute = load_grammar("S -> A :: rhs1\nu : A\n");
    const auto t2 = extract_trees(earley_parse(mute, {"u"}), mute, 1);
    REQUIRE(t2.size() == 1);
    CHECK_THROWS_AS(compose(t2[0], mute), nlc::compose::MissingAttachment);

    // the composed result keeps a free variable
    const Grammar open_result = load_grammar("S -> A :: rhs1\nu : A :: \\x. P(x,y)\n");
    const auto t3 = extract_trees(earley_parse(open_result, {"u"}), open_result, 1);
    REQUIRE(t3.size() == 1);
    CHECK_THROWS_AS(compose(t3[0], open_result), nlc::compose::NonClosedResult);

    // a hand-mangled tree whose child list is shorter than the attachment needs
    const Grammar pair = load_grammar("S -> A A :: (rhs1 rhs2)\nu : A :: U\n");
    auto t4 = extract_trees(earley_parse(pair, {"u", "u"}), pair, 1);
    REQUIRE(t4.size() == 1);
    t4[0].children.pop_back();
    CHECK_THROWS_AS(compose(t4[0], pair), nlc::compose::ArityError);
}

TEST_CASE("world models round-trip through their JSON form") {
    const auto w = nlc::world::load_world(kData + "/semantics/world.json");
    CHECK(w.domain == std::set<std::string>{"jo", "ju", "ma", "sa", "vf"});
    CHECK(w.constants.at("Julia") == "ju");
    CHECK(w.predicates.at("Serves").count({"ma", "vf"}) == 1);

    const std::string text = nlc::world::to_json_text(w);
    const auto again = nlc::world::from_json_text(text);
    CHECK(again.domain == w.domain);
    CHECK(again.constants == w.constants);
    CHECK(again.predicates == w.predicates);
    CHECK(nlc::world::to_json_text(again) == text);
}

TEST_CASE("world model validation rejects broken files") {
    using nlc::world::from_json_text;
    CHECK_THROWS_AS(from_json_text("not json"), nlc::Error);
    CHECK_THROWS_AS(from_json_text("[]"), nlc::Error);
    CHECK_THROWS_AS(from_json_text(R"({"domain":["a"],"constants":{"X":"b"}})"), nlc::Error);
    CHECK_THROWS_AS(from_json_text(R"({"domain":["a"],"predicates":{"P":[["a"],["a","a"]]}})"),
                    nlc::Error);
    CHECK_THROWS_AS(from_json_text(R"({"domain":["a"],"predicates":{"P":[["b"]]}})"),
                    nlc::Error);
    // an explicitly empty extension is legal and survives the round trip
    const auto w = from_json_text(R"({"domain":["a"],"predicates":{"P":[]}})");
    CHECK(w.predicates.at("P").empty());
}

TEST_CASE("the library evaluator agrees with a naive one on every small model") {
    const std::vector<Expr> fixtures = {
        parse("sleep(Julia)"),
        parse("~sleep(Julia)"),
        parse("(Serves(Maharani, VegetarianFood) & VegetarianRestaurant(Maharani))"),
        parse("forall x. (VegetarianRestaurant(x) -> Serves(x, VegetarianFood))"),
        parse("exists x. (Dog(x) & Loves(Julia, x))"),
        parse("forall x. exists y. Loves(x, y)"),
        parse("~exists x. (Dog(x) & ~Dog(x))"),
    };
    for (const auto& f : fixtures) {
        model_enum::SymbolTable syms;
        model_enum::collect_symbols(f, syms);
        for (std::size_t d = 1; d <= 2; ++d) {
            std::size_t checked = 0;
            model_enum::for_each_model(syms, d, [&](const nlc::logic::WorldModel& w) {
                const bool lib = nlc::logic::evaluate(f, w);
                const bool naive = model_enum::naive_eval(f, w, {});
                if (lib != naive) {
                    CAPTURE(to_string(f), d, nlc::world::to_json_text(w));
                    REQUIRE(lib == naive);
                }
                ++checked;
                return true;
            });
            CHECK(checked ==
                  static_cast<std::size_t>(model_enum::count_models(syms, d)));
        }
    }
}

TEST_CASE("sampled large-domain models agree as well") {
    const Expr f =
        parse("exists x. exists y. (Having(x) & Haver(Speaker, x) & HadThing(y, x) & Car(y))");
    model_enum::SymbolTable syms;
    model_enum::collect_symbols(f, syms);
    std::mt19937_64 rng(20240819);
    for (int i = 0; i < 500; ++i) {
        const auto w = model_enum::random_model(syms, 3, rng);
        CHECK(nlc::logic::evaluate(f, w) == model_enum::naive_eval(f, w, {}));
    }
}

TEST_CASE("run_pipeline interprets the showcase sentence") {
    const SemanticsFixture fx;
    const PipelineResult r = run_pipeline("Julia sleeps", fx.res, fx.cfg);
    CHECK(r.tokens == std::vector<std::string>{"Julia", "sleeps"});
    CHECK(r.tags.size() == 2);
    CHECK(r.diagnostics.empty());
    REQUIRE(r.interpretations.size() == 1);
    const auto& in = r.interpretations[0];
    CHECK(in.canonical_text == "sleep(Julia)");
    CHECK(nlc::earley::tree_sexpr(in.tree) == "(S (NP (PN Julia)) (VP (IV sleeps)))");
    REQUIRE(in.truth.has_value());
    CHECK(*in.truth == true);
}

TEST_CASE("run_pipeline reports truth against the bundled world") {
    const SemanticsFixture fx;
    const auto serve = run_pipeline("Maharani serves vegetarian food", fx.res, fx.cfg);
    REQUIRE(serve.interpretations.size() == 1);
    CHECK(serve.interpretations[0].canonical_text == "Serves(Maharani, VegetarianFood)");
    CHECK(serve.interpretations[0].truth == true);

    // well-formed but false in the model
    const auto off = run_pipeline("Julia runs", fx.res, fx.cfg);
    REQUIRE(off.interpretations.size() == 1);
    CHECK(off.interpretations[0].canonical_text == "runs(Julia)");
    CHECK(off.interpretations[0].truth == false);
}

TEST_CASE("agreement violations die at the parse stage") {
    const AgreementFixture fx;
    const auto good = run_pipeline("The ball rolls", fx.res, fx.cfg);
    CHECK(good.interpretations.empty());  // grammar carries no attachments
    bool parse_ok = true;
    for (const auto& d : good.diagnostics) parse_ok = parse_ok && d.stage != "parse";
    CHECK(parse_ok);  // failure is at compose, not parse

    const auto bad = run_pipeline("The ball roll", fx.res, fx.cfg);
    CHECK(bad.interpretations.empty());
    REQUIRE_FALSE(bad.diagnostics.empty());
    CHECK(bad.diagnostics[0].stage == "parse");
}

TEST_CASE("empty input fails the tokenize stage") {
    const SemanticsFixture fx;
    const auto r = run_pipeline("   ", fx.res, fx.cfg);
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].stage == "tokenize");
    CHECK(r.diagnostics[0].detail == "no tokens");
    CHECK(r.tokens.empty());
    CHECK(r.interpretations.empty());
}

TEST_CASE("unknown words fail the parse stage with suggestions") {
    const SemanticsFixture fx;
    const auto r = run_pipeline("Julia zleeps", fx.res, fx.cfg);
    CHECK(r.interpretations.empty());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].stage == "parse");
    CHECK(r.diagnostics[0].detail.find("unknown token 'zleeps' at position 2") !=
          std::string::npos);
    CHECK(r.diagnostics[0].detail.find("sleeps") != std::string::npos);
}

TEST_CASE("interpretation count respects the configured depth") {
    // two readings: low and high attachment of the final phrase
    const Grammar g = load_grammar(R"(S -> V NP :: (rhs1 rhs2)
S -> V NP PP :: (rhs3 (rhs1 rhs2))
NP -> N :: rhs1
NP -> N PP :: (rhs2 rhs1)
PP -> P N :: (rhs1 rhs2)
saw : V :: \x. Saw(x)
man : N :: Man
scope : N :: Scope
with : P :: \y. \p. With(p, y)
)");
    Resources res;
    res.grammar = g;
    PipelineConfig cfg;
    cfg.k = 1;
    auto one = run_pipeline("saw man with scope", res, cfg);
    CHECK(one.interpretations.size() == 1);
    cfg.k = 3;
    auto both = run_pipeline("saw man with scope", res, cfg);
    CHECK(both.interpretations.size() == 2);
    // extraction order is deterministic, so the capped list is a prefix
    CHECK(both.interpretations[0].canonical_text == one.interpretations[0].canonical_text);
}

TEST_CASE("configs resolve paths relative to their own directory") {
    const auto cfg = load_config(kData + "/bundles/semantics.json");
    CHECK(cfg.grammar == kData + "/bundles/../semantics/semantics.gr");
    CHECK(cfg.k == 3);
    CHECK(cfg.format == "text");
    CHECK(cfg.smoothing == "add_one");
    // and the files all load
    const auto res = load_resources(cfg);
    CHECK(res.grammar.has_value());
    CHECK(res.world.has_value());
    CHECK(res.lm.has_value());
    CHECK(res.hmm.has_value());
    CHECK(res.has_morphology());
}

TEST_CASE("bad configurations are rejected before any parsing") {
    using nlc::pipeline::ConfigError;
    CHECK_THROWS_AS(load_config(kData + "/bundles/missing.json"), ConfigError);

    PipelineConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(nlc::pipeline::validate_config(cfg), ConfigError);
    cfg = PipelineConfig{};
    cfg.smoothing = "laplace";
    CHECK_THROWS_AS(nlc::pipeline::validate_config(cfg), ConfigError);
    cfg = PipelineConfig{};
    cfg.format = "xml";
    CHECK_THROWS_AS(nlc::pipeline::validate_config(cfg), ConfigError);
    cfg = PipelineConfig{};
    cfg.lambda = 0.0;
    CHECK_THROWS_AS(nlc::pipeline::validate_config(cfg), ConfigError);
    cfg = PipelineConfig{};
    cfg.grammar = kData + "/does/not/exist.gr";
    CHECK_THROWS_AS(load_resources(cfg), ConfigError);
}

TEST_CASE("stage renderings are deterministic and format-aware") {
    const SemanticsFixture fx;
    const auto r = run_pipeline("Julia sleeps", fx.res, fx.cfg);

    namespace render = nlc::pipeline::render;
    CHECK(render::tokens_render(r.tokens, "text") == "Julia\nsleeps\n");
    CHECK(render::tokens_render(r.tokens, "sexpr") == "(tokens Julia sleeps)\n");
    CHECK(render::tokens_render(r.tokens, "json") == "[\n  \"Julia\",\n  \"sleeps\"\n]\n");

    CHECK(render::interpretations_render(r.interpretations, "text") ==
          "interpretation 1: sleep(Julia)\ntruth 1: true\n");
    CHECK(render::interpretations_render(r.interpretations, "sexpr") ==
          "interpretation 1: (sleep Julia)\ntruth 1: true\n");

    const std::string a = render::result_render(r, "json");
    const auto r2 = run_pipeline("Julia sleeps", fx.res, fx.cfg);
    CHECK(render::result_render(r2, "json") == a);
    CHECK(a.find("\"canonical\": \"sleep(Julia)\"") != std::string::npos);
    CHECK(a.find("\"sexpr\": \"(sleep Julia)\"") != std::string::npos);
    CHECK(a.find("\"truth\": true") != std::string::npos);

    const auto trees = std::vector<TreeNode>{r.interpretations[0].tree};
    const std::string tj = render::trees_render(trees, "json");
    CHECK(tj.find("\"label\": \"S\"") != std::string::npos);
    CHECK(tj.find("\"token\": \"Julia\"") != std::string::npos);
    CHECK(render::trees_render(trees, "text") ==
          "(S (NP (PN Julia)) (VP (IV sleeps)))\n");
}

TEST_CASE("feature structures serialize into tree JSON") {
    const AgreementFixture fx;
    const auto r = run_pipeline("The ball rolls", fx.res, fx.cfg);
    // trees were extracted even though composition has nothing to attach
    const auto chart = earley_parse(*fx.res.grammar, {"The", "ball", "rolls"});
    const auto trees = extract_trees(chart, *fx.res.grammar, 3);
    REQUIRE(trees.size() == 1);
    const auto doc = nlc::pipeline::render::tree_json(trees[0]);
    CHECK(doc["label"] == "S");
    CHECK(doc["features"]["NUMBER"] == "SG");
    CHECK(doc["children"].size() == 2);
    (void)r;
}

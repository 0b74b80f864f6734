// End-to-end checks of the command-line binary: every subcommand, the
// exit-code scheme (0 success, 1 negative answer, 2 operator error), and
// byte-identical agreement between subcommand output and the library's own
// rendering of the same stage.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <catch2/catch_amalgamated.hpp>
#include "json.hpp"
#include "nlc/pipeline.hpp"

namespace {

const std::string kCli = NLC_CLI;
const std::string kData = NLC_DATA_DIR;

struct Proc {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Runs the binary through the shell so stdout and stderr can be captured
// separately; `env` is prepended verbatim (e.g. "NLC_CONFIG=...").
Proc run_cli(const std::string& args, const std::string& env = "") {
    static int serial = 0;
    const std::string base = "/tmp/nlc_cli_" + std::to_string(++serial);
    const std::string out = base + ".out";
    const std::string err = base + ".err";
    std::string cmd = env;
    if (!cmd.empty()) cmd += " ";
    cmd += "'" + kCli + "' " + args + " >'" + out + "' 2>'" + err + "'";
    const int raw = std::system(cmd.c_str());
    Proc p;
    p.status = WEXITSTATUS(raw);
    p.out = slurp(out);
    p.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return p;
}

std::string q(const std::string& s) { return "\"" + s + "\""; }

const std::string kSemanticsBundle = kData + "/bundles/semantics.json";
const std::string kAgreementBundle = kData + "/bundles/agreement.json";
const std::string kMorphFlags = "--lexicon '" + kData + "/morph/lexicon.tsv' --affixes '" +
                                kData + "/morph/affixes.tsv' --ortho '" + kData +
                                "/morph/ortho.tsv'";
const std::string kTaggerFlags = "--tagset '" + kData + "/tagger/tagset.tsv' --tagged_corpus '" +
                                 kData + "/tagger/corpus.txt'";

}  // namespace

TEST_CASE("tokenize subcommand splits text and reports empty input") {
    auto p = run_cli("tokenize " + q("The ball rolls.") + " --format text");
    CHECK(p.status == 0);
    CHECK(p.out == "The\nball\nrolls\n.\n");

    p = run_cli("tokenize " + q("  ") + " --format text");
    CHECK(p.status == 1);
    CHECK(p.out.empty());
    CHECK(p.err == "tokenize: no tokens\n");

    p = run_cli("tokenize " + q("Julia sleeps"));
    CHECK(p.status == 0);
    const auto doc = nlohmann::json::parse(p.out);
    REQUIRE(doc.is_array());
    CHECK(doc.size() == 2);
    CHECK(doc[0] == "Julia");
}

TEST_CASE("morph subcommand analyzes words against the lexicon") {
    auto p = run_cli("morph wolves " + kMorphFlags + " --format text");
    CHECK(p.status == 0);
    CHECK(p.out == "wolves: wolf PN {+PLURAL}\n");

    p = run_cli("morph zzz " + kMorphFlags + " --format text");
    CHECK(p.status == 1);
    CHECK(p.out == "zzz: no analysis\n");

    p = run_cli("morph running " + kMorphFlags);
    CHECK(p.status == 0);
    const auto doc = nlohmann::json::parse(p.out);
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["word"] == "running");
    CHECK(doc[0]["analyses"][0]["stem"] == "run");
}

TEST_CASE("train-lm reproduces the checked-in model byte for byte") {
    const auto p = run_cli("train-lm '" + kData + "/lm/corpus.txt' --order 2");
    CHECK(p.status == 0);
    CHECK(p.out == slurp(kData + "/lm/model.tsv"));
}

TEST_CASE("predict ranks next words by probability then alphabetically") {
    const auto p =
        run_cli("predict Julia --lm '" + kData + "/lm/model.tsv' --format text --k 3");
    CHECK(p.status == 0);
    std::istringstream lines(p.out);
    std::string w1, p1, w2, p2, w3, p3;
    lines >> w1 >> p1 >> w2 >> p2 >> w3 >> p3;
    CHECK(w1 == "</s>");
    CHECK(w2 == "runs");
    CHECK(w3 == "sleeps");
    CHECK(p1 == p2);
    CHECK(p2 == p3);
}

TEST_CASE("correct ranks corrections and is deterministic") {
    const std::string args = "correct Taes --lexicon '" + kData + "/spell/wordlist.txt' --lm '" +
                             kData + "/lm/model.tsv'";
    const auto p = run_cli(args);
    CHECK(p.status == 0);
    const auto doc = nlohmann::json::parse(p.out);
    REQUIRE(!doc.empty());
    CHECK(doc[0]["word"] == "Tapes");
    CHECK(doc[0]["distance"] == 1.0);

    const auto again = run_cli(args);
    CHECK(again.out == p.out);
}

TEST_CASE("train-tagger prints a corpus summary") {
    const auto p = run_cli("train-tagger " + kTaggerFlags);
    CHECK(p.status == 0);
    const auto doc = nlohmann::json::parse(p.out);
    CHECK(doc["sentences"] == 11);
    CHECK(doc["tags"].is_array());
}

TEST_CASE("tag subcommand reproduces the showcase tagging") {
    const auto p = run_cli(
        "tag " + q("The process is quite simple , as this sentence illustrates") + " " +
        kTaggerFlags + " --format text");
    CHECK(p.status == 0);
    CHECK(p.out ==
          "The/DET process/NN is/AUX quite/ADV simple/ADJ ,/, as/CONJ this/DET "
          "sentence/NN illustrates/VB\n");
}

TEST_CASE("parse subcommand prints trees and signals failure") {
    const std::string air = "--grammar '" + kData + "/grammar/air_travel.gr'";

    SECTION("a grammatical sentence yields one tree as JSON by default") {
        const auto p = run_cli("parse " + q("I want a morning flight") + " " + air);
        CHECK(p.status == 0);
        const auto doc = nlohmann::json::parse(p.out);
        REQUIRE(doc.is_array());
        REQUIRE(doc.size() == 1);
        CHECK(doc[0]["label"] == "S");
    }

    SECTION("word salad is rejected with exit 1") {
        const auto p = run_cli("parse " + q("flight a want") + " " + air);
        CHECK(p.status == 1);
        CHECK(p.out == "no parse\n");
        CHECK(p.err == "parse: no parse\n");
    }

    SECTION("sexpr format prints the bracketed tree") {
        const auto p =
            run_cli("parse " + q("I want a morning flight") + " " + air + " --format sexpr");
        CHECK(p.status == 0);
        CHECK(p.out ==
              "(S (NP (Pronoun I)) (VP (Verb want) (NP (Det a) (Nominal (Noun morning) "
              "(Nominal (Noun flight))))))\n");
    }

    SECTION("semantic diagnostics do not leak into parse output") {
        const auto p = run_cli("parse " + q("The ball rolls") + " --config '" +
                               kAgreementBundle + "' --format json");
        CHECK(p.status == 0);
        CHECK(p.err.empty());
        const auto doc = nlohmann::json::parse(p.out);
        REQUIRE(doc.size() == 1);
    }

    SECTION("an agreement violation is a parse failure") {
        const auto p =
            run_cli("parse " + q("The ball roll") + " --config '" + kAgreementBundle + "'");
        CHECK(p.status == 1);
        CHECK(p.out == "no parse\n");
        CHECK(p.err ==
              "parse: no parse: every derivation violates a feature constraint\n");
    }
}

TEST_CASE("interpret subcommand composes meanings") {
    const std::string cfg = "--config '" + kSemanticsBundle + "'";

    auto p = run_cli("interpret " + q("Maharani serves vegetarian food") + " " + cfg +
                     " --format text");
    CHECK(p.status == 0);
    CHECK(p.out == "interpretation 1: Serves(Maharani, VegetarianFood)\ntruth 1: true\n");

    p = run_cli("interpret " + q("Julia zleeps") + " " + cfg + " --format text");
    CHECK(p.status == 1);
    CHECK(p.out == "no interpretation\n");
    CHECK(p.err.find("unknown token 'zleeps' at position 2") != std::string::npos);
    CHECK(p.err.find("sleeps") != std::string::npos);
}

TEST_CASE("eval subcommand accepts both notations and grades errors") {
    const std::string world = "--world '" + kData + "/semantics/world.json'";

    auto p = run_cli("eval " + q("(sleep Julia)") + " " + world);
    CHECK(p.status == 0);
    CHECK(p.out == "true\n");

    p = run_cli("eval " + q("Serves(Maharani, VegetarianFood)") + " " + world);
    CHECK(p.status == 0);
    CHECK(p.out == "true\n");

    p = run_cli("eval " + q("runs(Julia)") + " " + world);
    CHECK(p.status == 0);
    CHECK(p.out == "false\n");

    p = run_cli("eval " +
                q("(forall (x) (implies (VegetarianRestaurant x) (Serves x VegetarianFood)))") +
                " " + world);
    CHECK(p.status == 0);
    CHECK(p.out == "true\n");

    p = run_cli("eval " + q("(sleep Nobody)") + " " + world);
    CHECK(p.status == 1);
    CHECK(p.out.empty());
    CHECK(p.err.find("Nobody") != std::string::npos);

    p = run_cli("eval " + q("(sleep") + " " + world);
    CHECK(p.status == 2);
}

TEST_CASE("run subcommand is deterministic and reports truth") {
    const std::string cfg = "--config '" + kSemanticsBundle + "'";

    const auto first = run_cli("run " + q("Julia sleeps") + " " + cfg + " --format json");
    CHECK(first.status == 0);
    const auto second = run_cli("run " + q("Julia sleeps") + " " + cfg + " --format json");
    CHECK(second.out == first.out);

    const auto doc = nlohmann::json::parse(first.out);
    REQUIRE(doc["interpretations"].size() == 1);
    CHECK(doc["interpretations"][0]["canonical"] == "sleep(Julia)");
    CHECK(doc["interpretations"][0]["truth"] == true);

    const auto falsy = run_cli("run " + q("Julia runs") + " " + cfg + " --format text");
    CHECK(falsy.status == 0);
    CHECK(falsy.out.find("truth 1: false") != std::string::npos);

    const auto blocked =
        run_cli("run " + q("The ball roll") + " --config '" + kAgreementBundle + "'");
    CHECK(blocked.status == 1);
    CHECK(blocked.err.find("parse:") != std::string::npos);
}

TEST_CASE("configuration comes from the environment unless a flag overrides it") {
    const std::string env = "NLC_CONFIG='" + kSemanticsBundle + "'";

    auto p = run_cli("run " + q("Julia sleeps"), env);
    CHECK(p.status == 0);
    CHECK(p.out.find("sleep(Julia)") != std::string::npos);

    // explicit --config wins over the environment
    p = run_cli("run " + q("The ball rolls") + " --config '" + kAgreementBundle + "'",
                "NLC_CONFIG='" + kData + "/bundles/does_not_exist.json'");
    CHECK(p.status == 1);  // parses, but the agreement grammar has no semantics
    CHECK(p.err.find("compose:") != std::string::npos);

    // flag overrides a field inside the config
    p = run_cli("run " + q("Julia sleeps") + " --config '" + kSemanticsBundle +
                "' --format text");
    CHECK(p.status == 0);
    CHECK(p.out.find("interpretation 1: sleep(Julia)") != std::string::npos);
}

TEST_CASE("operator errors exit with status 2") {
    CHECK(run_cli("frobnicate").status == 2);
    CHECK(run_cli("parse").status == 2);                       // missing text
    CHECK(run_cli("tokenize hello --no-such-flag").status == 2);
    CHECK(run_cli("run hello --config /no/such/file.json").status == 2);
    CHECK(run_cli("run " + q("Julia sleeps") + " --config '" + kSemanticsBundle +
                  "' --smoothing laplace")
              .status == 2);
    CHECK(run_cli("parse hello").status == 2);                 // no grammar anywhere
    CHECK(run_cli("--help").status == 0);
}

TEST_CASE("subcommand output matches the library rendering of the same stage") {
    namespace pipeline = nlc::pipeline;
    namespace render = nlc::pipeline::render;

    auto cfg = pipeline::load_config(kSemanticsBundle);
    const auto res = pipeline::load_resources(cfg);
    const std::string input = "Maharani serves vegetarian food";
    const auto r = pipeline::run_pipeline(input, res, cfg);

    const std::string common = " --config '" + kSemanticsBundle + "'";
    CHECK(run_cli("tokenize " + q(input) + common).out ==
          render::tokens_render(r.tokens, cfg.format));
    CHECK(run_cli("tag " + q(input) + common).out == render::tags_render(r.tokens, r.tags,
                                                                         cfg.format));
    CHECK(run_cli("parse " + q(input) + common).out == render::trees_render(r.trees, cfg.format));
    CHECK(run_cli("interpret " + q(input) + common).out ==
          render::interpretations_render(r.interpretations, cfg.format));
    CHECK(run_cli("run " + q(input) + common).out == render::result_render(r, cfg.format));
}

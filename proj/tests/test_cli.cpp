#include "straloop/cli.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace straloop;
namespace fs = std::filesystem;

namespace {

const std::string kModels = STRALOOP_MODELS_DIR;
const fs::path kTmp = STRALOOP_TEST_TMP;

struct RunResult {
    int code;
    std::string out, err;
};

RunResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path d = kTmp / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

} // namespace

TEST_CASE("synth writes sets, init and report with the reactor fixpoint") {
    fs::path dir = fresh_dir("synth_reactor");
    RunResult r = run({"synth", kModels + "/reactor.model", "--k", "5", "--out", dir.string()});
    REQUIRE(r.code == 0);

    auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["fixpoint_at"] == 2);
    CHECK(report["k"] == 5);
    CHECK(report.contains("timings_ms"));
    CHECK(report["set_sizes"].is_array());

    // sets/init re-parse to semantically equal objects
    ModelFile mf = load_model_file(kModels + "/reactor.model");
    SynthesisResult syn = run_fixpoint(mf.model, mf.spec, 5);
    std::istringstream sets(slurp(dir / "sets.txt"));
    std::string line;
    int parsed = 0;
    while (std::getline(sets, line)) {
        if (line.empty()) continue;
        auto eq = line.find(" = ");
        REQUIRE(eq != std::string::npos);
        std::string lhs = line.substr(0, eq);
        Formula f = parse_formula(line.substr(eq + 3));
        // lhs looks like X[q1][0]
        auto lb = lhs.find('['), mb = lhs.find("]["), rb = lhs.rfind(']');
        std::string modeId = lhs.substr(lb + 1, mb - lb - 1);
        int level = std::stoi(lhs.substr(mb + 2, rb - mb - 2));
        size_t q = *mf.model.mode_index(modeId);
        CHECK(equivalent(f, syn.family.at(q, level)));
        ++parsed;
    }
    CHECK(parsed == 2 * (syn.family.top_index() + 1));
}

TEST_CASE("synth with k=0 emits only the base level") {
    fs::path dir = fresh_dir("synth_k0");
    RunResult r = run({"synth", kModels + "/reactor.model", "--k", "0", "--out", dir.string()});
    REQUIRE(r.code == 0);
    std::string sets = slurp(dir / "sets.txt");
    CHECK(sets.find("[0]") != std::string::npos);
    CHECK(sets.find("[1]") == std::string::npos);
}

TEST_CASE("malformed models are rejected with a diagnostic") {
    fs::path dir = fresh_dir("synth_bad");
    fs::path bad = dir / "bad.model";
    std::ofstream(bad) << "[vars]\nh\n[spec]\n(h >= 0) U[0,1] (h >= 0)\n";
    RunResult r = run({"synth", bad.string(), "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("no modes") != std::string::npos);

    std::ofstream(bad) << "[vars]\nh\n[mode a]\nrate 1\nvolume 3\n[spec]\n(h>=0) U[0,1] (h>=0)\n";
    RunResult r2 = run({"synth", bad.string(), "--out", dir.string()});
    CHECK(r2.code == 1);
    CHECK(r2.err.find("unknown mode key") != std::string::npos);

    std::ofstream(bad) << "[vars]\nh\n[bogus]\n1\n[spec]\n(h>=0) U[0,1] (h>=0)\n";
    RunResult r3 = run({"synth", bad.string(), "--out", dir.string()});
    CHECK(r3.code == 1);
    CHECK(r3.err.find("unknown section") != std::string::npos);

    std::ofstream(bad) << "[vars]\nh\n[mode a]\nrate 1\n[spec]\n(h>=0) U[0,1] (h>=0)\n"
                       << "[options]\nflavor mild\n";
    RunResult r4 = run({"synth", bad.string(), "--out", dir.string()});
    CHECK(r4.code == 1);
    CHECK(r4.err.find("unknown option") != std::string::npos);
}

TEST_CASE("controller prints the schedule and simulates") {
    RunResult r = run({"controller", kModels + "/reactor.model", "--x0", "3"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "(q2,0)(q1,1)\n");

    RunResult rHalf = run({"controller", kModels + "/reactor.model", "--x0", "1/2"});
    REQUIRE(rHalf.code == 0);
    CHECK(rHalf.out == "(q1,0)\n");

    RunResult rSim =
        run({"controller", kModels + "/reactor.model", "--x0", "3", "--simulate"});
    REQUIRE(rSim.code == 0);
    CHECK(rSim.out.find("(q2,0)(q1,1)\n") == 0);
    CHECK(rSim.out.find("time,mode,h") != std::string::npos);
    CHECK(rSim.out.find("verdict: satisfied") != std::string::npos);
}

TEST_CASE("controller exits 2 for unsynthesizable states") {
    RunResult r = run({"controller", kModels + "/reactor.model", "--x0", "5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("not synthesizable") != std::string::npos);
}

TEST_CASE("automaton emits guards and domains for the reactor variant") {
    fs::path dir = fresh_dir("automaton_reactor");
    RunResult r = run({"automaton", kModels + "/reactor_ha.model", "--out", dir.string()});
    REQUIRE(r.code == 0);
    std::string text = slurp(dir / "automaton.model");
    CHECK(text.find("h >= 4 & h <= 4") != std::string::npos);
    CHECK(text.find("h >= 5/2 & h <= 5/2") != std::string::npos);

    // round trip: the emitted file re-parses, with guards/domains intact
    ModelFile back = parse_model_file(text);
    REQUIRE(back.guards.size() == 2);
    CHECK(equivalent(back.guards.at({"q1", "q2"}), parse_formula("h >= 4 & h <= 4")));
    CHECK(equivalent(back.guards.at({"q2", "q1"}), parse_formula("h >= 5/2 & h <= 5/2")));
    CHECK(equivalent(back.domains.at("q1"), parse_formula("h <= 4")));
    CHECK(equivalent(back.domains.at("q2"), parse_formula("h >= 5/2")));
    CHECK(equivalent(back.model.mode(0).init, parse_formula("0 <= h & h <= 3")));
    CHECK(equivalent(back.model.mode(1).init, parse_formula("3 <= h & h <= 4")));
}

TEST_CASE("automaton requires declared edges") {
    fs::path dir = fresh_dir("automaton_noedges");
    RunResult r = run({"automaton", kModels + "/reactor.model", "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("edges required") != std::string::npos);
}

TEST_CASE("automaton sample emission") {
    fs::path dir = fresh_dir("automaton_samples");
    RunResult r = run({"automaton", kModels + "/reactor_ha.model", "--samples", "5", "--out",
                       dir.string()});
    REQUIRE(r.code == 0);
    std::string csv = slurp(dir / "sample_X_q1_0.csv");
    CHECK(csv.find("h,t,member") == 0);
    // 5 x 5 grid plus header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
    std::string guardCsv = slurp(dir / "sample_guard_q1_q2.csv");
    CHECK(guardCsv.find("h,member") == 0);
}

TEST_CASE("check verifies a supplied schedule") {
    RunResult good = run({"check", kModels + "/reactor.model", "--x0", "3", "--schedule",
                          "(q2,0)(q1,1)"});
    CHECK(good.code == 0);
    CHECK(good.out.find("verdict: satisfied") != std::string::npos);

    RunResult bad = run({"check", kModels + "/reactor.model", "--x0", "3", "--schedule",
                         "(q1,0)"});
    CHECK(bad.code == 2);
    CHECK(bad.out.find("verdict: violated") != std::string::npos);

    // without --schedule a controller is extracted first
    RunResult ext = run({"check", kModels + "/reactor.model", "--x0", "2"});
    CHECK(ext.code == 0);
    CHECK(ext.out.find("(q2,0)(q1,1/2)") == 0);
}

TEST_CASE("emitted artifacts are byte-deterministic") {
    fs::path d1 = fresh_dir("det1");
    fs::path d2 = fresh_dir("det2");
    for (const auto& d : {d1, d2}) {
        REQUIRE(run({"synth", kModels + "/reactor.model", "--out", d.string()}).code == 0);
        REQUIRE(run({"automaton", kModels + "/reactor_ha.model", "--out", d.string()}).code ==
                0);
    }
    CHECK(slurp(d1 / "sets.txt") == slurp(d2 / "sets.txt"));
    CHECK(slurp(d1 / "init.txt") == slurp(d2 / "init.txt"));
    CHECK(slurp(d1 / "automaton.model") == slurp(d2 / "automaton.model"));
    RunResult c1 = run({"controller", kModels + "/reactor.model", "--x0", "7/4"});
    RunResult c2 = run({"controller", kModels + "/reactor.model", "--x0", "7/4"});
    CHECK(c1.out == c2.out);
}

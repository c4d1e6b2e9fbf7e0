#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <string>

#include "qf/model.hpp"
#include "qf/report.hpp"

using namespace qf;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QF_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0)
        r.output.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string model(const std::string& name) {
    return std::string(QF_MODEL_DIR) + "/" + name;
}

const char* kMinimalQubit = R"({
  "format_version": 1,
  "dimension": 2,
  "observables": [
    {"name": "sz", "matrix": {"re": [[1, 0], [0, -1]]}},
    {"name": "sx", "matrix": {"re": [[0, 1], [1, 0]]}}
  ],
  "states": [{"name": "zero", "vector": [1, 0]}]
})";

}  // namespace

TEST_CASE("a minimal qubit model parses and builds") {
    const auto mf = parse_model_text(kMinimalQubit);
    CHECK(mf.type == "hilbert");
    CHECK(mf.dimension == 2);
    REQUIRE(mf.observables.size() == 2);
    CHECK(mf.observables[0].name() == "sz");
    auto sys = mf.build();
    const auto d = sys->distribution(sys->state("zero"), "sz");
    CHECK(d.probabilities[1] == doctest::Approx(1.0));  // sz = +1 certain
}

TEST_CASE("schema violations are named") {
    SUBCASE("non-Hermitian observable") {
        const char* text = R"({"format_version": 1, "dimension": 2,
            "observables": [{"name": "bad", "matrix": {"re": [[0, 1], [0, 0]]}}]})";
        CHECK_THROWS_WITH_AS(parse_model_text(text),
                             doctest::Contains("not Hermitian"), SchemaError);
    }
    SUBCASE("duplicate observable names") {
        const char* text = R"({"format_version": 1, "dimension": 2,
            "observables": [{"name": "a", "diag": [0, 1]}, {"name": "a", "diag": [1, 0]}]})";
        CHECK_THROWS_WITH_AS(parse_model_text(text),
                             doctest::Contains("duplicate"), SchemaError);
    }
    SUBCASE("unsupported format version") {
        const char* text = R"({"format_version": 7, "dimension": 2, "observables": []})";
        CHECK_THROWS_AS(parse_model_text(text), SchemaError);
    }
    SUBCASE("missing dimension") {
        const char* text = R"({"format_version": 1, "observables": []})";
        CHECK_THROWS_WITH_AS(parse_model_text(text),
                             doctest::Contains("dimension"), SchemaError);
    }
    SUBCASE("wrong matrix shape") {
        const char* text = R"({"format_version": 1, "dimension": 2,
            "observables": [{"name": "a", "matrix": {"re": [[1, 0, 0], [0, 1, 0]]}}]})";
        CHECK_THROWS_AS(parse_model_text(text), SchemaError);
    }
}

TEST_CASE("malformed JSON reports line and column") {
    try {
        parse_model_text("{\n  \"format_version\": 1,\n  oops\n}");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("table models build a working table backend") {
    const auto mf = parse_model_file(model("table.json"));
    CHECK(mf.type == "table");
    auto sys = mf.build();
    const auto d = sys->distribution(sys->state("corr"), "joint");
    CHECK(d.probabilities[0] == doctest::Approx(0.5));
    CHECK(d.probabilities[3] == doctest::Approx(0.5));
}

TEST_CASE("scenario blocks inherit spectra from the observables") {
    const auto mf = parse_model_file(model("chsh.json"));
    const auto& sc = mf.scenarios.at("chsh");
    CHECK(sc.contexts.size() == 4);
    CHECK(sc.spectrum_of("a0").values == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("report emit and parse round trip losslessly") {
    Report rep;
    rep.command = "qf audit demo.json";
    rep.seed = 42;
    rep.tol = 1e-8;
    rep.add("alpha", "pass", 1.0 / 3.0, "some witness");
    rep.add("beta", "skip");
    rep.add("gamma", "fail", 0.125);
    const Report back = Report::from_data(rep.to_data());
    CHECK(back == rep);
    CHECK_FALSE(rep.all_pass());
}

TEST_CASE("cli: audit of the reference qubit passes") {
    const auto r = run_cli("audit " + model("qubit.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
}

TEST_CASE("cli: simulate emits the quarter table") {
    const auto r = run_cli("simulate " + model("qubit.json") +
                           " --state zero --sequence sx,sz --format data");
    REQUIRE(r.exit_code == 0);
    const Report rep = Report::from_data(r.output);
    REQUIRE(rep.entries.size() == 5);  // four cells + total
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(rep.entries[k].residual == doctest::Approx(0.25));
}

TEST_CASE("cli: CHSH context is infeasible with exit code 1") {
    const auto r = run_cli("context " + model("chsh.json") +
                           " --state bell --scenario chsh --format data");
    CHECK(r.exit_code == 1);
    const Report rep = Report::from_data(r.output);
    CHECK(rep.entries.front().status == "pass");  // nondisturbance
    bool found = false;
    for (const auto& e : rep.entries)
        if (e.name == "joint distribution") {
            found = true;
            CHECK(e.status == "fail");
            CHECK(e.witness.find("dual certificate") != std::string::npos);
        }
    CHECK(found);
}

TEST_CASE("cli: Peres-Mermin valuation is UNSAT with exit code 1") {
    const auto r = run_cli("valuation " + model("mermin.json") + " --scenario square");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("UNSAT") != std::string::npos);
}

TEST_CASE("cli: input errors exit with code 2") {
    CHECK(run_cli("audit /nonexistent/file.json").exit_code == 2);
    CHECK(run_cli("frobnicate " + model("qubit.json")).exit_code == 2);
    CHECK(run_cli("simulate " + model("qubit.json")).exit_code == 2);  // no sequence
    CHECK(run_cli("simulate " + model("qubit.json") +
                  " --state ghost --sequence sz").exit_code == 2);
}

TEST_CASE("cli: fixed seed gives byte-identical data reports") {
    const std::string args = "audit " + model("qubit.json") + " --seed 5 --format data";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(Report::from_data(a.output).seed == 5);
}

TEST_CASE("cli: QF_SEED is the fallback seed") {
    const auto r = run_cli("audit " + model("qubit.json") + " --format data");
    const std::string cmd = "QF_SEED=31 " + std::string(QF_CLI_PATH) + " audit " +
                            model("qubit.json") + " --format data";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
    pclose(pipe);
    CHECK(Report::from_data(out).seed == 31);
    CHECK(Report::from_data(r.output).seed == 7);  // model default
}

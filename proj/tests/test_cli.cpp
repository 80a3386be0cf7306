#include <doctest.h>

#include "hyperlip/commands.hpp"

using namespace hyperlip;

namespace {

const char* kFiveMapConfig = R"({
  "source": {
    "type": "ifs",
    "dimension": 1,
    "ratio": "1/5",
    "maps": [
      {"rotation": [[1]], "translation": ["0"]},
      {"rotation": [[-1]], "translation": ["4/5"]},
      {"rotation": [[1]], "translation": ["4/5"]}
    ]
  },
  "depth": 6
})";

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("parse_config") {
    SUBCASE("valid five-map job") {
        JobConfig cfg = parse_config(kFiveMapConfig);
        REQUIRE(cfg.has_source);
        CHECK(cfg.depth == 6);
        CHECK(cfg.source.kind == SourceSpec::Kind::Ifs);
        CHECK(cfg.source.system->branching() == 3);
        CHECK(cfg.source.system->invariant_box.hi == RatVec{Rational(1)});
    }
    SUBCASE("fewer than two maps") {
        CHECK_THROWS_WITH_AS(
            parse_config(R"({"source": {"type": "ifs", "ratio": "1/2", "maps": []}})"),
            doctest::Contains("at least 2 maps"), Error);
    }
    SUBCASE("float rotation entries are rejected") {
        const char* cfg = R"({"source": {"type": "ifs", "ratio": "1/2", "maps": [
            {"rotation": [[0.5]], "translation": ["0"]},
            {"rotation": [[1]], "translation": ["1/2"]}]}})";
        CHECK_THROWS_WITH_AS(parse_config(cfg), doctest::Contains("rational"), Error);
    }
    SUBCASE("non-orthogonal rotation rejected with its path") {
        const char* cfg = R"({"source": {"type": "ifs", "ratio": "1/2", "maps": [
            {"rotation": [["1/2"]], "translation": ["0"]},
            {"rotation": [[1]], "translation": ["1/2"]}]}})";
        CHECK_THROWS_WITH_AS(parse_config(cfg), doctest::Contains("orthogonal"), Error);
    }
    SUBCASE("syntax errors carry line and column") {
        CHECK_THROWS_WITH_AS(parse_config("{\n  \"depth\": ,\n}"), doctest::Contains("line 2"),
                             Error);
    }
}

TEST_CASE("classify command") {
    JobConfig cfg = parse_config(kFiveMapConfig);
    CommandResult res = run_command("classify", cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["schema"] == "1");
    CHECK(res.report["classification"]["verdict"] == "simple");
    CHECK(res.report["classification"]["class_count"] == 2);
    auto inc = res.report["classification"]["incidence"];
    CHECK(inc[0][0] == 1);
    CHECK(inc[0][1] == 1);
    CHECK(inc[1][0] == 0);
    CHECK(inc[1][1] == 3);
    CHECK(res.report["classification"]["eigen_ok"] == true);
}

TEST_CASE("inconclusive classification exits 2") {
    JobConfig cfg = parse_config(R"({
      "source": {"type": "ladder", "levels": [1, 3, 6, 10]},
      "depth": 8,
      "budgets": {"class": 6}
    })");
    CommandResult res = run_command("classify", cfg);
    CHECK(res.exit_code == 2);
    CHECK(res.report["classification"]["verdict"] == "inconclusive");
}

TEST_CASE("reports are byte-identical across runs") {
    JobConfig cfg = parse_config(kFiveMapConfig);
    CommandResult a = run_command("classify", cfg);
    CommandResult b = run_command("classify", cfg);
    CHECK(a.report.dump(2) == b.report.dump(2));
}

TEST_CASE("rearrange command") {
    SUBCASE("feasible strict instance") {
        JobConfig cfg = parse_config(R"({
          "rearrange": {"mode": "strict", "a": [2, 2], "u": [1, 2], "N": 3, "p": 2}
        })");
        CommandResult res = run_command("rearrange", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["verdict"] == "feasible");
    }
    SUBCASE("infeasible instance exits 2") {
        JobConfig cfg = parse_config(R"({
          "rearrange": {"mode": "strict", "a": [0, 3], "u": [1, 2], "N": 3, "p": 2}
        })");
        CommandResult res = run_command("rearrange", cfg);
        CHECK(res.exit_code == 2);
        CHECK(res.report["verdict"] == "infeasible");
    }
    SUBCASE("quasi-power reports the bordered matrix") {
        JobConfig cfg = parse_config(R"({
          "rearrange": {"mode": "quasi-power", "matrix": [[1]], "u": [1], "N": 3}
        })");
        CommandResult res = run_command("rearrange", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["n"] == 1);
        CHECK(res.report["bordered"][0][1] == 2);
    }
}

TEST_CASE("verify command runs the property checks") {
    JobConfig cfg = parse_config(kFiveMapConfig);
    cfg.depth = 5;
    CommandResult res = run_command("verify", cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["ok"] == true);
    CHECK(res.report["checks"]["closure"] == true);
    CHECK(res.report["checks"]["geodesic_vs_bfs"] == true);
    CHECK(res.report["checks"]["gromov_sandwich"] == true);
}

TEST_CASE("near-isometry union mode") {
    JobConfig cfg = parse_config(R"({
      "depth": 5,
      "near_isometry": {"mode": "union", "copies": 2, "alphabet": 3}
    })");
    CommandResult res = run_command("near-isometry", cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["sigma"]["measured_distortion"] <= 1);
    CHECK(res.report["sigma"]["exhaustive"] == true);
}

TEST_CASE("near-isometry general mode emits a certificate") {
    JobConfig cfg = parse_config(kFiveMapConfig);
    cfg.depth = 5;
    CommandResult res = run_command("near-isometry", cfg);
    CHECK(res.exit_code == 0);
    CHECK(res.report["sigma"]["measured_distortion"].get<int>() >= 0);
    CHECK(res.report["sigma"]["depths_checked"].size() == 1);
}

TEST_CASE("cantor-union regimes") {
    SUBCASE("alpha beyond one is a disjoint union") {
        JobConfig cfg = parse_config(R"({
          "source": {"type": "cantor-union", "alpha": "3/2"}, "depth": 5
        })");
        CommandResult res = run_command("cantor-union", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["regime"] == "disjoint");
        CHECK(res.report["cross_edges"] == 0);
    }
    SUBCASE("alpha one touches at a point") {
        JobConfig cfg = parse_config(R"({
          "source": {"type": "cantor-union", "alpha": "1"}, "depth": 6
        })");
        CommandResult res = run_command("cantor-union", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["regime"] == "touching");
        auto inc = res.report["classification"]["incidence"];
        CHECK(inc[0][0] == 1);
        CHECK(inc[0][1] == 2);
        CHECK(inc[1][0] == 0);
        CHECK(inc[1][1] == 2);
    }
    SUBCASE("two expansions route through the decomposition") {
        JobConfig cfg = parse_config(R"({
          "source": {"type": "cantor-union", "alpha": "1/3"}, "depth": 6
        })");
        CommandResult res = run_command("cantor-union", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["regime"] == "two-expansions");
        CHECK(res.report["expansion"]["dual"] == true);
        CHECK(res.report["pieces"]["touching_pairs"].get<long long>() > 0);
    }
    SUBCASE("unique expansion classifies the digit rule") {
        JobConfig cfg = parse_config(R"({
          "source": {"type": "cantor-union", "alpha": "1/4"}, "depth": 7
        })");
        CommandResult res = run_command("cantor-union", cfg);
        CHECK(res.exit_code == 0);
        CHECK(res.report["regime"] == "unique-expansion");
        CHECK(res.report["classification"]["verdict"] == "simple");
        CHECK(res.report["classification"]["eigen_ok"] == true);
    }
}

TEST_CASE("telescope command squares the incidence") {
    JobConfig cfg = parse_config(kFiveMapConfig);
    cfg.telescope_k = 2;
    CommandResult res = run_command("telescope", cfg);
    CHECK(res.exit_code == 0);
    auto inc = res.report["classification"]["incidence"];
    CHECK(inc[0][0] == 1);
    CHECK(inc[0][1] == 4);
    CHECK(inc[1][1] == 9);
}

TEST_CASE("unknown command is an error") {
    JobConfig cfg;
    CommandResult res = run_command("nonsense", cfg);
    CHECK(res.exit_code == 1);
    CHECK(res.report["error"]["code"] == "InvalidArgument");
}

TEST_SUITE_END();

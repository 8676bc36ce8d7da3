#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "entropy/essential_trees.hpp"
#include "entropy/harness.hpp"

using namespace entropy;

namespace {

ExperimentSpec small(ExperimentKind kind, std::vector<int> ns, int trials) {
    ExperimentSpec s = default_spec(kind);
    s.n_values = std::move(ns);
    s.trials = trials;
    return s;
}

// report_json with wall_time zeroed.
std::string stable_json(ExperimentReport r) {
    r.wall_time = 0.0;
    return report_json(r);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("random tree measures") {
    CounterRng rng(42, 0);
    for (int i = 0; i < 50; ++i) {
        const TreeMeasure mu = random_tree_measure(rng, 9, 20);
        CHECK(mu.total_variation() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(mu.max_level() <= 9);
    }
    CounterRng a(7, 3);
    CounterRng b(7, 3);
    CHECK(random_tree_measure(a, 12, 5) == random_tree_measure(b, 12, 5));
    CHECK_NOTHROW(random_tree_measure(rng, kMaxLevel, 3));
    CHECK_THROWS_AS(random_tree_measure(rng, 64, 3), DepthLimitError);
    CHECK_THROWS_AS(random_tree_measure(rng, 5, 0), std::invalid_argument);
}

TEST_CASE("random interval measures") {
    CounterRng rng(42, 1);
    for (int i = 0; i < 50; ++i) {
        const IntervalMeasure mu = random_interval_measure(rng, 0.1, 12);
        CHECK(mu.total_variation() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(mu.max_point() <= 0.1);
        for (const auto& [x, m] : mu.atoms()) CHECK(x >= 1e-7 * 0.99);
    }
}

TEST_CASE("experiment names and specs") {
    for (const auto kind : {ExperimentKind::tree_approx, ExperimentKind::tree_scaling, ExperimentKind::subtree_count,
                            ExperimentKind::volterra_check, ExperimentKind::volterra_approx, ExperimentKind::nets}) {
        CHECK(parse_experiment_kind(to_string(kind)) == kind);
        CHECK_NOTHROW(default_spec(kind).validate());
    }
    CHECK_THROWS_AS(parse_experiment_kind("tree_approx"), std::invalid_argument);

    ExperimentSpec bad = default_spec(ExperimentKind::tree_approx);
    bad.beta = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = default_spec(ExperimentKind::volterra_check);
    bad.beta = 2.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = default_spec(ExperimentKind::nets);
    bad.trials = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("subtree-count reproduces the family sizes") {
    const ExperimentReport r = run(small(ExperimentKind::subtree_count, {0, 1, 2, 3, 4, 5, 6}, 1));
    const double expected[] = {1, 3, 8, 20, 50, 124, 308};
    int counts = 0;
    for (const auto& rec : r.records) {
        if (rec.check != "count") continue;
        CHECK(rec.value == expected[rec.n]);
        CHECK(rec.pass);
        ++counts;
    }
    CHECK(counts == 7);
    CHECK(r.exit_code() == 0);
}

TEST_CASE("tree-approx at n = 32 passes every trial") {
    ExperimentSpec s = small(ExperimentKind::tree_approx, {32}, 1000);
    s.threads = 2;
    const ExperimentReport r = run(s);
    CHECK(r.failed == 0);
    CHECK(r.passed == 3000);
    CHECK(r.exit_code() == 0);
    CHECK(r.max_ratio <= 1.0 + 1e-12);
}

TEST_CASE("reports are deterministic and thread-count independent") {
    ExperimentSpec s = small(ExperimentKind::tree_approx, {4, 8}, 50);
    s.threads = 1;
    const std::string one = stable_json(run(s));
    CHECK(one == stable_json(run(s)));
    s.threads = 4;
    CHECK(one == stable_json(run(s)));

    ExperimentSpec v = small(ExperimentKind::volterra_approx, {8}, 10);
    v.threads = 1;
    const std::string vone = stable_json(run(v));
    v.threads = 3;
    CHECK(vone == stable_json(run(v)));

    s.seed = 43;
    CHECK(one != stable_json(run(s)));
}

TEST_CASE("report formats") {
    const ExperimentReport r = run(small(ExperimentKind::subtree_count, {2, 3}, 1));
    const std::string csv = report_csv(r);
    CHECK(csv.rfind("kind,n,trial,value,bound,pass\n", 0) == 0);
    CHECK(csv.find("count,2,0,8,") != std::string::npos);

    const nlohmann::json j = nlohmann::json::parse(report_json(r));
    CHECK(j.at("spec").at("kind") == "subtree-count");
    CHECK(j.at("spec").at("rng") == "splitmix64-counter");
    CHECK(j.at("aggregate").at("exit_code") == 0);
    CHECK(j.at("records").size() == r.records.size());
    CHECK_FALSE(j.at("spec").contains("threads"));

    const auto dir = std::filesystem::temp_directory_path() / "entropy-lab-harness-test";
    std::filesystem::remove_all(dir);
    write_report(r, dir.string());
    CHECK(slurp(dir / "table.csv") == csv);
    CHECK(nlohmann::json::parse(slurp(dir / "report.json")) == nlohmann::json::parse(report_json(r)));
    std::filesystem::remove_all(dir);

    // A regular file where the directory should go.
    const auto blocker = std::filesystem::temp_directory_path() / "entropy-lab-blocker";
    std::ofstream(blocker) << "x";
    CHECK_THROWS_WITH_AS(write_report(r, (blocker / "sub").string()), doctest::Contains("entropy-lab-blocker"),
                         std::runtime_error);
    std::filesystem::remove(blocker);
}

TEST_CASE("exit codes") {
    ExperimentReport r;
    CHECK(r.exit_code() == 0);
    r.failed = 1;
    CHECK(r.exit_code() == 2);
    r.quadrature_trials = 4;
    r.quadrature_failures = 4;
    CHECK(r.exit_code() == 3);
    r.quadrature_failures = 3;
    CHECK(r.exit_code() == 2);
}

TEST_CASE("volterra-check passes with default tolerances") {
    ExperimentSpec s = default_spec(ExperimentKind::volterra_check);
    s.trials = 40;
    const ExperimentReport r = run(s);
    CHECK(r.failed == 0);
    CHECK(r.quadrature_failures == 0);
    CHECK(r.exit_code() == 0);
}

TEST_CASE("thread cap from the environment") {
    CHECK(resolve_threads(3) >= 1);
    CHECK(resolve_threads(3) <= 3);
}

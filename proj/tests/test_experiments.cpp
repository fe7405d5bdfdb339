#include <doctest.h>

#include <cmath>

#include "hybridq/errors.hpp"
#include "hybridq/experiments.hpp"
#include "hybridq/presets.hpp"

using namespace hybridq;
using namespace hybridq::experiments;
using doctest::Approx;

namespace {

SystemConfig open_hybrid() {
    SystemConfig c;
    c.mode = Mode::hybrid;
    c.n_clients = 4;
    c.lambda_bar = 0.1;
    c.alpha = 0.5;
    c.s_alpha_human = Distribution::truncated_normal(1.0, 0.2);
    c.s_alpha_agent = c.s_alpha_human;
    c.s_beta = Distribution::truncated_normal(3.5, 1.0);
    c.epsilon = Distribution::deterministic(0.5);
    c.horizon = 50000;
    c.warmup = 5000;
    return c;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("sla frontier stops at the first failure") {
    std::vector<WaitRow> rows;
    const double waits[] = {1.0, 2.0, 4.9, 5.1, 4.0};
    for (int n = 1; n <= 5; ++n) rows.push_back({n, "v", {waits[n - 1], 0.1, 20}, 0, 0, false});
    rows.push_back({1, "w", {6.0, 0.1, 20}, 0, 0, false});
    CHECK(sla_frontier(rows, "v", 5.0) == 3);
    CHECK(sla_frontier(rows, "w", 5.0) == 0);
    CHECK(sla_frontier(rows, "missing", 5.0) == 0);
    rows[1].unstable = true;
    CHECK(sla_frontier(rows, "v", 5.0) == 1);
}

TEST_CASE("sweep grid order and c_ratio scaling") {
    SweepSpec spec;
    spec.base = open_hybrid();
    spec.base.horizon = 500;
    spec.base.warmup = 50;
    spec.n_clients = {1, 2};
    spec.alpha = {0.2, 0.8};
    spec.c_ratio = {1.0, 2.0};
    spec.reps = 2;
    const auto pts = run_sweep(spec);
    REQUIRE(pts.size() == 8);
    CHECK(pts[0].n_clients == 1);
    CHECK(pts[1].n_clients == 2);
    CHECK(pts[2].alpha == 0.8);
    CHECK(pts[4].c_ratio == 2.0);
    CHECK(pts[5].n_clients == 4);

    spec.reps = 1;
    CHECK_THROWS_AS(run_sweep(spec), ValidationError);
}

TEST_CASE("open-model instability is detected from the offered load") {
    SystemConfig c = open_hybrid();
    c.n_clients = 6;  // 0.6 * 0.5 * 3.5 = 1.05
    CHECK(is_unstable(c, ReplicatedMetrics{}));
    c.n_clients = 5;
    CHECK_FALSE(is_unstable(c, ReplicatedMetrics{}));
    c.client_model = ClientModel::closed;
    c.n_clients = 50;
    CHECK_FALSE(is_unstable(c, ReplicatedMetrics{}));
}

TEST_CASE("hybrid simulation sits between the two epsilon treatments") {
    SystemConfig c = open_hybrid();
    c.s_beta = Distribution::truncated_normal(3.5, 1.0);
    const ValidationReport rep = validate_against_analytic(c, 30, 5);
    CHECK_FALSE(rep.any_flagged());
    for (const auto& e : rep.entries) INFO(e.metric << " " << e.simulated << " " << e.analytic);

    SystemConfig p = c;
    p.mode = Mode::pure_human;
    p.alpha = 0.0;
    p.s_beta = Distribution::exponential(2.0);
    const ValidationReport pr = validate_against_analytic(p, 30, 5);
    CHECK_FALSE(pr.any_flagged());

    p.n_operators = 2;
    CHECK_THROWS_AS(validate_against_analytic(p, 2, 5), ValidationError);
}

TEST_CASE("paired comparison at equal client counts favours the hybrid center") {
    SystemConfig h = open_hybrid();
    h.horizon = 20000;
    h.warmup = 2000;
    SystemConfig p = h;
    p.mode = Mode::pure_human;
    const PairedComparison pc = compare_paired(p, h, 10, 9);
    CHECK(pc.difference.mean > 0.0);
    CHECK(pc.difference.mean - pc.difference.half_width > 0.0);
}

TEST_CASE("win-win curve is the identity without an agent") {
    SystemConfig base = presets::session_base(100);
    base.epsilon = Distribution::deterministic(0.0);
    const WinWinCondition cond{"none", 0.0, Distribution::truncated_normal(5.0, 1.0)};
    const std::vector<int> ns = {2, 3, 4};
    const auto curve = win_win_curve(base, cond, ns, 5, 3);
    for (const auto& r : curve) CHECK(r.achieved_c == 1.0);
    CHECK(mean_achieved_c(curve) == 1.0);
}

TEST_CASE("team scaling deltas") {
    SystemConfig base = presets::session_base(100);
    const std::vector<int> ratios = {6};
    const std::vector<int> ks = {1, 2, 3};
    const std::vector<double> sb = {5.0};
    const TeamScaling ts = team_scaling(base, ratios, ks, sb, 5, 1);
    CHECK(ts.rows.size() == 3);
    REQUIRE(ts.deltas.size() == 2);
    CHECK(ts.deltas[0].from_operators == 1);
    CHECK(ts.deltas[0].delta > 0.0);
    CHECK(ts.deltas[0].delta > ts.deltas[1].delta);
}

TEST_CASE("bubble grid wait falls with alpha and rises with s_beta") {
    SystemConfig base = presets::session_base(100);
    const std::vector<double> alphas = {0.2, 0.8};
    const std::vector<double> sb = {3.0, 5.0};
    const BubbleGrid g = sweep_bubble_grid(base, alphas, sb, 8, 5, 2);
    CHECK(g.wait_hard[0][1].mean > g.wait_hard[1][1].mean);
    CHECK(g.wait_hard[0][1].mean > g.wait_hard[0][0].mean);
}

TEST_CASE("presets reject unknown names") {
    CHECK_THROWS_AS(presets::run("fig7", {}), ValidationError);
    presets::PresetOptions o;
    o.reps = 1;
    CHECK_THROWS_AS(presets::run("fig4a", o), ValidationError);
}

}  // TEST_SUITE

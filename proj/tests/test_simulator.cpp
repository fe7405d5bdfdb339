#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hybridq/analytic.hpp"
#include "hybridq/errors.hpp"
#include "hybridq/simulator.hpp"

using namespace hybridq;
using doctest::Approx;

namespace {

SystemConfig mm1(double service_mean = 2.0) {
    SystemConfig c;
    c.mode = Mode::pure_human;
    c.n_clients = 4;
    c.lambda_bar = 0.1;
    c.s_beta = Distribution::exponential(service_mean);
    c.horizon = 50000;
    c.warmup = 5000;
    return c;
}

SystemConfig hybrid_small() {
    SystemConfig c;
    c.mode = Mode::hybrid;
    c.n_clients = 5;
    c.n_operators = 1;
    c.lambda_bar = 0.08;
    c.alpha = 0.5;
    c.s_alpha_human = Distribution::truncated_normal(1.0, 0.2);
    c.s_alpha_agent = Distribution::truncated_normal(1.0, 0.2);
    c.s_beta = Distribution::truncated_normal(3.5, 1.0);
    c.epsilon = Distribution::truncated_normal(0.5, 0.1);
    c.horizon = 3000;
    c.warmup = 300;
    return c;
}

std::string trace_text(const RunResult& r) {
    std::ostringstream os;
    write_trace_csv(os, r.trace);
    return os.str();
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("config validation") {
    SystemConfig c = mm1();
    c.n_clients = 0;
    CHECK_THROWS_AS(run(c, 1), ValidationError);
    c = mm1();
    c.warmup = c.horizon;
    CHECK_THROWS_AS(run(c, 1), ValidationError);
    c = mm1();
    c.mode = Mode::hybrid_learning;
    CHECK_THROWS_AS(run(c, 1), ValidationError);
    CHECK_THROWS_AS(run_learning(mm1(), 1), ValidationError);
}

TEST_CASE("a single question on an idle operator does not wait") {
    SystemConfig c = mm1();
    c.n_clients = 1;
    c.lambda_bar = 0.001;
    c.horizon = 2000;
    c.warmup = 0;
    c.s_beta = Distribution::deterministic(1.0);
    const RunResult r = run(c, 3);
    REQUIRE(r.trace.size() >= 1);
    CHECK(r.trace.front().wait == 0.0);
    CHECK(r.trace.front().service_start == r.trace.front().arrival);
}

TEST_CASE("same seed, same trace; different seed, different trace") {
    const SystemConfig c = hybrid_small();
    const std::string a = trace_text(run(c, 42));
    CHECK(a == trace_text(run(c, 42)));
    CHECK(a != trace_text(run(c, 43)));
}

TEST_CASE("trace invariants: conservation, FIFO, overlap rule") {
    SystemConfig c = hybrid_small();
    c.n_operators = 2;
    c.n_clients = 12;
    const RunResult r = run(c, 7);
    const auto& m = r.metrics;
    CHECK(m.answered_by_agent + m.answered_by_human + m.still_in_system == m.questions_total);

    std::vector<const QuestionRecord*> human;
    for (const auto& q : r.trace) {
        CHECK(q.wait >= 0.0);
        CHECK(q.service_end >= q.service_start);
        if (q.type == QuestionType::alpha) {
            CHECK(q.answered_by == Answerer::agent);
            CHECK(q.wait == 0.0);
            CHECK_FALSE(q.classification_end.has_value());
        } else {
            CHECK(q.answered_by == Answerer::human);
            REQUIRE(q.classification_end.has_value());
            // The agent's attempt overlaps the wait: service starts once both
            // the attempt is over and an operator is free.
            CHECK(q.service_start >= *q.classification_end);
            CHECK(q.wait == Approx(q.service_start - q.arrival));
            human.push_back(&q);
        }
    }
    // Single FIFO queue: operators start questions in arrival order.
    std::sort(human.begin(), human.end(),
              [](auto* a, auto* b) { return a->arrival < b->arrival; });
    for (std::size_t i = 1; i < human.size(); ++i)
        CHECK(human[i]->service_start >= human[i - 1]->service_start);

    // Never more than two operators busy at once.
    std::vector<std::pair<double, int>> edges;
    for (auto* q : human) {
        edges.emplace_back(q->service_start, +1);
        edges.emplace_back(q->service_end, -1);
    }
    std::sort(edges.begin(), edges.end());
    int busy = 0, peak = 0;
    for (auto [t, d] : edges) peak = std::max(peak, busy += d);
    CHECK(peak <= 2);
}

TEST_CASE("agent answers everything when alpha = 1") {
    SystemConfig c = hybrid_small();
    c.alpha = 1.0;
    const RunResult r = run(c, 5);
    CHECK(r.metrics.answered_by_human == 0);
    CHECK(r.metrics.mean_wait_overall == 0.0);
    CHECK(r.metrics.operator_utilization == 0.0);
    CHECK(std::isnan(r.metrics.mean_wait_hard));
}

TEST_CASE("M/M/1 mean wait") {
    const ReplicatedMetrics m = replicate(mm1(), 30, 1);
    CHECK(m.mean_wait_overall.mean == Approx(8.0).epsilon(0.05));
    CHECK(m.operator_utilization.mean == Approx(0.8).epsilon(0.02));
}

TEST_CASE("M/D/1 mean wait") {
    SystemConfig c = mm1();
    c.s_beta = Distribution::deterministic(2.0);
    const ReplicatedMetrics m = replicate(c, 30, 2);
    CHECK(m.mean_wait_overall.mean == Approx(4.0).epsilon(0.05));
}

TEST_CASE("deterministic utilization matches offered load") {
    SystemConfig c = mm1();
    c.s_beta = Distribution::deterministic(1.5);
    c.lambda_bar = 0.1;  // 4 clients: load 0.6
    const RunResult r = run(c, 9, {.keep_trace = false});
    CHECK(r.metrics.operator_utilization == Approx(0.6).epsilon(0.01));
}

TEST_CASE("replication seeds are distinct and deterministic") {
    SystemConfig c = mm1();
    c.horizon = 2000;
    c.warmup = 200;
    const ReplicatedMetrics a = replicate(c, 5, 77);
    const ReplicatedMetrics b = replicate(c, 5, 77);
    CHECK(a.seeds == b.seeds);
    CHECK(std::set<std::uint64_t>(a.seeds.begin(), a.seeds.end()).size() == 5);
    CHECK(a.mean_wait_overall.mean == b.mean_wait_overall.mean);
    CHECK_THROWS_AS(replicate(c, 1, 77), ValidationError);
}

TEST_CASE("overload aborts the run") {
    SystemConfig c = mm1();
    c.lambda_bar = 1.0;  // load 8
    c.max_queue = 100;
    CHECK_THROWS_AS(run(c, 1), OverloadError);
    const ReplicatedMetrics m = replicate(c, 2, 1);
    CHECK(m.unstable);
}

TEST_CASE("closed clients have at most one open question") {
    SystemConfig c = hybrid_small();
    c.client_model = ClientModel::closed;
    c.n_clients = 6;
    const RunResult r = run(c, 8);
    std::vector<std::vector<const QuestionRecord*>> by_client(6);
    for (const auto& q : r.trace) by_client[static_cast<std::size_t>(q.client_id)].push_back(&q);
    for (auto& qs : by_client) {
        std::sort(qs.begin(), qs.end(), [](auto* a, auto* b) { return a->arrival < b->arrival; });
        for (std::size_t i = 1; i < qs.size(); ++i) CHECK(qs[i]->arrival > qs[i - 1]->service_end);
    }
}

TEST_CASE("episodes start empty and are laid end to end") {
    SystemConfig c = hybrid_small();
    c.client_model = ClientModel::closed;
    c.horizon = 60;
    c.warmup = 0;
    c.episodes = 50;
    const RunResult r = run(c, 4);
    for (const auto& q : r.trace) {
        const double e = std::floor(q.arrival / 60.0);
        CHECK(q.service_end < (e + 1) * 60.0);
    }
    CHECK(r.trace.back().arrival > 49 * 60.0);
}

TEST_CASE("hybrid with alpha = 0 only adds the agent's attempt time") {
    // Same seed, so both runs see the same arrivals and service times. With a
    // single operator, question i starts in the hybrid run no earlier than in
    // the pure run and no later than the largest epsilon drawn so far.
    SystemConfig h = hybrid_small();
    h.alpha = 0.0;
    h.horizon = 5000;
    h.warmup = 0;
    SystemConfig p = h;
    p.mode = Mode::pure_human;
    const RunResult rh = run(h, 3);
    const RunResult rp = run(p, 3);
    const std::size_t n = std::min(rh.trace.size(), rp.trace.size()) - 5;
    REQUIRE(n > 500);
    double max_eps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const QuestionRecord& a = rh.trace[i];
        const QuestionRecord& b = rp.trace[i];
        REQUIRE(a.arrival == b.arrival);
        max_eps = std::max(max_eps, *a.classification_end - a.arrival);
        CHECK(a.wait >= b.wait - 1e-9);
        CHECK(a.wait <= b.wait + max_eps + 1e-9);
    }
}

TEST_CASE("trace CSV format") {
    SystemConfig c = hybrid_small();
    c.horizon = 200;
    c.warmup = 0;
    const RunResult r = run(c, 1);
    std::istringstream in(trace_text(r));
    std::string header, line;
    std::getline(in, header);
    CHECK(header ==
          "question_id,client_id,arrival,type,classification_end,service_start,service_end,"
          "answered_by,wait");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 8);
        if (line.find(",alpha,") != std::string::npos) CHECK(line.find(",alpha,,") != std::string::npos);
    }
    CHECK(rows == static_cast<int>(r.trace.size()));
}

TEST_CASE("learning: a one-type catalog is learned after the first answer") {
    SystemConfig c = hybrid_small();
    c.mode = Mode::hybrid_learning;
    c.client_model = ClientModel::closed;
    c.n_clients = 1;
    c.horizon = 600;
    c.warmup = 0;
    c.learning = LearningConfig{.catalog_size = 1, .initial_db_size = 0, .session_length = 60};
    const RunResult r = run(c, 2);
    REQUIRE(r.trace.size() > 2);
    CHECK(r.trace[0].answered_by == Answerer::human);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].answered_by == Answerer::agent);
    const RunResult l = run_learning(c, 2);
    CHECK(l.share_series.size() == 10);
    CHECK(l.share_series.back() == 1.0);
}

TEST_CASE("learning: a full initial DB answers everything") {
    SystemConfig c = hybrid_small();
    c.mode = Mode::hybrid_learning;
    c.horizon = 600;
    c.warmup = 0;
    c.learning = LearningConfig{.catalog_size = 1000,
                                .popularity = Popularity::uniform,
                                .initial_db_size = 1000,
                                .session_length = 60};
    const RunResult r = run_learning(c, 3);
    for (double s : r.share_series) CHECK(s == 1.0);
    CHECK(r.metrics.answered_by_human == 0);
}

}  // TEST_SUITE

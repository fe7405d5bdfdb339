#include "hybridq/presets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hybridq/analytic.hpp"
#include "hybridq/config_io.hpp"
#include "hybridq/errors.hpp"

namespace hybridq::presets {

using experiments::Variant;
using nlohmann::json;
using report::cell;

namespace {

Distribution normal(double mean, double sd) { return Distribution::truncated_normal(mean, sd); }

std::string label(const char* prefix, double v) {
    std::ostringstream os;
    os << prefix << v;
    return os.str();
}

std::vector<int> range(int lo, int hi) {
    std::vector<int> v(static_cast<std::size_t>(hi - lo + 1));
    std::iota(v.begin(), v.end(), lo);
    return v;
}

json common_parameters(const SystemConfig& base, const PresetOptions& o) {
    return {{"base", io::to_json(base)}, {"reps", o.reps}, {"episodes", o.episodes},
            {"sla", kSla}, {"seed", o.seed}};
}

report::Table wait_table(const std::string& name, const std::vector<experiments::WaitRow>& rows) {
    report::Table t{name,
                    {"n", "variant", "mean_wait_hard", "ci95_half_width", "operator_utilization",
                     "agent_share", "unstable"},
                    {}};
    for (const auto& r : rows) {
        t.rows.push_back({cell(static_cast<long long>(r.n)), r.variant, cell(r.wait_hard.mean),
                          cell(r.wait_hard.half_width), cell(r.utilization), cell(r.agent_share),
                          r.unstable ? "1" : "0"});
    }
    return t;
}

report::Chart wait_chart(const std::string& name, const std::string& title,
                         const std::vector<experiments::WaitRow>& rows,
                         const std::vector<Variant>& variants) {
    std::vector<report::Series> series;
    for (const auto& v : variants) {
        report::Series s{v.name, {}};
        for (const auto& r : rows)
            if (r.variant == v.name) s.points.emplace_back(r.n, r.wait_hard.mean);
        series.push_back(std::move(s));
    }
    return {name, report::line_chart(title, "clients per operator (n)",
                                     "hard-question wait (min)", series)};
}

json frontiers(const std::vector<experiments::WaitRow>& rows,
               const std::vector<Variant>& variants) {
    json f = json::object();
    for (const auto& v : variants) f[v.name] = experiments::sla_frontier(rows, v.name, kSla);
    return f;
}

// --- presets ----------------------------------------------------------------

report::Output fig4a(const PresetOptions& o) {
    const SystemConfig base = session_base(o.episodes);
    const std::vector<Variant> variants = {
        {"pure", Mode::pure_human, 0.0, normal(5, 1)},
        {"alpha_0.2", Mode::hybrid, 0.2, normal(5, 1)},
        {"alpha_0.5", Mode::hybrid, 0.5, normal(5, 1)},
        {"alpha_0.8", Mode::hybrid, 0.8, normal(5, 1)},
    };
    experiments::SweepSpec spec;
    spec.base = base;
    spec.n_clients = range(1, 16);
    spec.reps = o.reps;
    spec.seed = o.seed;
    const auto rows = experiments::sweep_wait_vs_n(spec, variants);

    report::Output out;
    out.preset = "fig4a";
    out.parameters = common_parameters(base, o);
    out.parameters["n_clients"] = spec.n_clients;
    out.parameters["variants"] = {"pure: alpha=0, s_beta~N(5,1), no agent",
                                  "hybrid alpha in {0.2,0.5,0.8}, s_beta~N(5,1)"};
    out.tables.push_back(wait_table("fig4a_wait_vs_n", rows));
    out.summary = {{"sla", kSla}, {"frontier", frontiers(rows, variants)}};
    if (o.charts)
        out.charts.push_back(wait_chart("fig4a", "Hard-question wait by agent ability", rows,
                                        variants));
    return out;
}

report::Output fig4b(const PresetOptions& o) {
    const SystemConfig base = session_base(o.episodes);
    const std::vector<Variant> variants = {
        {"pure_sbeta_5", Mode::pure_human, 0.0, normal(5, 1)},
        {"pure_sbeta_3", Mode::pure_human, 0.0, normal(3, 1)},
        {"hybrid_sbeta_5", Mode::hybrid, 0.5, normal(5, 1)},
        {"hybrid_sbeta_4", Mode::hybrid, 0.5, normal(4, 1)},
        {"hybrid_sbeta_3", Mode::hybrid, 0.5, normal(3, 1)},
    };
    experiments::SweepSpec spec;
    spec.base = base;
    spec.n_clients = range(1, 16);
    spec.reps = o.reps;
    spec.seed = o.seed;
    const auto rows = experiments::sweep_wait_vs_n(spec, variants);

    // Both improvements at once: alpha = 0.8 and s_beta ~ N(3, 1), 20 clients.
    SystemConfig combined = base;
    combined.alpha = 0.8;
    combined.s_beta = normal(3, 1);
    combined.n_clients = 20;
    const ReplicatedMetrics cm = replicate(combined, o.reps, o.seed);

    report::Output out;
    out.preset = "fig4b";
    out.parameters = common_parameters(base, o);
    out.parameters["n_clients"] = spec.n_clients;
    out.parameters["combined"] = io::to_json(combined);
    auto table = wait_table("fig4b_wait_vs_n", rows);
    table.rows.push_back({"20", "combined_alpha_0.8_sbeta_3", cell(cm.mean_wait_hard.mean),
                          cell(cm.mean_wait_hard.half_width),
                          cell(cm.operator_utilization.mean), cell(cm.agent_share.mean), "0"});
    out.tables.push_back(std::move(table));
    out.summary = {{"sla", kSla},
                   {"frontier", frontiers(rows, variants)},
                   {"combined",
                    {{"n_clients", 20},
                     {"alpha", 0.8},
                     {"s_beta_mean", 3.0},
                     {"mean_wait_hard", io::to_json(cm.mean_wait_hard)}}}};
    if (o.charts)
        out.charts.push_back(wait_chart("fig4b", "Hard-question wait by operator speed", rows,
                                        variants));
    return out;
}

report::Output fig4c(const PresetOptions& o) {
    const SystemConfig base = session_base(o.episodes);
    const std::vector<double> alphas = {0.2, 0.35, 0.5, 0.65, 0.8};
    const std::vector<double> s_betas = {3.0, 3.5, 4.0, 4.5, 5.0};
    const int n = 8;
    const auto grid = experiments::sweep_bubble_grid(base, alphas, s_betas, n, o.reps, o.seed);

    report::Output out;
    out.preset = "fig4c";
    out.parameters = common_parameters(base, o);
    out.parameters["alphas"] = alphas;
    out.parameters["s_beta_means"] = s_betas;
    out.parameters["n_clients"] = n;
    report::Table t{"fig4c_bubble_grid",
                    {"alpha", "s_beta_mean", "mean_wait_hard", "ci95_half_width"},
                    {}};
    json cells = json::array();
    std::vector<report::Bubble> bubbles;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        for (std::size_t j = 0; j < s_betas.size(); ++j) {
            const Estimate& e = grid.wait_hard[i][j];
            t.rows.push_back({cell(alphas[i], 2), cell(s_betas[j], 2), cell(e.mean),
                              cell(e.half_width)});
            cells.push_back({{"alpha", alphas[i]},
                             {"s_beta_mean", s_betas[j]},
                             {"mean_wait_hard", io::number_or_null(e.mean)}});
            bubbles.push_back({alphas[i], s_betas[j], e.mean});
        }
    }
    out.tables.push_back(std::move(t));
    out.summary = {{"n_clients", n}, {"cells", cells}};
    if (o.charts)
        out.charts.push_back({"fig4c", report::bubble_chart("Hard-question wait, n = 8", "alpha",
                                                            "mean s_beta (min)", bubbles)});
    return out;
}

report::Output fig5(const PresetOptions& o) {
    const SystemConfig base = session_base(o.episodes);
    const std::vector<experiments::WinWinCondition> conditions = {
        {"cond1", 0.2, normal(3.5, 1)},
        {"cond2", 0.5, normal(3.15, 1)},
        {"cond3", 0.7, normal(2.8, 1)},
    };
    const std::vector<int> n_pure = range(3, 8);

    report::Output out;
    out.preset = "fig5";
    out.parameters = common_parameters(base, o);
    out.parameters["n_pure"] = n_pure;
    out.parameters["comparison"] = "overall mean wait, means";
    report::Table t{"fig5_win_win",
                    {"condition", "alpha", "s_beta_mean", "n_pure", "w_pure", "n_hybrid_max",
                     "achieved_c"},
                    {}};
    json conds = json::array();
    std::vector<report::Series> series;
    for (const auto& c : conditions) {
        const auto curve = experiments::win_win_curve(base, c, n_pure, o.reps, o.seed);
        report::Series s{c.name, {}};
        for (const auto& r : curve) {
            t.rows.push_back({c.name, cell(c.alpha, 2), cell(c.s_beta.mean(), 2),
                              cell(static_cast<long long>(r.n_pure)), cell(r.w_pure),
                              cell(static_cast<long long>(r.n_hybrid_max)), cell(r.achieved_c)});
            s.points.emplace_back(r.n_pure, r.n_hybrid_max);
        }
        series.push_back(std::move(s));
        const double c_star = analytic::max_client_ratio(
            1.0 - c.alpha, c.s_beta.effective_mean(), base.s_alpha_human.effective_mean());
        conds.push_back({{"name", c.name},
                         {"alpha", c.alpha},
                         {"s_beta_mean", c.s_beta.mean()},
                         {"mean_achieved_c", experiments::mean_achieved_c(curve)},
                         {"analytic_c_star", c_star}});
    }
    out.tables.push_back(std::move(t));
    out.summary = {{"conditions", conds}};
    if (o.charts)
        out.charts.push_back({"fig5", report::line_chart("Clients served at equal wait",
                                                         "pure-human clients",
                                                         "hybrid clients", series)});
    return out;
}

report::Output fig6(const PresetOptions& o) {
    const SystemConfig base = session_base(o.episodes);
    const std::vector<int> ratios = {4, 6, 8};
    const std::vector<int> ks = range(1, 5);
    const std::vector<double> s_betas = {3.0, 5.0};
    const auto ts = experiments::team_scaling(base, ratios, ks, s_betas, o.reps, o.seed);

    report::Output out;
    out.preset = "fig6";
    out.parameters = common_parameters(base, o);
    out.parameters["clients_per_operator"] = ratios;
    out.parameters["operators"] = ks;
    out.parameters["s_beta_means"] = s_betas;

    report::Table rows{"fig6_team_wait",
                       {"operators", "clients_per_operator", "s_beta_mean", "mean_wait_hard",
                        "ci95_half_width"},
                       {}};
    std::map<std::string, report::Series> series;
    for (const auto& r : ts.rows) {
        rows.rows.push_back({cell(static_cast<long long>(r.operators)),
                             cell(static_cast<long long>(r.clients_per_operator)),
                             cell(r.s_beta_mean, 2), cell(r.wait_hard.mean),
                             cell(r.wait_hard.half_width)});
        const std::string key = "n/o=" + std::to_string(r.clients_per_operator) +
                                label(" s_beta=", r.s_beta_mean);
        series[key].label = key;
        series[key].points.emplace_back(r.operators, r.wait_hard.mean);
    }
    report::Table deltas{"fig6_deltas",
                         {"clients_per_operator", "s_beta_mean", "from_operators",
                          "to_operators", "wait_decrease"},
                         {}};
    json dj = json::array();
    for (const auto& d : ts.deltas) {
        deltas.rows.push_back({cell(static_cast<long long>(d.clients_per_operator)),
                               cell(d.s_beta_mean, 2), cell(static_cast<long long>(d.from_operators)),
                               cell(static_cast<long long>(d.from_operators + 1)), cell(d.delta)});
        dj.push_back({{"clients_per_operator", d.clients_per_operator},
                      {"s_beta_mean", d.s_beta_mean},
                      {"from_operators", d.from_operators},
                      {"delta", d.delta}});
    }
    out.tables.push_back(std::move(rows));
    out.tables.push_back(std::move(deltas));
    out.summary = {{"deltas", dj}};
    if (o.charts) {
        std::vector<report::Series> ss;
        for (auto& [k, s] : series) ss.push_back(s);
        out.charts.push_back({"fig6", report::line_chart("Wait by team size", "operators (k)",
                                                         "hard-question wait (min)", ss)});
    }
    return out;
}

report::Output learning(const PresetOptions& o) {
    SystemConfig cfg = session_base(1);
    cfg.mode = Mode::hybrid_learning;
    cfg.n_clients = 10;
    cfg.horizon = 40 * kSessionMinutes;
    cfg.learning = LearningConfig{.catalog_size = 200,
                                  .popularity = Popularity::zipf,
                                  .zipf_exponent = 1.0,
                                  .initial_db_size = 0,
                                  .session_length = kSessionMinutes};
    const int reps = std::max(o.reps, 200);

    std::vector<std::vector<double>> per_session;
    for (int i = 0; i < reps; ++i) {
        const auto r = run_learning(cfg, replication_seed(o.seed, i));
        per_session.resize(r.share_series.size());
        for (std::size_t s = 0; s < r.share_series.size(); ++s)
            per_session[s].push_back(r.share_series[s]);
    }

    report::Output out;
    out.preset = "learning";
    out.parameters = {{"config", io::to_json(cfg)}, {"reps", reps}, {"seed", o.seed}};
    report::Table t{"learning_agent_share", {"session", "mean_agent_share", "ci95_half_width", "n"},
                    {}};
    json means = json::array();
    report::Series s{"agent share", {}};
    int first_half = 0;
    for (std::size_t k = 0; k < per_session.size(); ++k) {
        const Estimate e = estimate(per_session[k]);
        t.rows.push_back({cell(static_cast<long long>(k + 1)), cell(e.mean), cell(e.half_width),
                          cell(static_cast<long long>(e.n))});
        means.push_back(io::number_or_null(e.mean));
        s.points.emplace_back(static_cast<double>(k + 1), e.mean);
        if (first_half == 0 && e.mean > 0.5) first_half = static_cast<int>(k + 1);
    }
    out.tables.push_back(std::move(t));
    out.summary = {{"sessions", per_session.size()},
                   {"mean_share", means},
                   {"first_session_above_half", first_half}};
    if (o.charts)
        out.charts.push_back({"learning", report::line_chart("Agent share per session", "session",
                                                             "answered by agent", {s})});
    return out;
}

}  // namespace

SystemConfig session_base(int episodes) {
    SystemConfig c;
    c.mode = Mode::hybrid;
    c.client_model = ClientModel::closed;
    c.n_clients = 1;
    c.n_operators = 1;
    c.lambda_bar = 0.1;
    c.alpha = 0.5;
    c.s_alpha_human = normal(1.0, 0.2);
    c.s_alpha_agent = normal(1.0, 0.2);
    c.s_beta = normal(5.0, 1.0);
    c.epsilon = normal(0.5, 0.1);
    c.horizon = kSessionMinutes;
    c.warmup = 0.0;
    c.episodes = episodes;
    return c;
}

const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {"fig4a", "fig4b", "fig4c", "fig5", "fig6",
                                               "learning"};
    return n;
}

report::Output run(const std::string& name, const PresetOptions& options) {
    if (options.reps < 2) throw ValidationError("reps must be >= 2");
    if (options.episodes < 1) throw ValidationError("episodes must be >= 1");
    if (name == "fig4a") return fig4a(options);
    if (name == "fig4b") return fig4b(options);
    if (name == "fig4c") return fig4c(options);
    if (name == "fig5") return fig5(options);
    if (name == "fig6") return fig6(options);
    if (name == "learning") return learning(options);
    throw ValidationError("unknown preset \"" + name + "\"");
}

report::Output run_spec(const experiments::SweepSpec& spec, bool charts) {
    const auto points = experiments::run_sweep(spec);
    report::Output out;
    out.preset = "spec";
    out.parameters = io::to_json(spec);
    report::Table t{"sweep",
                    {"n_clients", "n_operators", "alpha", "s_beta_mean", "c_ratio",
                     "mean_wait_overall", "ci95_overall", "mean_wait_hard", "ci95_hard",
                     "operator_utilization", "agent_share", "unstable"},
                    {}};
    json rows = json::array();
    for (const auto& p : points) {
        const auto& m = p.metrics;
        t.rows.push_back({cell(static_cast<long long>(p.n_clients)),
                          cell(static_cast<long long>(p.n_operators)), cell(p.alpha, 4),
                          cell(p.s_beta_mean, 4), cell(p.c_ratio, 4), cell(m.mean_wait_overall.mean),
                          cell(m.mean_wait_overall.half_width), cell(m.mean_wait_hard.mean),
                          cell(m.mean_wait_hard.half_width), cell(m.operator_utilization.mean),
                          cell(m.agent_share.mean), p.unstable ? "1" : "0"});
        rows.push_back({{"n_clients", p.n_clients},
                        {"mean_wait_hard", io::number_or_null(m.mean_wait_hard.mean)},
                        {"unstable", p.unstable}});
    }
    out.tables.push_back(std::move(t));
    out.summary = {{"points", rows}, {"sla", spec.sla}};
    if (charts) {
        report::Series s{"mean_wait_hard", {}};
        for (const auto& p : points) s.points.emplace_back(s.points.size(), p.metrics.mean_wait_hard.mean);
        out.charts.push_back({"sweep", report::line_chart("Sweep", "grid point",
                                                          "hard-question wait (min)", {s})});
    }
    return out;
}

}  // namespace hybridq::presets

#include "hybridq/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "hybridq/errors.hpp"

namespace hybridq::io {

namespace {

// Field access on one JSON object; finish() rejects keys nobody asked for.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) fail("expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <class T>
    T get(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail("missing required key \"" + key + "\"");
        return as<T>(key);
    }

    template <class T>
    T get_or(const std::string& key, T fallback) {
        seen_.insert(key);
        return j_.contains(key) ? as<T>(key) : fallback;
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) fail("missing required key \"" + key + "\"");
        return j_.at(key);
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.count(key)) fail("unknown key \"" + key + "\"");
        }
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(where_ + ": " + what);
    }

private:
    template <class T>
    T as(const std::string& key) {
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) fail("\"" + key + "\" must be a number");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) fail("\"" + key + "\" must be an integer");
            if constexpr (std::is_unsigned_v<T>) {
                if (v.is_number_integer() && !v.is_number_unsigned())
                    fail("\"" + key + "\" must be non-negative");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) fail("\"" + key + "\" must be a string");
        }
        return v.get<T>();
    }

    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

template <class T>
std::vector<T> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ValidationError(where + ": expected an array");
    std::vector<T> out;
    for (const json& x : v) {
        if (std::is_integral_v<T> ? !x.is_number_integer() : !x.is_number()) {
            throw ValidationError(where + ": array entries have the wrong type");
        }
        out.push_back(x.get<T>());
    }
    return out;
}

Mode mode_from(const std::string& s, const ObjectReader& r) {
    if (s == "pure-human") return Mode::pure_human;
    if (s == "hybrid") return Mode::hybrid;
    if (s == "hybrid-learning") return Mode::hybrid_learning;
    r.fail("unknown mode \"" + s + "\"");
}

}  // namespace

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

Distribution distribution_from_json(const json& j) {
    ObjectReader r(j, "distribution");
    const auto kind = r.get<std::string>("kind");
    Distribution d;
    if (kind == "deterministic") {
        d = Distribution::deterministic(r.get<double>("mean"));
    } else if (kind == "exponential") {
        d = Distribution::exponential(r.get<double>("mean"));
    } else if (kind == "normal") {
        d = Distribution::truncated_normal(r.get<double>("mean"), r.get<double>("stddev"));
    } else if (kind == "empirical") {
        d = Distribution::empirical(number_list<double>(r.raw("samples"), "samples"));
    } else {
        r.fail("unknown kind \"" + kind + "\"");
    }
    r.finish();
    return d;
}

json to_json(const Distribution& d) {
    json j;
    j["kind"] = to_string(d.kind());
    switch (d.kind()) {
        case Distribution::Kind::deterministic:
        case Distribution::Kind::exponential: j["mean"] = d.mean(); break;
        case Distribution::Kind::truncated_normal:
            j["mean"] = d.mean();
            j["stddev"] = d.stddev();
            break;
        case Distribution::Kind::empirical:
            j["samples"] = std::vector<double>(d.samples().begin(), d.samples().end());
            break;
    }
    return j;
}

SystemConfig system_config_from_json(const json& j) {
    ObjectReader r(j, "config");
    SystemConfig c;
    c.mode = mode_from(r.get<std::string>("mode"), r);
    const auto model = r.get_or<std::string>("client_model", "open");
    if (model == "open") c.client_model = ClientModel::open;
    else if (model == "closed") c.client_model = ClientModel::closed;
    else r.fail("unknown client_model \"" + model + "\"");

    c.n_clients = r.get<int>("n_clients");
    c.n_operators = r.get_or<int>("n_operators", 1);
    c.lambda_bar = r.get<double>("lambda_bar");
    c.alpha = r.get_or<double>("alpha", 0.0);
    c.s_beta = distribution_from_json(r.raw("s_beta"));
    if (r.has("s_alpha_human")) {
        c.s_alpha_human = distribution_from_json(r.raw("s_alpha_human"));
    } else if (c.alpha > 0.0 || c.mode == Mode::hybrid_learning) {
        r.fail("missing required key \"s_alpha_human\"");
    }
    c.s_alpha_agent = r.has("s_alpha_agent") ? distribution_from_json(r.raw("s_alpha_agent"))
                                             : c.s_alpha_human;
    if (r.has("epsilon")) c.epsilon = distribution_from_json(r.raw("epsilon"));
    c.horizon = r.get<double>("horizon");
    c.warmup = r.get_or<double>("warmup", 0.1 * c.horizon);
    c.episodes = r.get_or<int>("episodes", 1);
    c.seed = r.get_or<std::uint64_t>("seed", 0);
    c.max_queue = r.get_or<std::uint64_t>("max_queue", 1'000'000);

    if (r.has("learning")) {
        ObjectReader lr(r.raw("learning"), "learning");
        LearningConfig l;
        l.catalog_size = lr.get<int>("catalog_size");
        const auto pop = lr.get_or<std::string>("popularity", "uniform");
        if (pop == "uniform") l.popularity = Popularity::uniform;
        else if (pop == "zipf") l.popularity = Popularity::zipf;
        else lr.fail("unknown popularity \"" + pop + "\"");
        l.zipf_exponent = lr.get_or<double>("zipf_exponent", 1.0);
        l.initial_db_size = lr.get_or<int>("initial_db_size", 0);
        l.session_length = lr.get_or<double>("session_length", 60.0);
        lr.finish();
        c.learning = l;
    }
    r.finish();
    c.validate();
    return c;
}

json to_json(const SystemConfig& c) {
    json j;
    j["mode"] = to_string(c.mode);
    j["client_model"] = to_string(c.client_model);
    j["n_clients"] = c.n_clients;
    j["n_operators"] = c.n_operators;
    j["lambda_bar"] = c.lambda_bar;
    j["alpha"] = c.alpha;
    j["s_alpha_human"] = to_json(c.s_alpha_human);
    j["s_alpha_agent"] = to_json(c.s_alpha_agent);
    j["s_beta"] = to_json(c.s_beta);
    j["epsilon"] = to_json(c.epsilon);
    j["horizon"] = c.horizon;
    j["warmup"] = c.warmup;
    j["episodes"] = c.episodes;
    j["seed"] = c.seed;
    j["max_queue"] = c.max_queue;
    if (c.learning) {
        const LearningConfig& l = *c.learning;
        j["learning"] = {{"catalog_size", l.catalog_size},
                         {"popularity", to_string(l.popularity)},
                         {"zipf_exponent", l.zipf_exponent},
                         {"initial_db_size", l.initial_db_size},
                         {"session_length", l.session_length}};
    }
    return j;
}

experiments::SweepSpec sweep_spec_from_json(const json& j) {
    ObjectReader r(j, "sweep");
    experiments::SweepSpec s;
    s.base = system_config_from_json(r.raw("base"));
    if (r.has("grid")) {
        ObjectReader g(r.raw("grid"), "grid");
        if (g.has("n_clients")) s.n_clients = number_list<int>(g.raw("n_clients"), "n_clients");
        if (g.has("alpha")) s.alpha = number_list<double>(g.raw("alpha"), "alpha");
        if (g.has("s_beta_mean"))
            s.s_beta_mean = number_list<double>(g.raw("s_beta_mean"), "s_beta_mean");
        if (g.has("n_operators"))
            s.n_operators = number_list<int>(g.raw("n_operators"), "n_operators");
        if (g.has("c_ratio")) s.c_ratio = number_list<double>(g.raw("c_ratio"), "c_ratio");
        g.finish();
    }
    s.reps = r.get_or<int>("reps", 20);
    s.sla = r.get_or<double>("sla", 5.0);
    s.seed = r.get_or<std::uint64_t>("seed", s.base.seed);
    r.finish();
    s.validate();
    return s;
}

json to_json(const experiments::SweepSpec& s) {
    json grid = json::object();
    if (!s.n_clients.empty()) grid["n_clients"] = s.n_clients;
    if (!s.alpha.empty()) grid["alpha"] = s.alpha;
    if (!s.s_beta_mean.empty()) grid["s_beta_mean"] = s.s_beta_mean;
    if (!s.n_operators.empty()) grid["n_operators"] = s.n_operators;
    if (!s.c_ratio.empty()) grid["c_ratio"] = s.c_ratio;
    return {{"base", to_json(s.base)}, {"grid", grid}, {"reps", s.reps}, {"sla", s.sla},
            {"seed", s.seed}};
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
}

json load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

json to_json(const SimulationMetrics& m) {
    return {{"mean_wait_overall", number_or_null(m.mean_wait_overall)},
            {"mean_wait_hard", number_or_null(m.mean_wait_hard)},
            {"mean_response_alpha", number_or_null(m.mean_response_alpha)},
            {"operator_utilization", number_or_null(m.operator_utilization)},
            {"questions_total", m.questions_total},
            {"answered_by_agent", m.answered_by_agent},
            {"answered_by_human", m.answered_by_human},
            {"still_in_system", m.still_in_system},
            {"agent_share", number_or_null(m.agent_share)}};
}

json to_json(const Estimate& e) {
    return {{"mean", number_or_null(e.mean)},
            {"ci95_half_width", number_or_null(e.half_width)},
            {"n", e.n}};
}

json to_json(const ReplicatedMetrics& m) {
    json reps = json::array();
    for (const auto& r : m.replications) reps.push_back(to_json(r));
    return {{"mean_wait_overall", to_json(m.mean_wait_overall)},
            {"mean_wait_hard", to_json(m.mean_wait_hard)},
            {"mean_response_alpha", to_json(m.mean_response_alpha)},
            {"operator_utilization", to_json(m.operator_utilization)},
            {"agent_share", to_json(m.agent_share)},
            {"questions_total", m.questions_total},
            {"answered_by_agent", m.answered_by_agent},
            {"answered_by_human", m.answered_by_human},
            {"n_reps", m.n_reps},
            {"unstable", m.unstable},
            {"seeds", m.seeds},
            {"replications", reps}};
}

json to_json(const analytic::AnalyticReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? number_or_null(*v) : json(nullptr); };
    return {{"s", r.s_mix},
            {"tau", r.tau},
            {"rho", r.rho},
            {"rho_hat", r.rho_hat},
            {"w_pure", opt(r.w_pure)},
            {"w_hybrid", opt(r.w_hybrid)},
            {"w_hybrid_hard", opt(r.w_hybrid_hard)},
            {"c_star", opt(r.c_star)},
            {"stable_pure", r.stable_pure},
            {"stable_hybrid", r.stable_hybrid},
            {"warnings", r.warnings}};
}

std::string config_hash(const json& j) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : j.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace hybridq::io

#include "hybridq/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>

#include "hybridq/errors.hpp"

namespace hybridq {

const char* to_string(Mode m) {
    switch (m) {
        case Mode::pure_human: return "pure-human";
        case Mode::hybrid: return "hybrid";
        case Mode::hybrid_learning: return "hybrid-learning";
    }
    return "?";
}

const char* to_string(ClientModel m) { return m == ClientModel::open ? "open" : "closed"; }

const char* to_string(Popularity p) { return p == Popularity::uniform ? "uniform" : "zipf"; }

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

void LearningConfig::validate() const {
    require(catalog_size >= 1, "learning.catalog_size must be >= 1");
    require(initial_db_size >= 0 && initial_db_size <= catalog_size,
            "learning.initial_db_size must lie in [0, catalog_size]");
    require(std::isfinite(zipf_exponent) && zipf_exponent >= 0.0,
            "learning.zipf_exponent must be >= 0");
    require(std::isfinite(session_length) && session_length > 0.0,
            "learning.session_length must be > 0");
}

void SystemConfig::validate() const {
    require(n_clients >= 1, "n_clients must be >= 1");
    require(n_operators >= 1, "n_operators must be >= 1");
    require(std::isfinite(lambda_bar) && lambda_bar >= 0.0, "lambda_bar must be >= 0");
    require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
    require(std::isfinite(horizon) && std::isfinite(warmup), "horizon and warmup must be finite");
    require(warmup >= 0.0 && horizon > warmup, "need horizon > warmup >= 0");
    require(episodes >= 1, "episodes must be >= 1");
    require(max_queue >= 1, "max_queue must be >= 1");
    if (mode == Mode::hybrid_learning) {
        require(learning.has_value(), "hybrid-learning mode needs a learning section");
    }
    if (learning) learning->validate();
}

// --- engine -----------------------------------------------------------------

namespace {

enum class EventKind : std::uint8_t { arrival, ready, agent_done, service_done };

struct Event {
    double time;
    std::uint64_t seq;
    EventKind kind;
    std::uint32_t index;  // client for arrivals, question otherwise
};

struct Later {
    bool operator()(const Event& a, const Event& b) const {
        return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
};

struct Question {
    QuestionRecord rec;
    double human_time = 0.0;
    int catalog_type = -1;
    int op = -1;
    bool ready = false;
    bool counted = false;  // arrived after warmup
    bool done = false;
};

class Engine {
public:
    Engine(const SystemConfig& cfg, std::uint64_t seed, RunOptions opts)
        : cfg_(cfg), rng_(seed), opts_(opts) {
        if (cfg_.mode == Mode::hybrid_learning) {
            const LearningConfig& lc = *cfg_.learning;
            catalog_ = lc.popularity == Popularity::uniform
                           ? CatalogSampler::uniform(lc.catalog_size)
                           : CatalogSampler::zipf(lc.catalog_size, lc.zipf_exponent);
            const auto buckets =
                static_cast<std::size_t>(std::ceil(cfg_.horizon / lc.session_length));
            bucket_arrivals_.assign(buckets, 0);
            bucket_agent_.assign(buckets, 0);
        }
    }

    RunResult run() {
        for (int e = 0; e < cfg_.episodes; ++e) run_episode(e);

        RunResult out;
        SimulationMetrics& m = out.metrics;
        m.questions_total = total_;
        m.answered_by_agent = by_agent_;
        m.answered_by_human = by_human_;
        m.still_in_system = in_system_;
        m.mean_wait_overall = n_overall_ ? sum_wait_overall_ / n_overall_ : kNaN;
        m.mean_wait_hard = n_hard_ ? sum_wait_hard_ / n_hard_ : kNaN;
        m.mean_response_alpha = n_alpha_ ? sum_response_alpha_ / n_alpha_ : kNaN;
        m.agent_share = total_ ? static_cast<double>(by_agent_) / total_ : kNaN;
        m.operator_utilization =
            busy_time_ / (cfg_.n_operators * (cfg_.horizon - cfg_.warmup) * cfg_.episodes);

        for (std::size_t b = 0; b < bucket_arrivals_.size(); ++b) {
            out.share_series.push_back(bucket_arrivals_[b]
                                           ? static_cast<double>(bucket_agent_[b]) /
                                                 bucket_arrivals_[b]
                                           : kNaN);
        }
        std::sort(trace_.begin(), trace_.end(),
                  [](const QuestionRecord& a, const QuestionRecord& b) {
                      return a.question_id < b.question_id;
                  });
        out.trace = std::move(trace_);
        return out;
    }

private:
    void run_episode(int episode) {
        offset_ = episode * cfg_.horizon;
        end_ = offset_ + cfg_.horizon;
        warm_end_ = offset_ + cfg_.warmup;
        events_ = {};
        queue_.clear();
        questions_.clear();
        busy_with_.assign(static_cast<std::size_t>(cfg_.n_operators), -1);
        busy_since_.assign(static_cast<std::size_t>(cfg_.n_operators), 0.0);
        if (cfg_.learning) {
            known_.assign(static_cast<std::size_t>(cfg_.learning->catalog_size), false);
            // Catalog ids are ranked by popularity, so the initial DB holds the head.
            for (int i = 0; i < cfg_.learning->initial_db_size; ++i) known_[i] = true;
        }

        RngStream& arrivals = rng_[StreamId::arrivals];
        for (int c = 0; c < cfg_.n_clients; ++c) {
            if (cfg_.client_model == ClientModel::open) {
                for (double t : poisson_process(cfg_.lambda_bar, cfg_.horizon, arrivals)) {
                    push(offset_ + t, EventKind::arrival, static_cast<std::uint32_t>(c));
                }
            } else {
                schedule_next_question(offset_, c);
            }
        }

        while (!events_.empty()) {
            const Event ev = events_.top();
            if (ev.time >= end_) break;
            events_.pop();
            switch (ev.kind) {
                case EventKind::arrival: on_arrival(ev.time, static_cast<int>(ev.index)); break;
                case EventKind::ready:
                    questions_[ev.index].ready = true;
                    dispatch(ev.time);
                    break;
                case EventKind::agent_done: on_agent_done(ev.index); break;
                case EventKind::service_done: on_service_done(ev.time, ev.index); break;
            }
        }

        for (std::size_t op = 0; op < busy_with_.size(); ++op) {
            if (busy_with_[op] >= 0) add_busy(busy_since_[op], end_);
        }
        for (const Question& q : questions_) {
            if (q.counted && !q.done) ++in_system_;
        }
    }

    void push(double t, EventKind kind, std::uint32_t index) {
        events_.push(Event{t, seq_++, kind, index});
    }

    void schedule_next_question(double now, int client) {
        if (cfg_.lambda_bar <= 0.0) return;
        const double t = now + rng_[StreamId::arrivals].exponential(1.0 / cfg_.lambda_bar);
        if (t < end_) push(t, EventKind::arrival, static_cast<std::uint32_t>(client));
    }

    void on_arrival(double t, int client) {
        const auto idx = static_cast<std::uint32_t>(questions_.size());
        Question& q = questions_.emplace_back();
        q.rec.question_id = next_id_++;
        q.rec.client_id = client;
        q.rec.arrival = t;
        q.counted = t >= warm_end_;
        if (q.counted) ++total_;

        if (cfg_.mode == Mode::hybrid_learning) {
            q.catalog_type = catalog_.sample(rng_[StreamId::learning_catalog]);
            q.rec.type = known_[static_cast<std::size_t>(q.catalog_type)] ? QuestionType::alpha
                                                                          : QuestionType::beta;
            // Share buckets record routing at arrival, so questions still in
            // service when the horizon closes do not bias the last session.
            const auto b = static_cast<std::size_t>((t - offset_) / cfg_.learning->session_length);
            if (b < bucket_arrivals_.size()) {
                ++bucket_arrivals_[b];
                if (q.rec.type == QuestionType::alpha) ++bucket_agent_[b];
            }
        } else {
            q.rec.type = bernoulli_type(cfg_.alpha, rng_[StreamId::question_type]);
        }

        // Drawn for every question, so paired pure/hybrid runs see the same
        // human workload per question.
        const Distribution& human =
            q.rec.type == QuestionType::alpha ? cfg_.s_alpha_human : cfg_.s_beta;
        q.human_time = human.sample(rng_[StreamId::human_service]);

        if (cfg_.mode == Mode::pure_human) {
            q.ready = true;
            enqueue(t, idx);
        } else if (q.rec.type == QuestionType::alpha) {
            const double d = cfg_.s_alpha_agent.sample(rng_[StreamId::agent_service]);
            q.rec.answered_by = Answerer::agent;
            q.rec.service_start = t;
            q.rec.service_end = t + d;
            q.rec.wait = 0.0;
            push(t + d, EventKind::agent_done, idx);
        } else {
            // Queued at arrival; the agent's attempt overlaps the wait.
            const double eps = cfg_.epsilon.sample(rng_[StreamId::classification]);
            q.rec.classification_end = t + eps;
            push(t + eps, EventKind::ready, idx);
            enqueue(t, idx);
        }
    }

    void enqueue(double t, std::uint32_t idx) {
        queue_.push_back(idx);
        if (queue_.size() > cfg_.max_queue) {
            std::ostringstream msg;
            msg << "overload: operator queue exceeded " << cfg_.max_queue << " questions";
            throw OverloadError(msg.str());
        }
        dispatch(t);
    }

    // Head-of-line FIFO: the oldest question goes first, and only once the
    // agent has given up on it; the lowest-index idle operator takes it.
    void dispatch(double t) {
        while (!queue_.empty()) {
            Question& head = questions_[queue_.front()];
            if (!head.ready) return;
            const auto it = std::find(busy_with_.begin(), busy_with_.end(), -1);
            if (it == busy_with_.end()) return;
            const auto op = static_cast<std::size_t>(it - busy_with_.begin());
            const std::uint32_t idx = queue_.front();
            queue_.pop_front();
            *it = static_cast<int>(idx);
            busy_since_[op] = t;
            head.op = static_cast<int>(op);
            head.rec.service_start = t;
            head.rec.wait = t - head.rec.arrival;
            push(t + head.human_time, EventKind::service_done, idx);
        }
    }

    void on_agent_done(std::uint32_t idx) {
        complete(idx);
        schedule_client(idx);
    }

    void on_service_done(double t, std::uint32_t idx) {
        Question& q = questions_[idx];
        q.rec.service_end = t;
        q.rec.answered_by = Answerer::human;
        const auto op = static_cast<std::size_t>(q.op);
        busy_with_[op] = -1;
        add_busy(busy_since_[op], t);
        if (q.catalog_type >= 0) known_[static_cast<std::size_t>(q.catalog_type)] = true;
        complete(idx);
        schedule_client(idx);
        dispatch(t);
    }

    void schedule_client(std::uint32_t idx) {
        if (cfg_.client_model == ClientModel::closed) {
            const Question& q = questions_[idx];
            schedule_next_question(q.rec.service_end, q.rec.client_id);
        }
    }

    void complete(std::uint32_t idx) {
        Question& q = questions_[idx];
        q.done = true;
        if (q.counted) {
            if (q.rec.answered_by == Answerer::agent) ++by_agent_;
            else ++by_human_;
            sum_wait_overall_ += q.rec.wait;
            ++n_overall_;
            if (q.rec.type == QuestionType::beta) {
                sum_wait_hard_ += q.rec.wait;
                ++n_hard_;
            } else {
                sum_response_alpha_ += q.rec.service_end - q.rec.arrival;
                ++n_alpha_;
            }
        }
        if (opts_.keep_trace) trace_.push_back(q.rec);
    }

    void add_busy(double from, double to) {
        const double lo = std::max(from, warm_end_);
        if (to > lo) busy_time_ += to - lo;
    }

    const SystemConfig& cfg_;
    RngStreams rng_;
    RunOptions opts_;
    CatalogSampler catalog_;

    double offset_ = 0.0, end_ = 0.0, warm_end_ = 0.0;
    std::priority_queue<Event, std::vector<Event>, Later> events_;
    std::uint64_t seq_ = 0;
    std::uint64_t next_id_ = 0;
    std::vector<Question> questions_;
    std::deque<std::uint32_t> queue_;
    std::vector<int> busy_with_;
    std::vector<double> busy_since_;
    std::vector<bool> known_;

    std::uint64_t total_ = 0, by_agent_ = 0, by_human_ = 0, in_system_ = 0;
    double sum_wait_overall_ = 0.0, sum_wait_hard_ = 0.0, sum_response_alpha_ = 0.0;
    std::uint64_t n_overall_ = 0, n_hard_ = 0, n_alpha_ = 0;
    double busy_time_ = 0.0;
    std::vector<std::uint64_t> bucket_arrivals_, bucket_agent_;
    std::vector<QuestionRecord> trace_;
};

}  // namespace

RunResult run(const SystemConfig& config, std::uint64_t seed, RunOptions options) {
    config.validate();
    return Engine(config, seed, options).run();
}

RunResult run_learning(const SystemConfig& config, std::uint64_t seed) {
    if (config.mode != Mode::hybrid_learning) {
        throw ValidationError("run_learning needs mode hybrid-learning");
    }
    return run(config, seed, RunOptions{.keep_trace = false});
}

// --- trace export -----------------------------------------------------------

void write_trace_csv(std::ostream& os, std::span<const QuestionRecord> trace) {
    os << "question_id,client_id,arrival,type,classification_end,service_start,service_end,"
          "answered_by,wait\n";
    char buf[64];
    auto fixed = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return buf;
    };
    for (const QuestionRecord& r : trace) {
        os << r.question_id << ',' << r.client_id << ',' << fixed(r.arrival) << ','
           << (r.type == QuestionType::alpha ? "alpha" : "beta") << ',';
        if (r.classification_end) os << fixed(*r.classification_end);
        os << ',' << fixed(r.service_start) << ',' << fixed(r.service_end) << ','
           << (r.answered_by == Answerer::agent ? "agent" : "human") << ',' << fixed(r.wait)
           << '\n';
    }
}

}  // namespace hybridq

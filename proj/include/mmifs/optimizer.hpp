#ifndef MMIFS_OPTIMIZER_HPP
#define MMIFS_OPTIMIZER_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mmifs/archive.hpp"
#include "mmifs/dataset.hpp"
#include "mmifs/error.hpp"
#include "mmifs/evaluator.hpp"
#include "mmifs/objectives.hpp"
#include "mmifs/probability_model.hpp"
#include "mmifs/rng.hpp"
#include "mmifs/subset.hpp"

namespace mmifs {

struct OptimizerConfig {
    long max_evaluations = 5000;
    long max_iterations = 0;  // 0: same as max_evaluations
    int archive_capacity = 100;
    int grid_depth = 4;
    double alpha = 0.1;
    double beta = 0.3;
    double sv_min = 0.2;
    double sv_max = 5.0;
    double im_min = 0.2;
    double im_max = 5.0;
    int knn_k = 5;
    int cv_folds = 0;
    double train_fraction = 0.75;
    bool normalize = true;
    bool stratify = true;
    double mutation_rate = -1.0;  // negative: defaults to 1/n (blind mode only)
    std::string initial_subset_policy = "uniform";
    std::uint64_t seed = 0;
    bool record_history = true;

    long iteration_budget() const {
        return max_iterations > 0 ? max_iterations : max_evaluations;
    }

    ModelParams model_params() const { return {alpha, beta, sv_min, sv_max, im_min, im_max}; }

    void validate() const {
        if (max_evaluations < 2) { throw config_error("max_evaluations must be >= 2"); }
        if (max_iterations < 0) { throw config_error("max_iterations must be >= 0"); }
        if (archive_capacity < 1) { throw config_error("archive_capacity must be >= 1"); }
        if (grid_depth < 1 || grid_depth > 10) {
            throw config_error("grid_depth must be in [1, 10]");
        }
        if (!(alpha > 0.0 && alpha < 1.0)) { throw config_error("alpha must be in (0, 1)"); }
        if (!(beta > alpha)) { throw config_error("beta must exceed alpha"); }
        if (!(sv_min > 0.0 && sv_min < sv_max)) { throw config_error("invalid sv clamp bounds"); }
        if (!(im_min > 0.0 && im_min < im_max)) { throw config_error("invalid im clamp bounds"); }
        if (knn_k < 1) { throw config_error("knn_k must be >= 1"); }
        if (cv_folds < 0 || cv_folds == 1) { throw config_error("cv_folds must be 0 or >= 2"); }
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
            throw config_error("train_fraction must be in (0, 1)");
        }
        if (mutation_rate > 1.0) {
            throw config_error("mutation_rate must be in [0, 1] (negative selects the default)");
        }
        if (initial_subset_policy != "uniform") {
            throw config_error("unknown initial_subset_policy: " + initial_subset_policy);
        }
    }
};

enum class Branch {
    parent_dominates,       // offspring rejected by the parent
    archive_dominates,      // offspring rejected by an archive member
    offspring_dominates,    // offspring evicted dominated members, replaces parent
    incomparable_accepted,  // crowding favored the offspring
    incomparable_rejected,  // crowding kept the parent
};

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::parent_dominates: return "parent_dominates";
        case Branch::archive_dominates: return "archive_dominates";
        case Branch::offspring_dominates: return "offspring_dominates";
        case Branch::incomparable_accepted: return "incomparable_accepted";
        case Branch::incomparable_rejected: return "incomparable_rejected";
    }
    return "?";
}

struct IterationLog {
    long iter = 0;
    std::string branch;
    double parent_err = 0.0;  // parent state before the step
    int parent_k = 0;
    double off_err = 0.0;
    int off_k = 0;
    int r = 0;  // winner feature count after the step
};

struct StepResult {
    Branch branch = Branch::parent_dominates;
    bool parent_replaced = false;
    FeatureSubset winner;
    FeatureSubset loser;
    Objectives offspring_obj;
    bool cache_miss = false;
};

using EvalFn = std::function<EvalResult(const FeatureSubset&)>;

struct OptimizerState {
    OptimizerConfig config;
    int n_features = 0;
    ArchiveEntry parent;
    Archive archive;
    ProbabilityModel model;
    int r = 1;  // feature count of the most recent winner
    long eval_count = 0;
    long eval_requests = 0;
    long iterations = 0;
    Rng rng;
    std::vector<IterationLog> history;

    OptimizerState(const OptimizerConfig& cfg, int n) :
        config(cfg), n_features(n), archive(cfg.archive_capacity, cfg.grid_depth),
        model(ProbabilityModel::uniform(n)), rng(cfg.seed) {}
};

// Random parent: size uniform in [1, n], features uniform without
// replacement. The parent seeds the archive and r.
inline OptimizerState init_run(const OptimizerConfig& config, int n_features,
                               const EvalFn& evaluate) {
    config.validate();
    if (n_features < 1) { throw error("init_run: need at least one feature"); }
    OptimizerState state(config, n_features);

    const int size = state.rng.uniform_int(1, n_features);
    std::vector<int> order(static_cast<std::size_t>(n_features));
    for (int i = 0; i < n_features; ++i) { order[static_cast<std::size_t>(i)] = i; }
    state.rng.shuffle(order);
    FeatureSubset mask(n_features);
    for (int i = 0; i < size; ++i) { mask.set(order[static_cast<std::size_t>(i)], true); }

    const EvalResult res = evaluate(mask);
    ++state.eval_requests;
    if (res.cache_miss) { ++state.eval_count; }
    state.parent = {mask, res.obj};
    state.archive.try_add(state.parent, state.rng);
    state.r = mask.count();
    return state;
}

// One iteration against a pre-generated offspring. Branches:
//   1   parent dominates offspring             -> reject
//   2a  an archive member dominates offspring  -> reject
//   2b  offspring dominates archive members    -> evict them, offspring becomes parent
//   2c  mutually incomparable                  -> archive per capacity/diversity,
//       parent swaps only if the offspring sits in a less crowded cell
// The accepted or dominant individual is the winner; the loser in acceptance
// branches is the pre-replacement parent. With `learn`, the model updates
// once per step from that pair; r tracks the winner's feature count.
inline StepResult apply_offspring(OptimizerState& state, const FeatureSubset& offspring,
                                  const EvalFn& evaluate, bool learn) {
    const ArchiveEntry old_parent = state.parent;

    const EvalResult res = evaluate(offspring);
    ++state.eval_requests;
    if (res.cache_miss) { ++state.eval_count; }
    const ArchiveEntry cand{offspring, res.obj};

    StepResult out;
    out.offspring_obj = res.obj;
    out.cache_miss = res.cache_miss;

    if (dominates(state.parent.objectives, cand.objectives)) {
        out.branch = Branch::parent_dominates;
    } else {
        const AddResult added = state.archive.try_add(cand, state.rng);
        if (added.outcome == AddOutcome::dominated_by_archive) {
            out.branch = Branch::archive_dominates;
        } else if (added.outcome == AddOutcome::added && added.dominated_removed > 0) {
            out.branch = Branch::offspring_dominates;
            out.parent_replaced = true;
        } else {
            const int off_crowding = state.archive.crowding(cand);
            const int parent_crowding = state.archive.crowding(state.parent);
            if (off_crowding < parent_crowding) {
                out.branch = Branch::incomparable_accepted;
                out.parent_replaced = true;
            } else {
                out.branch = Branch::incomparable_rejected;
            }
        }
    }

    if (out.parent_replaced) {
        state.parent = cand;
        out.winner = cand.subset;
        out.loser = old_parent.subset;
    } else {
        out.winner = old_parent.subset;
        out.loser = cand.subset;
    }

    if (learn) { state.model.update(out.winner, out.loser, state.config.model_params()); }
    state.r = out.winner.count();
    ++state.iterations;

    if (state.config.record_history) {
        state.history.push_back({state.iterations, to_string(out.branch),
                                 old_parent.objectives.error_pct, old_parent.objectives.n_selected,
                                 res.obj.error_pct, res.obj.n_selected, state.r});
    }
    return out;
}

inline StepResult step(OptimizerState& state, const EvalFn& evaluate) {
    const FeatureSubset offspring = generate_offspring(state.model, state.r, state.rng);
    return apply_offspring(state, offspring, evaluate, true);
}

struct RunRecord {
    std::string algorithm;
    std::string dataset_name;
    int n_features = 0;
    std::uint64_t seed = 0;
    OptimizerConfig config;
    long eval_count = 0;
    long eval_requests = 0;
    long iterations = 0;
    double wall_time_s = 0.0;
    std::vector<ArchiveEntry> front;
    std::vector<IterationLog> history;
    // final learned model, carried in memory only (model-based runs)
    std::optional<ProbabilityModel> model;
};

namespace detail {

inline std::vector<ArchiveEntry> sorted_front(const Archive& archive) {
    std::vector<ArchiveEntry> front = archive.entries();
    std::sort(front.begin(), front.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
        if (a.objectives.n_selected != b.objectives.n_selected) {
            return a.objectives.n_selected < b.objectives.n_selected;
        }
        if (a.objectives.error_pct != b.objectives.error_pct) {
            return a.objectives.error_pct < b.objectives.error_pct;
        }
        return a.subset.to_bitstring() < b.subset.to_bitstring();
    });
    return front;
}

inline RunRecord finish_record(std::string algorithm, const OptimizerConfig& config,
                               int n_features, const Archive& archive, long eval_count,
                               long eval_requests, long iterations,
                               std::vector<IterationLog> history,
                               std::chrono::steady_clock::time_point started) {
    RunRecord rec;
    rec.algorithm = std::move(algorithm);
    rec.n_features = n_features;
    rec.seed = config.seed;
    rec.config = config;
    rec.eval_count = eval_count;
    rec.eval_requests = eval_requests;
    rec.iterations = iterations;
    rec.front = sorted_front(archive);
    rec.history = std::move(history);
    rec.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

}  // namespace detail

// Main loop: offspring from the learned model, guided subset sizes, archive
// acceptance, winner/loser model update each iteration. Terminates when the
// evaluation budget is spent or the iteration budget runs out (repeat
// offspring served from cache consume no evaluations).
inline RunRecord run_mmifs(const OptimizerConfig& config, int n_features, const EvalFn& evaluate) {
    const auto started = std::chrono::steady_clock::now();
    OptimizerState state = init_run(config, n_features, evaluate);
    const long max_iter = config.iteration_budget();
    while (state.eval_count < config.max_evaluations && state.iterations < max_iter) {
        step(state, evaluate);
    }
    RunRecord rec = detail::finish_record("mmifs", config, n_features, state.archive,
                                          state.eval_count, state.eval_requests, state.iterations,
                                          std::move(state.history), started);
    rec.model = std::move(state.model);
    return rec;
}

// sv, im and the update parameters in one inspectable document
inline nlohmann::json model_state_json(const ProbabilityModel& model, const ModelParams& params) {
    nlohmann::json p{{"alpha", params.alpha},   {"beta", params.beta},
                     {"sv_min", params.sv_min}, {"sv_max", params.sv_max},
                     {"im_min", params.im_min}, {"im_max", params.im_max}};
    return nlohmann::json{{"schema_version", 1}, {"params", std::move(p)}, {"model", model}};
}

inline ProbabilityModel model_state_from_json(const nlohmann::json& j, ModelParams* params = nullptr) {
    if (j.value("schema_version", 0) != 1) {
        throw error("model state: unsupported schema_version");
    }
    if (params) {
        const auto& p = j.at("params");
        params->alpha = p.at("alpha").get<double>();
        params->beta = p.at("beta").get<double>();
        params->sv_min = p.at("sv_min").get<double>();
        params->sv_max = p.at("sv_max").get<double>();
        params->im_min = p.at("im_min").get<double>();
        params->im_max = p.at("im_max").get<double>();
    }
    return j.at("model").get<ProbabilityModel>();
}

// Same loop and archive logic with independent per-bit flips instead of the
// model, re-drawn while empty. No model update, no size guidance.
inline RunRecord run_blind_paes(const OptimizerConfig& config, int n_features,
                                const EvalFn& evaluate) {
    const auto started = std::chrono::steady_clock::now();
    OptimizerState state = init_run(config, n_features, evaluate);
    const double rate = config.mutation_rate >= 0.0 ? config.mutation_rate
                                                    : 1.0 / static_cast<double>(n_features);
    const long max_iter = config.iteration_budget();
    while (state.eval_count < config.max_evaluations && state.iterations < max_iter) {
        FeatureSubset offspring = state.parent.subset;
        for (int attempt = 0; attempt < 100; ++attempt) {
            offspring = state.parent.subset;
            for (int i = 0; i < n_features; ++i) {
                if (state.rng.uniform() < rate) { offspring.flip(i); }
            }
            if (offspring.any()) { break; }
        }
        if (!offspring.any()) {
            // rate 1.0 with a full parent flips deterministically to empty
            offspring.set(state.rng.uniform_int(0, n_features - 1), true);
        }
        apply_offspring(state, offspring, evaluate, false);
    }
    return detail::finish_record("blind_paes", config, n_features, state.archive, state.eval_count,
                                 state.eval_requests, state.iterations, std::move(state.history),
                                 started);
}

// Uniform non-empty masks straight into the archive; the weak baseline.
inline RunRecord run_random_search(const OptimizerConfig& config, int n_features,
                                   const EvalFn& evaluate) {
    config.validate();
    if (n_features < 1) { throw error("run_random_search: need at least one feature"); }
    const auto started = std::chrono::steady_clock::now();
    Archive archive(config.archive_capacity, config.grid_depth);
    Rng rng(config.seed);
    long eval_count = 0, eval_requests = 0, iterations = 0;
    std::vector<IterationLog> history;
    const long max_iter = config.iteration_budget();
    while (eval_count < config.max_evaluations && iterations < max_iter) {
        FeatureSubset mask(n_features);
        do {
            for (int i = 0; i < n_features; ++i) { mask.set(i, rng.uniform() < 0.5); }
        } while (!mask.any());

        const EvalResult res = evaluate(mask);
        ++eval_requests;
        if (res.cache_miss) { ++eval_count; }
        const AddResult added = archive.try_add({mask, res.obj}, rng);
        ++iterations;
        if (config.record_history) {
            history.push_back({iterations, to_string(added.outcome), res.obj.error_pct,
                               res.obj.n_selected, res.obj.error_pct, res.obj.n_selected,
                               mask.count()});
        }
    }
    return detail::finish_record("random", config, n_features, archive, eval_count, eval_requests,
                                 iterations, std::move(history), started);
}

inline RunRecord run_algorithm(const std::string& algorithm, const OptimizerConfig& config,
                               int n_features, const EvalFn& evaluate) {
    if (algorithm == "mmifs") { return run_mmifs(config, n_features, evaluate); }
    if (algorithm == "blind_paes") { return run_blind_paes(config, n_features, evaluate); }
    if (algorithm == "random") { return run_random_search(config, n_features, evaluate); }
    throw config_error("unknown algorithm: " + algorithm);
}

// ---- serialization ----

inline void to_json(nlohmann::json& j, const OptimizerConfig& c) {
    j = nlohmann::json{{"max_evaluations", c.max_evaluations},
                       {"max_iterations", c.max_iterations},
                       {"archive_capacity", c.archive_capacity},
                       {"grid_depth", c.grid_depth},
                       {"alpha", c.alpha},
                       {"beta", c.beta},
                       {"sv_min", c.sv_min},
                       {"sv_max", c.sv_max},
                       {"im_min", c.im_min},
                       {"im_max", c.im_max},
                       {"knn_k", c.knn_k},
                       {"cv_folds", c.cv_folds},
                       {"train_fraction", c.train_fraction},
                       {"normalize", c.normalize},
                       {"stratify", c.stratify},
                       {"mutation_rate", c.mutation_rate},
                       {"initial_subset_policy", c.initial_subset_policy},
                       {"seed", c.seed},
                       {"record_history", c.record_history}};
}

inline void from_json(const nlohmann::json& j, OptimizerConfig& c) {
    c = OptimizerConfig{};
    c.max_evaluations = j.value("max_evaluations", c.max_evaluations);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.archive_capacity = j.value("archive_capacity", c.archive_capacity);
    c.grid_depth = j.value("grid_depth", c.grid_depth);
    c.alpha = j.value("alpha", c.alpha);
    c.beta = j.value("beta", c.beta);
    c.sv_min = j.value("sv_min", c.sv_min);
    c.sv_max = j.value("sv_max", c.sv_max);
    c.im_min = j.value("im_min", c.im_min);
    c.im_max = j.value("im_max", c.im_max);
    c.knn_k = j.value("knn_k", c.knn_k);
    c.cv_folds = j.value("cv_folds", c.cv_folds);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.normalize = j.value("normalize", c.normalize);
    c.stratify = j.value("stratify", c.stratify);
    c.mutation_rate = j.value("mutation_rate", c.mutation_rate);
    c.initial_subset_policy = j.value("initial_subset_policy", c.initial_subset_policy);
    c.seed = j.value("seed", c.seed);
    c.record_history = j.value("record_history", c.record_history);
}

inline void to_json(nlohmann::json& j, const IterationLog& l) {
    j = nlohmann::json{{"iter", l.iter},         {"branch", l.branch}, {"parent_err", l.parent_err},
                       {"parent_k", l.parent_k}, {"off_err", l.off_err}, {"off_k", l.off_k},
                       {"r", l.r}};
}

inline void from_json(const nlohmann::json& j, IterationLog& l) {
    l.iter = j.at("iter").get<long>();
    l.branch = j.at("branch").get<std::string>();
    l.parent_err = j.at("parent_err").get<double>();
    l.parent_k = j.at("parent_k").get<int>();
    l.off_err = j.at("off_err").get<double>();
    l.off_k = j.at("off_k").get<int>();
    l.r = j.at("r").get<int>();
}

inline void to_json(nlohmann::json& j, const RunRecord& r) {
    nlohmann::json front = nlohmann::json::array();
    for (const ArchiveEntry& e : r.front) {
        front.push_back({{"mask", e.subset.to_bitstring()},
                         {"error_pct", e.objectives.error_pct},
                         {"n_selected", e.objectives.n_selected}});
    }
    j = nlohmann::json{{"schema_version", 1},
                       {"algorithm", r.algorithm},
                       {"dataset_name", r.dataset_name},
                       {"n_features", r.n_features},
                       {"seed", r.seed},
                       {"config", r.config},
                       {"eval_count", r.eval_count},
                       {"eval_requests", r.eval_requests},
                       {"iterations", r.iterations},
                       {"wall_time_s", r.wall_time_s},
                       {"front", std::move(front)},
                       {"history", r.history}};
}

inline void from_json(const nlohmann::json& j, RunRecord& r) {
    if (j.value("schema_version", 0) != 1) {
        throw error("RunRecord: unsupported schema_version");
    }
    r.algorithm = j.at("algorithm").get<std::string>();
    r.dataset_name = j.at("dataset_name").get<std::string>();
    r.n_features = j.at("n_features").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = j.at("config").get<OptimizerConfig>();
    r.eval_count = j.at("eval_count").get<long>();
    r.eval_requests = j.at("eval_requests").get<long>();
    r.iterations = j.at("iterations").get<long>();
    r.wall_time_s = j.at("wall_time_s").get<double>();
    r.front.clear();
    for (const auto& e : j.at("front")) {
        ArchiveEntry entry;
        entry.subset = FeatureSubset::from_bitstring(e.at("mask").get<std::string>());
        entry.objectives.error_pct = e.at("error_pct").get<double>();
        entry.objectives.n_selected = e.at("n_selected").get<int>();
        r.front.push_back(std::move(entry));
    }
    r.history = j.value("history", std::vector<IterationLog>{});
}

// Plot-ready front: unique (n_selected, error_pct) pairs ascending by
// n_selected. Mutual non-domination makes n_selected unique per error value.
inline std::vector<Objectives> unique_front_points(const std::vector<ArchiveEntry>& front) {
    std::vector<Objectives> points;
    for (const ArchiveEntry& e : front) { points.push_back(e.objectives); }
    std::sort(points.begin(), points.end(), [](const Objectives& a, const Objectives& b) {
        if (a.n_selected != b.n_selected) { return a.n_selected < b.n_selected; }
        return a.error_pct < b.error_pct;
    });
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

inline std::string front_to_csv(const std::vector<ArchiveEntry>& front) {
    std::string out = "n_selected,error_pct\n";
    for (const Objectives& o : unique_front_points(front)) {
        out += std::to_string(o.n_selected);
        out += ',';
        out += detail::format_double(o.error_pct);
        out += '\n';
    }
    return out;
}

// the streamable per-iteration log form
inline std::string history_to_csv(const std::vector<IterationLog>& history) {
    std::string out = "iter,branch,parent_err,parent_k,off_err,off_k,r\n";
    for (const IterationLog& l : history) {
        out += std::to_string(l.iter) + ',' + l.branch + ',' + detail::format_double(l.parent_err) +
               ',' + std::to_string(l.parent_k) + ',' + detail::format_double(l.off_err) + ',' +
               std::to_string(l.off_k) + ',' + std::to_string(l.r) + '\n';
    }
    return out;
}

inline std::vector<Objectives> front_from_csv(const std::string& content) {
    std::vector<Objectives> points;
    std::size_t pos = 0;
    bool header = true;
    while (pos < content.size()) {
        std::size_t end = content.find('\n', pos);
        if (end == std::string::npos) { end = content.size(); }
        const std::string line = detail::trim(content.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) { continue; }
        if (header) {
            if (line != "n_selected,error_pct") { throw error("front CSV: unexpected header"); }
            header = false;
            continue;
        }
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != 2) { throw error("front CSV: expected 2 fields per row"); }
        double k = 0.0, err = 0.0;
        if (!detail::parse_double(fields[0], k) || !detail::parse_double(fields[1], err)) {
            throw error("front CSV: cannot parse row '" + line + "'");
        }
        points.push_back({err, static_cast<int>(k)});
    }
    if (header) { throw error("front CSV: missing header"); }
    return points;
}

}  // namespace mmifs

#endif

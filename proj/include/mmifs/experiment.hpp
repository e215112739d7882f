#ifndef MMIFS_EXPERIMENT_HPP
#define MMIFS_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "mmifs/dataset.hpp"
#include "mmifs/error.hpp"
#include "mmifs/evaluator.hpp"
#include "mmifs/metrics.hpp"
#include "mmifs/optimizer.hpp"
#include "mmifs/synth.hpp"

namespace mmifs {

struct DatasetRef {
    std::string name;
    std::string path;
    std::string label_col;
};

struct ExperimentConfig {
    std::vector<DatasetRef> datasets;
    std::vector<std::string> algorithms;
    int runs = 1;
    std::uint64_t base_seed = 0;
    std::string output_dir = "results";
    bool write_history_csv = false;
    bool save_model = false;
    OptimizerConfig optimizer;

    static ExperimentConfig from_json(const nlohmann::json& j) {
        try {
            if (j.value("schema_version", 0) != 1) {
                throw config_error("config: schema_version must be 1");
            }
            ExperimentConfig cfg;
            for (const auto& d : j.at("datasets")) {
                DatasetRef ref;
                ref.name = d.at("name").get<std::string>();
                ref.path = d.at("path").get<std::string>();
                if (d.at("label_col").is_number_integer()) {
                    ref.label_col = std::to_string(d.at("label_col").get<int>());
                } else {
                    ref.label_col = d.at("label_col").get<std::string>();
                }
                cfg.datasets.push_back(std::move(ref));
            }
            cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
            cfg.runs = j.value("runs", 1);
            cfg.base_seed = j.value("base_seed", std::uint64_t{0});
            cfg.output_dir = j.value("output_dir", std::string("results"));
            cfg.write_history_csv = j.value("write_history_csv", false);
            cfg.save_model = j.value("save_model", false);
            if (j.contains("optimizer")) { cfg.optimizer = j.at("optimizer").get<OptimizerConfig>(); }
            cfg.validate();
            return cfg;
        } catch (const config_error&) {
            throw;
        } catch (const std::exception& e) {
            throw config_error(std::string("config: ") + e.what());
        }
    }

    void validate() const {
        if (datasets.empty()) { throw config_error("config: no datasets"); }
        std::set<std::string> names;
        for (const DatasetRef& d : datasets) {
            if (d.name.empty()) { throw config_error("config: dataset with empty name"); }
            if (!names.insert(d.name).second) {
                throw config_error("config: duplicate dataset name '" + d.name + "'");
            }
            if (!std::filesystem::exists(d.path)) {
                throw config_error("config: dataset file not found: " + d.path);
            }
        }
        if (algorithms.empty()) { throw config_error("config: no algorithms"); }
        for (const std::string& a : algorithms) {
            if (a != "mmifs" && a != "blind_paes" && a != "random") {
                throw config_error("config: unknown algorithm '" + a + "'");
            }
        }
        if (runs < 1) { throw config_error("config: runs must be >= 1"); }
        optimizer.validate();
    }
};

namespace detail {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw error("cannot open file: " + path); }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw error(path + ": invalid JSON: " + e.what());
    }
}

inline std::filesystem::path resolve_output_dir(const std::string& configured) {
    std::filesystem::path dir(configured);
    if (dir.is_relative()) {
        if (const char* root = std::getenv("MMIFS_OUTPUT_ROOT")) { dir = std::filesystem::path(root) / dir; }
    }
    return dir;
}

inline std::string run_tag(const std::string& dataset, const std::string& algorithm, int run) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", run);
    return dataset + "__" + algorithm + "__run" + buf;
}

inline Front record_front(const RunRecord& rec) {
    Front f;
    f.points = unique_front_points(rec.front);
    f.n_features = rec.n_features;
    return f;
}

}  // namespace detail

// Executes runs x algorithms x datasets; run i uses seed base_seed + i. One
// RunRecord JSON and one front CSV per run, plus a manifest listing every
// output. Jobs are independent and run on up to `workers` threads; files are
// written atomically. Returns a process exit code.
inline int cmd_run(const std::string& config_path, int workers = 1) {
    ExperimentConfig cfg;
    std::filesystem::path out_dir;
    std::vector<Dataset> datasets;
    try {
        if (!std::filesystem::exists(config_path)) {
            throw config_error("config file not found: " + config_path);
        }
        cfg = ExperimentConfig::from_json(detail::read_json(config_path));
        out_dir = detail::resolve_output_dir(cfg.output_dir);
        for (const DatasetRef& ref : cfg.datasets) {
            Dataset d = load_csv(ref.path, ref.label_col);
            d.name = ref.name;
            if (cfg.optimizer.normalize) { d = min_max_normalize(d); }
            const int expected_train = static_cast<int>(
                std::llround(cfg.optimizer.train_fraction * static_cast<double>(d.n_rows())));
            if (cfg.optimizer.knn_k > expected_train) {
                throw config_error("config: knn_k exceeds the train split of dataset '" +
                                   ref.name + "'");
            }
            datasets.push_back(std::move(d));
        }
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    struct Job {
        int dataset_idx;
        std::string algorithm;
        int run;
        std::string status = "ok";
        std::string message;
        std::string record_file;
        std::string front_file;
        std::string history_file;
        std::string model_file;
        std::uint64_t seed = 0;
    };
    std::vector<Job> jobs;
    for (std::size_t di = 0; di < datasets.size(); ++di) {
        for (const std::string& algo : cfg.algorithms) {
            for (int run = 0; run < cfg.runs; ++run) {
                Job job;
                job.dataset_idx = static_cast<int>(di);
                job.algorithm = algo;
                job.run = run;
                job.seed = cfg.base_seed + static_cast<std::uint64_t>(run);
                jobs.push_back(std::move(job));
            }
        }
    }

    try {
        std::filesystem::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) { break; }
            Job& job = jobs[i];
            try {
                const Dataset& d = datasets[static_cast<std::size_t>(job.dataset_idx)];
                OptimizerConfig oc = cfg.optimizer;
                oc.seed = job.seed;
                const SplitPair split =
                    oc.stratify ? stratified_split(d, oc.train_fraction, job.seed)
                                : random_split(d, oc.train_fraction, job.seed);
                Evaluator evaluator(split, {oc.knn_k, oc.cv_folds});
                RunRecord rec = run_algorithm(
                    job.algorithm, oc, d.n_features,
                    [&](const FeatureSubset& s) { return evaluator.evaluate(s); });
                rec.dataset_name = d.name;

                const std::string tag = detail::run_tag(d.name, job.algorithm, job.run);
                job.record_file = tag + ".record.json";
                job.front_file = tag + ".front.csv";
                const nlohmann::json j = rec;
                detail::write_file_atomic(out_dir / job.record_file, j.dump(2) + "\n");
                detail::write_file_atomic(out_dir / job.front_file, front_to_csv(rec.front));
                if (cfg.write_history_csv) {
                    job.history_file = tag + ".history.csv";
                    detail::write_file_atomic(out_dir / job.history_file,
                                              history_to_csv(rec.history));
                }
                if (cfg.save_model && rec.model) {
                    job.model_file = tag + ".model.json";
                    detail::write_file_atomic(
                        out_dir / job.model_file,
                        model_state_json(*rec.model, oc.model_params()).dump(2) + "\n");
                }
            } catch (const std::exception& e) {
                job.status = "error";
                job.message = e.what();
            }
        }
    };
    const int n_workers = std::max(1, workers);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_workers; ++t) { pool.emplace_back(worker); }
        for (std::thread& t : pool) { t.join(); }
    }

    bool partial = false;
    nlohmann::json outputs = nlohmann::json::array();
    for (const Job& job : jobs) {
        if (job.status != "ok") { partial = true; }
        nlohmann::json row{{"dataset", datasets[static_cast<std::size_t>(job.dataset_idx)].name},
                           {"algorithm", job.algorithm},
                           {"run", job.run},
                           {"seed", job.seed},
                           {"record", job.record_file},
                           {"front_csv", job.front_file},
                           {"status", job.status},
                           {"message", job.message}};
        if (!job.history_file.empty()) { row["history_csv"] = job.history_file; }
        if (!job.model_file.empty()) { row["model"] = job.model_file; }
        outputs.push_back(std::move(row));
    }
    const nlohmann::json manifest = {{"schema_version", 1},
                                     {"config_file", config_path},
                                     {"partial", partial},
                                     {"outputs", std::move(outputs)}};
    try {
        detail::write_file_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << (out_dir / "manifest.json").string() << "\n";
    if (partial) {
        for (const Job& job : jobs) {
            if (job.status != "ok") {
                std::cerr << "failed: " << detail::run_tag(
                    datasets[static_cast<std::size_t>(job.dataset_idx)].name, job.algorithm,
                    job.run) << ": " << job.message << "\n";
            }
        }
        return 1;
    }
    return 0;
}

namespace detail {

struct LoadedRun {
    std::string dataset;
    std::string algorithm;
    int run = 0;
    RunRecord record;
};

inline std::vector<LoadedRun> load_manifest_runs(const std::string& manifest_path) {
    const nlohmann::json manifest = read_json(manifest_path);
    if (manifest.value("schema_version", 0) != 1) {
        throw error(manifest_path + ": unsupported manifest schema_version");
    }
    const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
    std::vector<LoadedRun> runs;
    for (const auto& o : manifest.at("outputs")) {
        if (o.value("status", "ok") != "ok") { continue; }
        LoadedRun lr;
        lr.dataset = o.at("dataset").get<std::string>();
        lr.algorithm = o.at("algorithm").get<std::string>();
        lr.run = o.at("run").get<int>();
        lr.record = read_json((base / o.at("record").get<std::string>()).string())
                        .get<RunRecord>();
        runs.push_back(std::move(lr));
    }
    return runs;
}

}  // namespace detail

// Cross-method comparison from run manifests: pairwise C-metric on each
// method's best front per dataset, per-method HV (best and mean over runs),
// and Wilcoxon p-values on per-dataset best-HV differences when run counts
// match. Writes three CSV files into out_dir.
inline int cmd_compare(const std::vector<std::string>& manifest_paths,
                       const std::string& out_dir_arg) {
    try {
        if (manifest_paths.empty()) { throw config_error("compare: no manifests given"); }
        std::vector<detail::LoadedRun> runs;
        for (const std::string& path : manifest_paths) {
            if (!std::filesystem::exists(path)) {
                throw config_error("compare: manifest not found: " + path);
            }
            auto part = detail::load_manifest_runs(path);
            runs.insert(runs.end(), part.begin(), part.end());
        }
        if (runs.empty()) { throw config_error("compare: manifests contain no successful runs"); }

        // method -> dataset -> runs
        std::map<std::string, std::map<std::string, std::vector<const detail::LoadedRun*>>> by;
        for (const detail::LoadedRun& r : runs) { by[r.algorithm][r.dataset].push_back(&r); }
        if (by.size() < 2) { throw config_error("compare: need at least 2 methods"); }

        std::vector<std::string> methods;
        for (const auto& [m, _] : by) { methods.push_back(m); }
        std::set<std::string> dataset_set;
        for (const auto& [_, per_ds] : by) {
            for (const auto& [ds, __] : per_ds) { dataset_set.insert(ds); }
        }
        for (const std::string& m : methods) {
            for (const std::string& ds : dataset_set) {
                if (!by[m].count(ds)) {
                    throw config_error("compare: method '" + m + "' has no runs on dataset '" +
                                       ds + "'");
                }
            }
        }

        struct MethodOnDataset {
            Front best_front;
            double hv_best = 0.0;
            double hv_mean = 0.0;
            double hv_std = 0.0;
            int n_runs = 0;
        };
        std::map<std::string, std::map<std::string, MethodOnDataset>> stats;
        for (const std::string& m : methods) {
            for (const std::string& ds : dataset_set) {
                auto& runs_here = by[m][ds];
                std::sort(runs_here.begin(), runs_here.end(),
                          [](const detail::LoadedRun* a, const detail::LoadedRun* b) {
                              return a->run < b->run;
                          });
                MethodOnDataset s;
                s.n_runs = static_cast<int>(runs_here.size());
                std::vector<double> hvs;
                for (const detail::LoadedRun* lr : runs_here) {
                    const Front f = detail::record_front(lr->record);
                    const double hv = hypervolume(f);
                    hvs.push_back(hv);
                    if (hvs.size() == 1 || hv > s.hv_best) {
                        s.hv_best = hv;
                        s.best_front = f;
                    }
                }
                double sum = 0.0;
                for (double h : hvs) { sum += h; }
                s.hv_mean = sum / static_cast<double>(hvs.size());
                double var = 0.0;
                for (double h : hvs) { var += (h - s.hv_mean) * (h - s.hv_mean); }
                s.hv_std = std::sqrt(var / static_cast<double>(hvs.size()));
                stats[m][ds] = std::move(s);
            }
        }

        const std::filesystem::path out_dir(out_dir_arg.empty() ? "." : out_dir_arg);
        std::filesystem::create_directories(out_dir);

        std::string cmetric = "dataset,method_row,method_col,c_metric\n";
        for (const std::string& ds : dataset_set) {
            for (const std::string& a : methods) {
                for (const std::string& b : methods) {
                    const double c = c_metric(stats[a][ds].best_front, stats[b][ds].best_front);
                    cmetric += ds + "," + a + "," + b + "," + detail::format_double(c) + "\n";
                }
            }
        }
        detail::write_file_atomic(out_dir / "compare_cmetric.csv", cmetric);

        std::string hv = "dataset,method,runs,hv_best,hv_mean,hv_std\n";
        for (const std::string& ds : dataset_set) {
            for (const std::string& m : methods) {
                const MethodOnDataset& s = stats[m][ds];
                hv += ds + "," + m + "," + std::to_string(s.n_runs) + "," +
                      detail::format_double(s.hv_best) + "," + detail::format_double(s.hv_mean) +
                      "," + detail::format_double(s.hv_std) + "\n";
            }
        }
        detail::write_file_atomic(out_dir / "compare_hv.csv", hv);

        std::string wilcoxon = "method_a,method_b,n_datasets,p_value,status\n";
        for (std::size_t i = 0; i < methods.size(); ++i) {
            for (std::size_t j = i + 1; j < methods.size(); ++j) {
                const std::string &a = methods[i], &b = methods[j];
                bool counts_match = true;
                std::vector<double> diffs;
                for (const std::string& ds : dataset_set) {
                    if (stats[a][ds].n_runs != stats[b][ds].n_runs) { counts_match = false; }
                    diffs.push_back(stats[a][ds].hv_best - stats[b][ds].hv_best);
                }
                std::string p = "", status = "ok";
                if (!counts_match) {
                    status = "run_count_mismatch";
                } else {
                    try {
                        p = detail::format_double(wilcoxon_exact(diffs));
                    } catch (const std::exception& e) {
                        status = e.what();
                    }
                }
                wilcoxon += a + "," + b + "," + std::to_string(dataset_set.size()) + "," + p +
                            "," + status + "\n";
            }
        }
        detail::write_file_atomic(out_dir / "compare_wilcoxon.csv", wilcoxon);

        std::cout << (out_dir / "compare_cmetric.csv").string() << "\n"
                  << (out_dir / "compare_hv.csv").string() << "\n"
                  << (out_dir / "compare_wilcoxon.csv").string() << "\n";
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// Plot-ready front CSVs from run records, one output file per record.
inline int cmd_front_export(const std::vector<std::string>& record_paths,
                            const std::string& out_dir_arg) {
    try {
        if (record_paths.empty()) { throw config_error("front-export: no records given"); }
        for (const std::string& path : record_paths) {
            if (!std::filesystem::exists(path)) {
                throw config_error("front-export: record not found: " + path);
            }
        }
        const std::filesystem::path out_dir(out_dir_arg.empty() ? "." : out_dir_arg);
        std::filesystem::create_directories(out_dir);
        for (const std::string& path : record_paths) {
            const RunRecord rec = detail::read_json(path).get<RunRecord>();
            if (rec.front.empty()) { throw error(path + ": record has an empty front"); }
            const std::string name = rec.dataset_name + "__" + rec.algorithm + "__seed" +
                                     std::to_string(rec.seed) + ".front.csv";
            detail::write_file_atomic(out_dir / name, front_to_csv(rec.front));
            std::cout << (out_dir / name).string() << "\n";
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

struct MetricsOptions {
    std::vector<std::string> fronts;   // front CSVs or record JSONs
    std::vector<std::string> group_a;  // paired fronts for the Wilcoxon test
    std::vector<std::string> group_b;
    std::string friedman_csv;  // rows = datasets, columns = methods, header row
    int n_features = 0;        // required for plain front CSVs
    std::string out;           // empty: stdout
};

namespace detail {

inline Front load_front_file(const std::string& path, int n_features_flag) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        const RunRecord rec = read_json(path).get<RunRecord>();
        return record_front(rec);
    }
    if (n_features_flag < 1) {
        throw config_error("metrics: --n-features is required for front CSV inputs");
    }
    Front f;
    f.points = front_from_csv(read_file(path));
    f.n_features = n_features_flag;
    validate_front(f);
    return f;
}

}  // namespace detail

// Metric calculator over standalone front files: per-front HV, a pairwise
// C-metric table, an optional paired Wilcoxon test on HV differences, and an
// optional Friedman test over a score matrix.
inline int cmd_metrics(const MetricsOptions& opt) {
    try {
        std::string out;
        if (!opt.friedman_csv.empty()) {
            const std::string content = detail::read_file(opt.friedman_csv);
            std::istringstream in(content);
            std::string line;
            if (!std::getline(in, line)) { throw config_error("metrics: empty score matrix"); }
            const std::vector<std::string> header = detail::split_csv_line(detail::trim(line));
            std::vector<std::vector<double>> scores(header.size());
            while (std::getline(in, line)) {
                if (detail::trim(line).empty()) { continue; }
                const std::vector<std::string> fields = detail::split_csv_line(detail::trim(line));
                if (fields.size() != header.size()) {
                    throw config_error("metrics: ragged score matrix row");
                }
                for (std::size_t c = 0; c < fields.size(); ++c) {
                    double v = 0.0;
                    if (!detail::parse_double(fields[c], v)) {
                        throw config_error("metrics: cannot parse score '" + fields[c] + "'");
                    }
                    scores[c].push_back(v);
                }
            }
            const FriedmanResult fr = friedman(scores);
            out += "friedman_statistic,friedman_p\n";
            out += detail::format_double(fr.statistic) + "," +
                   detail::format_double(fr.p_value) + "\n";
        }

        if (!opt.fronts.empty()) {
            std::vector<Front> fronts;
            for (const std::string& path : opt.fronts) {
                fronts.push_back(detail::load_front_file(path, opt.n_features));
            }
            out += "front,hv\n";
            for (std::size_t i = 0; i < fronts.size(); ++i) {
                out += opt.fronts[i] + "," + detail::format_double(hypervolume(fronts[i])) + "\n";
            }
            out += "front_row,front_col,c_metric\n";
            for (std::size_t i = 0; i < fronts.size(); ++i) {
                for (std::size_t j = 0; j < fronts.size(); ++j) {
                    out += opt.fronts[i] + "," + opt.fronts[j] + "," +
                           detail::format_double(c_metric(fronts[i], fronts[j])) + "\n";
                }
            }
        }

        if (!opt.group_a.empty() || !opt.group_b.empty()) {
            if (opt.group_a.size() != opt.group_b.size()) {
                throw config_error("metrics: --a and --b need the same number of fronts");
            }
            std::vector<double> diffs;
            for (std::size_t i = 0; i < opt.group_a.size(); ++i) {
                const Front a = detail::load_front_file(opt.group_a[i], opt.n_features);
                const Front b = detail::load_front_file(opt.group_b[i], opt.n_features);
                diffs.push_back(hypervolume(a) - hypervolume(b));
            }
            out += "wilcoxon_p\n" + detail::format_double(wilcoxon_exact(diffs)) + "\n";
        }

        if (out.empty()) { throw config_error("metrics: nothing to do"); }
        if (opt.out.empty()) {
            std::cout << out;
        } else {
            detail::write_file_atomic(opt.out, out);
            std::cout << opt.out << "\n";
        }
        return 0;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

// Deterministic synthetic benchmark CSVs for demos and tests.
inline int cmd_synth(const std::string& out_dir_arg) {
    try {
        const std::filesystem::path out_dir(out_dir_arg.empty() ? "data" : out_dir_arg);
        std::filesystem::create_directories(out_dir);
        const Dataset wine = synth::wine_like();
        const Dataset breast = synth::breast_like();
        write_csv(wine, (out_dir / "wine_like.csv").string());
        write_csv(breast, (out_dir / "breast_like.csv").string());
        std::cout << (out_dir / "wine_like.csv").string() << "\n"
                  << (out_dir / "breast_like.csv").string() << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mmifs

#endif

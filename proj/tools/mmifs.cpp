#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mmifs/mmifs.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective interaction-aware feature selection"};
    app.require_subcommand(1);

    std::string config_file;
    int workers = 1;
    auto* run = app.add_subcommand("run", "Execute the experiments described by a config file");
    run->add_option("--config", config_file, "Experiment config (JSON)")->required();
    run->add_option("--workers", workers, "Concurrent jobs")->check(CLI::PositiveNumber);

    std::vector<std::string> manifests;
    std::string compare_out = ".";
    auto* compare = app.add_subcommand("compare", "Compare methods across run manifests");
    compare->add_option("manifests", manifests, "manifest.json files")->required();
    compare->add_option("--out", compare_out, "Output directory for the comparison CSVs");

    std::vector<std::string> records;
    std::string export_out = ".";
    auto* front_export = app.add_subcommand("front-export", "Write plot-ready front CSVs");
    front_export->add_option("records", records, "RunRecord JSON files")->required();
    front_export->add_option("--out", export_out, "Output directory");

    mmifs::MetricsOptions mopt;
    auto* metrics = app.add_subcommand("metrics", "Front metrics: HV, C-metric, rank tests");
    metrics->add_option("fronts", mopt.fronts, "Front CSVs or record JSONs");
    metrics->add_option("--n-features", mopt.n_features,
                        "Total feature count (required for front CSV inputs)");
    metrics->add_option("--a", mopt.group_a, "Paired fronts, first method");
    metrics->add_option("--b", mopt.group_b, "Paired fronts, second method");
    metrics->add_option("--friedman", mopt.friedman_csv,
                        "Score matrix CSV (rows = datasets, columns = methods)");
    metrics->add_option("--out", mopt.out, "Write the result CSV here instead of stdout");

    std::string synth_out = "data";
    auto* synth = app.add_subcommand("synth", "Write the synthetic benchmark datasets");
    synth->add_option("--out", synth_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) { return mmifs::cmd_run(config_file, workers); }
    if (compare->parsed()) { return mmifs::cmd_compare(manifests, compare_out); }
    if (front_export->parsed()) { return mmifs::cmd_front_export(records, export_out); }
    if (metrics->parsed()) { return mmifs::cmd_metrics(mopt); }
    if (synth->parsed()) { return mmifs::cmd_synth(synth_out); }
    return 2;
}

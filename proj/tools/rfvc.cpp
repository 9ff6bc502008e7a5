// Command-line front end for the radio-fingerprint vehicle classification
// toolkit: synthesize passes, extract features, train/evaluate classifiers,
// run the streaming gateway and profile inference cost.

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "rfvc/pipeline.hpp"

namespace {

rfvc::AppConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return rfvc::AppConfig{};
    return rfvc::load_config(path);
}

rfvc::Dataset load_feature_dataset(const std::string& path) {
    return rfvc::dataset_from_features(
        rfvc::features_from_text(rfvc::read_text_file(path), path));
}

rfvc::Dataset load_raw_dataset(const std::string& path, int link) {
    return rfvc::dataset_from_raw(rfvc::raw_rows_from_text(rfvc::read_text_file(path), path),
                                  link);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfvc - radio-fingerprint vehicle classification toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", in_dir, features_path, raw_path, per_link_path;
    std::string model_path, input_path = "-", family_name = "knn", out_path;
    std::uint64_t seed = 1;
    int n_passes = 100, folds = 5, link = 1;
    bool with_timings = false;

    auto* synth = app.add_subcommand("synth", "synthesize passes and ground truth");
    synth->add_option("--config", config_path, "config file");
    synth->add_option("-n,--passes", n_passes, "number of passes")->check(CLI::PositiveNumber);
    synth->add_option("--seed", seed, "master seed");
    synth->add_option("--out", out_dir, "output directory")->required();

    auto* extract = app.add_subcommand("extract", "detect events and extract features");
    extract->add_option("--config", config_path, "config file");
    extract->add_option("--in", in_dir, "trace directory (with manifest.csv)")->required();
    extract->add_option("--out", out_dir, "output directory")->required();

    auto* tr = app.add_subcommand("train", "train one classifier and save it");
    tr->add_option("--features", features_path, "feature file");
    tr->add_option("--raw", raw_path, "raw-vector file");
    tr->add_option("--family", family_name, "dt|knn|svm|ann");
    tr->add_option("--link", link, "raw link selector");
    tr->add_option("--seed", seed, "training seed");
    tr->add_option("--out", out_path, "model file")->required();

    auto* ev = app.add_subcommand("eval", "cross-validated evaluation grid");
    ev->add_option("--features", features_path, "feature file");
    ev->add_option("--raw", raw_path, "raw-vector file");
    ev->add_option("--per-link", per_link_path, "per-link feature file (Fig. 7 style table)");
    ev->add_option("--family", family_name, "family for --per-link mode");
    ev->add_option("--folds", folds, "cross-validation folds")->check(CLI::PositiveNumber);
    ev->add_option("--seed", seed, "evaluation seed");
    ev->add_option("--out", out_path, "report file")->required();
    ev->add_flag("--timings", with_timings, "include wall-clock timing lines");

    auto* st = app.add_subcommand("stream", "online classification over a sample stream");
    st->add_option("--config", config_path, "config file");
    st->add_option("--model", model_path, "trained model file")->required();
    st->add_option("--input", input_path, "trace file or '-' for stdin");
    st->add_option("--out", out_path, "records file (default stdout)");

    auto* prof = app.add_subcommand("profile", "training/inference runtime report");
    prof->add_option("--features", features_path, "feature file")->required();
    prof->add_option("--raw", raw_path, "raw-vector file")->required();
    prof->add_option("--seed", seed, "seed");
    prof->add_option("--out", out_path, "report file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "rfvc: error(usage): " << e.what() << "\n";
        return 1;
    }

    try {
        if (synth->parsed()) {
            const auto cfg = load_config_or_default(config_path);
            const auto result = rfvc::run_synth(cfg, n_passes, seed, out_dir);
            std::cout << "synthesized " << result.manifest.size() << " passes into " << out_dir
                      << "\n";
        } else if (extract->parsed()) {
            const auto cfg = load_config_or_default(config_path);
            const auto result = rfvc::run_extract(cfg, in_dir, out_dir);
            std::cout << "extracted " << result.features.size() << " passes, "
                      << result.rejects.size() << " rejects\n";
        } else if (tr->parsed()) {
            if (features_path.empty() == raw_path.empty())
                throw rfvc::UsageError("train needs exactly one of --features / --raw");
            rfvc::ModelSpec spec;
            spec.family = rfvc::parse_family(family_name);
            spec.seed = seed;
            const rfvc::Dataset data = features_path.empty()
                                           ? load_raw_dataset(raw_path, link)
                                           : load_feature_dataset(features_path);
            const rfvc::TrainedModel model = rfvc::train(spec, data);
            rfvc::write_text_file(out_path, rfvc::model_to_text(model));
            std::cout << "trained " << family_name << " on " << data.size() << " samples -> "
                      << out_path << "\n";
        } else if (ev->parsed()) {
            if (!per_link_path.empty()) {
                const auto rows =
                    rfvc::per_link_from_text(rfvc::read_text_file(per_link_path), per_link_path);
                rfvc::ModelSpec spec;
                spec.family = rfvc::parse_family(family_name);
                spec.seed = seed;
                std::vector<std::pair<int, rfvc::Dataset>> per_link;
                for (int id = 1; id <= 9; ++id)
                    per_link.emplace_back(id, rfvc::dataset_from_per_link(rows, id));
                const auto table = rfvc::per_link_eval(spec, per_link, folds, seed);
                rfvc::write_text_file(out_path,
                                      rfvc::per_link_report_to_text(table, folds, seed));
            } else {
                if (features_path.empty() || raw_path.empty())
                    throw rfvc::UsageError("eval needs --features and --raw (or --per-link)");
                const rfvc::Dataset features = load_feature_dataset(features_path);
                const rfvc::Dataset raw = load_raw_dataset(raw_path, link);
                const auto grid = rfvc::run_eval_grid(features, raw, folds, seed);
                rfvc::write_text_file(out_path, rfvc::eval_grid_to_text(grid, with_timings));
            }
            std::cout << "report written to " << out_path << "\n";
        } else if (st->parsed()) {
            const auto cfg = load_config_or_default(config_path);
            const auto model = rfvc::model_from_text(rfvc::read_text_file(model_path));
            std::string trace_text;
            if (input_path == "-") {
                std::ostringstream os;
                os << std::cin.rdbuf();
                trace_text = os.str();
            } else {
                trace_text = rfvc::read_text_file(input_path);
            }
            const auto result = rfvc::run_stream_text(cfg, model, trace_text,
                                                      input_path == "-" ? "stdin" : input_path);
            const std::string records = rfvc::records_to_text(result.records);
            if (out_path.empty())
                std::cout << records;
            else
                rfvc::write_text_file(out_path, records);
            for (const auto& d : result.diagnostics)
                std::cerr << "incomplete-pass link=" << d.link_id << " " << d.reason << "\n";
        } else if (prof->parsed()) {
            const rfvc::Dataset features = load_feature_dataset(features_path);
            const rfvc::Dataset raw = load_raw_dataset(raw_path, link);
            const auto report = rfvc::run_profile(features, raw, seed);
            rfvc::write_text_file(out_path, rfvc::profile_to_text(report));
            std::cout << "profile written to " << out_path << "\n";
        }
    } catch (const rfvc::UsageError& e) {
        std::cerr << "rfvc: error(usage): " << e.what() << "\n";
        return 1;
    } catch (const rfvc::DataError& e) {
        std::cerr << "rfvc: error(data): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "rfvc: error(internal): " << e.what() << "\n";
        return 3;
    }
    return 0;
}

// Command-line front end for the jamming / fingerprint-sanitization testbed.
//
// Subcommands:
//   capture   synthesize the sweep and store the per-cell I/Q dataset
//   train     train the identification classifier and per-device autoencoders
//   eval-k    identification attack tables from a stored dataset
//   eval-t    verification (autoencoder) attack tables from a stored dataset
//   sweep     capture + both attacks + figure-analogue emission
//   emit      re-run the analyses on a stored dataset and emit files

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfveil/capture.hpp"
#include "rfveil/emit.hpp"
#include "rfveil/experiment.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out;
    std::string scenario;
    std::string data;
    std::uint64_t seed = 0;
    bool has_seed = false;
    std::vector<double> rjp;
    std::vector<double> attenuation;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_data) {
    cmd->add_option("--config", opts.config_path, "key=value config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", opts.seed, "master seed override")
        ->each([&opts](const std::string&) { opts.has_seed = true; });
    cmd->add_option("--out", opts.out, "output directory override");
    cmd->add_option("--scenario", opts.scenario, "scenario preset: cable or radio")
        ->check(CLI::IsMember({"cable", "radio"}));
    cmd->add_option("--rjp", opts.rjp, "relative jamming power sweep values")->delimiter(',');
    cmd->add_option("--attenuation", opts.attenuation, "jammer attenuation values in dB")
        ->delimiter(',');
    if (with_data)
        cmd->add_option("--data", opts.data, "stored dataset directory (from 'capture')");
}

std::string fmt_list(const std::vector<double>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

// CLI flags are translated into config lines appended to the file text and
// parsed by the one config parser, so precedence and validation live in a
// single place.
rfveil::ExperimentConfig build_config(const CommonOpts& opts) {
    std::ostringstream text;
    if (!opts.config_path.empty()) {
        std::ifstream is(opts.config_path);
        text << is.rdbuf() << "\n";
    }
    if (!opts.scenario.empty()) text << "scenario = " << opts.scenario << "\n";
    if (opts.has_seed) text << "master_seed = " << opts.seed << "\n";
    if (!opts.rjp.empty()) text << "rjp = " << fmt_list(opts.rjp) << "\n";
    if (!opts.attenuation.empty())
        text << "attenuation_db = " << fmt_list(opts.attenuation) << "\n";
    if (!opts.out.empty()) text << "out_dir = " << opts.out << "\n";
    return rfveil::parse_config_text(text.str());
}

std::string dataset_dir(const CommonOpts& opts, const rfveil::ExperimentConfig& cfg) {
    return opts.data.empty() ? cfg.out_dir + "/dataset" : opts.data;
}

rfveil::CaptureDataset load_or_fail(const CommonOpts& opts) {
    const rfveil::ExperimentConfig cfg = build_config(opts);
    return rfveil::load_dataset(dataset_dir(opts, cfg));
}

void print_capture_summary(const rfveil::CaptureDataset& ds) {
    std::size_t ok = 0, flagged = 0;
    for (const auto& c : ds.cells) {
        if (c.converged) ++ok;
        if (c.flagged) ++flagged;
    }
    std::cout << "cells: " << ds.cells.size() << "  converged: " << ok
              << "  flagged: " << flagged << "\n";
    for (const auto& c : ds.cells)
        std::cout << "  device " << c.key.device_id << "  rjp " << c.rjp << "  att "
                  << c.attenuation_db << " dB  ber " << c.ber << "  snr " << c.snr_db
                  << " dB" << (c.converged ? "" : "  [no lock]")
                  << (c.flagged ? "  [flagged]" : "") << "\n";
}

void print_k_table(const rfveil::KAnonymityResult& k) {
    std::cout << "identification accuracy (baseline " << k.baseline_accuracy << "):\n";
    for (const auto& row : k.rows)
        std::cout << "  rjp " << row.rjp << "  att " << row.attenuation_db << " dB  accuracy "
                  << row.accuracy << "  ber " << row.ber << "  snr " << row.mean_snr_db
                  << " dB" << (row.excluded ? "  [flagged cells, excluded]" : "") << "\n";
}

void print_t_table(const rfveil::TAnonymityResult& t) {
    std::cout << "verification AUC per (device, rjp, attenuation):\n";
    for (const auto& row : t.rows)
        std::cout << "  device " << row.device_id << "  rjp " << row.rjp << "  att "
                  << row.attenuation_db << " dB  auc " << row.auc << "  snr " << row.snr_db
                  << " dB" << (row.excluded ? "  [flagged, excluded]" : "") << "\n";
}

void emit_both(const rfveil::SweepResult& result, const std::string& dir) {
    for (const auto f : {rfveil::EmitFormat::csv, rfveil::EmitFormat::json})
        for (const auto& path : rfveil::emit_results(result, f, dir))
            std::cout << "wrote " << path << "\n";
}

void save_models(const rfveil::SweepResult& result, const std::string& dir) {
    rfveil::save_classifier(result.k_anonymity.model, dir + "/classifier.rfvn");
    std::cout << "wrote " << dir << "/classifier.rfvn\n";
    for (std::size_t d = 0; d < result.t_anonymity.models.size(); ++d) {
        const std::string path = dir + "/ae_device" + std::to_string(d) + ".rfvn";
        rfveil::save_autoencoder(result.t_anonymity.models[d], path);
        std::cout << "wrote " << path << "\n";
    }
}

// Link statistics and distribution rows without any model training; shared by
// the single-attack subcommands.
rfveil::SweepResult stats_only(const rfveil::CaptureDataset& ds);

int cmd_capture(const CommonOpts& opts) {
    const rfveil::ExperimentConfig cfg = build_config(opts);
    const rfveil::CaptureDataset ds = rfveil::run_capture(cfg);
    const std::string dir = dataset_dir(opts, cfg);
    rfveil::save_dataset(ds, dir);
    std::cout << "dataset written to " << dir << "\n";
    print_capture_summary(ds);
    return 0;
}

int cmd_train(const CommonOpts& opts) {
    const rfveil::CaptureDataset ds = load_or_fail(opts);
    rfveil::SweepResult result;
    result.config = ds.config;
    result.k_anonymity = rfveil::run_k_anonymity(ds);
    result.t_anonymity = rfveil::run_t_anonymity(ds);
    save_models(result, ds.config.out_dir);
    print_k_table(result.k_anonymity);
    print_t_table(result.t_anonymity);
    return 0;
}

int cmd_eval_k(const CommonOpts& opts) {
    const rfveil::CaptureDataset ds = load_or_fail(opts);
    rfveil::SweepResult result = stats_only(ds);
    result.k_anonymity = rfveil::run_k_anonymity(ds);
    emit_both(result, ds.config.out_dir + "/eval_k");
    print_k_table(result.k_anonymity);
    return 0;
}

int cmd_eval_t(const CommonOpts& opts) {
    const rfveil::CaptureDataset ds = load_or_fail(opts);
    rfveil::SweepResult result = stats_only(ds);
    result.t_anonymity = rfveil::run_t_anonymity(ds);
    emit_both(result, ds.config.out_dir + "/eval_t");
    print_t_table(result.t_anonymity);
    return 0;
}

int cmd_sweep(const CommonOpts& opts) {
    const rfveil::ExperimentConfig cfg = build_config(opts);
    const rfveil::CaptureDataset ds = rfveil::run_capture(cfg);
    rfveil::save_dataset(ds, dataset_dir(opts, cfg));
    print_capture_summary(ds);
    const rfveil::SweepResult result = rfveil::analyze_dataset(ds);
    save_models(result, cfg.out_dir);
    emit_both(result, cfg.out_dir);
    print_k_table(result.k_anonymity);
    print_t_table(result.t_anonymity);
    return 0;
}

int cmd_emit(const CommonOpts& opts, const std::string& format) {
    const rfveil::CaptureDataset ds = load_or_fail(opts);
    const rfveil::SweepResult result = rfveil::analyze_dataset(ds);
    if (format == "csv" || format == "both")
        for (const auto& path :
             rfveil::emit_results(result, rfveil::EmitFormat::csv, ds.config.out_dir))
            std::cout << "wrote " << path << "\n";
    if (format == "json" || format == "both")
        for (const auto& path :
             rfveil::emit_results(result, rfveil::EmitFormat::json, ds.config.out_dir))
            std::cout << "wrote " << path << "\n";
    return 0;
}

rfveil::SweepResult stats_only(const rfveil::CaptureDataset& ds) {
    rfveil::SweepResult result;
    result.config = ds.config;
    result.snr_rows = rfveil::link_snr_rows(ds);
    result.dist_rows = rfveil::distribution_rows(ds);
    return result;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"friendly-jammer RF fingerprint sanitization testbed"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string emit_format = "both";

    CLI::App* capture = app.add_subcommand("capture", "synthesize and store the sweep dataset");
    add_common(capture, opts, true);
    CLI::App* train = app.add_subcommand("train", "train classifier and autoencoders");
    add_common(train, opts, true);
    CLI::App* eval_k = app.add_subcommand("eval-k", "identification attack evaluation");
    add_common(eval_k, opts, true);
    CLI::App* eval_t = app.add_subcommand("eval-t", "verification attack evaluation");
    add_common(eval_t, opts, true);
    CLI::App* sweep = app.add_subcommand("sweep", "capture, evaluate both attacks, emit files");
    add_common(sweep, opts, true);
    CLI::App* emit = app.add_subcommand("emit", "emit figure-analogue files from a dataset");
    add_common(emit, opts, true);
    emit->add_option("--format", emit_format, "csv, json, or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (capture->parsed()) return cmd_capture(opts);
        if (train->parsed()) return cmd_train(opts);
        if (eval_k->parsed()) return cmd_eval_k(opts);
        if (eval_t->parsed()) return cmd_eval_t(opts);
        if (sweep->parsed()) return cmd_sweep(opts);
        if (emit->parsed()) return cmd_emit(opts, emit_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

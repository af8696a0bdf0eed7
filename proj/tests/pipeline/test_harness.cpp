#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "rfveil/capture.hpp"
#include "rfveil/emit.hpp"
#include "rfveil/experiment.hpp"
#include "rfveil/rng.hpp"

namespace {

namespace fs = std::filesystem;

rfveil::ExperimentConfig mini_config() {
    rfveil::ExperimentConfig cfg = rfveil::cable_default_config();
    cfg.master_seed = 424242;
    cfg.k = 2;
    cfg.rjp = {0.0, 0.1, 0.3};
    cfg.attenuation_db = {20.0};
    cfg.symbols_per_cell = 302000;
    cfg.train_symbols_per_cell = 302000;
    cfg.stats_samples_per_cell = 30000;
    cfg.samples_per_image = 2000;
    cfg.image_size = 16;
    cfg.distribution_bins = 50;
    cfg.classifier.epochs = 25;
    cfg.classifier.learning_rate = 0.05;
    cfg.classifier.batch_size = 16;
    cfg.autoencoder.epochs = 15;
    cfg.autoencoder.learning_rate = 0.05;
    cfg.autoencoder.batch_size = 16;
    cfg.autoencoder.bottleneck = 32;
    return cfg;
}

// One capture + one analysis shared by every test case in this file.
const rfveil::CaptureDataset& shared_capture() {
    static const rfveil::CaptureDataset ds = rfveil::run_capture(mini_config());
    return ds;
}

rfveil::SweepResult& shared_analysis() {
    static rfveil::SweepResult res = rfveil::analyze_dataset(shared_capture());
    return res;
}

std::string fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::size_t csv_data_rows(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines == 0 ? 0 : lines - 1;  // minus the header line
}

const rfveil::TRow* find_t_row(const std::vector<rfveil::TRow>& rows, int device,
                               double rjp) {
    for (const auto& row : rows)
        if (row.device_id == device && row.rjp == rjp) return &row;
    return nullptr;
}

}  // namespace

TEST_CASE("mini sweep produces coherent link statistics") {
    const rfveil::SweepResult& res = shared_analysis();
    const rfveil::ExperimentConfig cfg = mini_config();

    REQUIRE(res.snr_rows.size() == 6);  // 2 devices x 3 jamming powers
    for (const auto& row : res.snr_rows) {
        REQUIRE(row.converged);
        CHECK(row.ber == 0.0);
        REQUIRE_FALSE(row.snr_pdf.pdf_x.empty());
        CHECK(row.snr_pdf.cdf_y.back() == doctest::Approx(1.0).epsilon(1e-12));
        // Per-symbol density integrates to one (trapezoid over bin centers).
        double area = 0.0;
        for (std::size_t i = 1; i < row.snr_pdf.pdf_x.size(); ++i)
            area += 0.5 * (row.snr_pdf.pdf_y[i] + row.snr_pdf.pdf_y[i - 1]) *
                    (row.snr_pdf.pdf_x[i] - row.snr_pdf.pdf_x[i - 1]);
        CHECK(area == doctest::Approx(1.0).epsilon(0.02));
    }

    for (int d = 0; d < cfg.k; ++d) {
        double prev = 1e9;
        for (std::size_t r = 0; r < cfg.rjp.size(); ++r) {
            const auto it = std::find_if(
                res.snr_rows.begin(), res.snr_rows.end(), [&](const rfveil::SnrRow& row) {
                    return row.device_id == d && row.rjp == cfg.rjp[r];
                });
            REQUIRE(it != res.snr_rows.end());
            CHECK(it->mean_snr_db < prev);  // more jamming, less SNR
            // Unjammed budget: -0.3 dBm symbols over a -25 dBm floor is a
            // 24.7 dB channel, minus up to a few dB of hardware distortion
            // (IQ skew, DC offset, PA compression) that the symbol-domain
            // estimator rightly counts as noise.
            if (r == 0) {
                CHECK(it->mean_snr_db > 18.5);
                CHECK(it->mean_snr_db < 26.0);
            }
            prev = it->mean_snr_db;
        }
    }

    REQUIRE(res.dist_rows.size() == 3);
    CHECK(res.dist_rows[0].rjp == 0.0);
    CHECK(res.dist_rows[0].ks_amplitude_vs_unjammed == 0.0);  // its own reference
    CHECK(res.dist_rows[0].ks_phase_vs_unjammed == 0.0);
    for (const auto& row : res.dist_rows) {
        CHECK(row.amplitude.cdf_y.back() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(row.phase.cdf_y.back() == doctest::Approx(1.0).epsilon(1e-12));
    }
    // The strongest jammer distorts the waveform statistics the most.
    CHECK(res.dist_rows[2].ks_phase_vs_unjammed >= res.dist_rows[1].ks_phase_vs_unjammed);
}

TEST_CASE("time-ordered splits cover each cell without overlap") {
    const rfveil::CaptureDataset& ds = shared_capture();
    const rfveil::ExperimentConfig cfg = mini_config();
    const rfveil::CellRecord* cell = ds.find(0, 0, 0);
    REQUIRE(cell != nullptr);

    CHECK(rfveil::cell_symbol_stream(*cell).size() == cell->symbols.size());

    const rfveil::ImageSplits splits = rfveil::build_image_splits(*cell, cfg);
    const std::size_t n_windows = cell->symbols.size() / cfg.samples_per_image;
    const std::size_t n_train =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_windows) * 0.6));
    const std::size_t n_val =
        static_cast<std::size_t>(std::floor(static_cast<double>(n_windows) * 0.2));
    CHECK(splits.train.size() == n_train);
    CHECK(splits.val.size() == n_val);
    CHECK(splits.test.size() == n_windows - n_train - n_val);
    CHECK(splits.train.size() + splits.val.size() + splits.test.size() == n_windows);
    REQUIRE(n_windows >= 100);  // enough images for the attacks below

    for (const auto& img : splits.train) {
        CHECK(img.size == 16);
        CHECK(img.n_source_samples == cfg.samples_per_image);
    }
    // Non-overlapping windows in time order: consecutive images come from
    // different symbols, so identical pixel maps are wildly unlikely.
    CHECK(splits.train.front().pixels != splits.test.back().pixels);
}

TEST_CASE("identification attack trains on unjammed traffic and scans the sweep") {
    rfveil::SweepResult& res = shared_analysis();
    const rfveil::CaptureDataset& ds = shared_capture();
    const rfveil::ExperimentConfig cfg = mini_config();
    rfveil::KAnonymityResult& k = res.k_anonymity;

    REQUIRE(k.rows.size() == 3);
    for (std::size_t r = 0; r < 3; ++r) {
        const rfveil::KRow& row = k.rows[r];
        CHECK(row.rjp == cfg.rjp[r]);
        CHECK(row.attenuation_db == 20.0);
        CHECK(!row.excluded);
        CHECK(row.ber == 0.0);
        CHECK(row.accuracy >= 0.0);
        CHECK(row.accuracy <= 1.0);
        REQUIRE(row.confusion.size() == 2);
        std::size_t total = 0;
        for (const auto& crow : row.confusion)
            for (std::size_t v : crow) total += v;
        CHECK(total == row.n_test_images);
        CHECK(row.n_test_images > 0);
    }
    CHECK(k.baseline_accuracy == k.rows[0].accuracy);

    // The strongest jammer must not leak more identity than no jammer at
    // all; allow one test window of slack at this miniature scale.
    const double slack = 1.0 / static_cast<double>(k.rows[2].n_test_images);
    CHECK(k.rows[2].accuracy <= k.rows[0].accuracy + slack);

    SUBCASE("the model memorizes its own training windows") {
        std::vector<rfveil::LabeledImage> train_set;
        for (int d = 0; d < cfg.k; ++d) {
            const rfveil::CellRecord* cell = ds.find(d, 0, 0);
            REQUIRE(cell != nullptr);
            for (const auto& img : rfveil::build_image_splits(*cell, cfg).train)
                train_set.push_back({img, d});
        }
        const rfveil::AccuracyReport rep =
            rfveil::evaluate_accuracy(k.model, train_set);
        CHECK(rep.accuracy >= 0.95);
    }
}

TEST_CASE("a label-shuffled control collapses to chance accuracy") {
    const rfveil::CaptureDataset& ds = shared_capture();
    const rfveil::ExperimentConfig cfg = mini_config();

    std::vector<rfveil::LabeledImage> train, val, test;
    for (int d = 0; d < cfg.k; ++d) {
        const rfveil::CellRecord* cell = ds.find(d, 0, 0);
        REQUIRE(cell != nullptr);
        const rfveil::ImageSplits splits = rfveil::build_image_splits(*cell, cfg);
        for (const auto& img : splits.train) train.push_back({img, d});
        for (const auto& img : splits.val) val.push_back({img, d});
        for (const auto& img : splits.test) test.push_back({img, d});
    }

    // Destroy the image->device association but keep the label counts.  The
    // validation labels are shuffled too: model selection must be as blind
    // as training, otherwise best-epoch picking against truthful labels
    // would cherry-pick a drift epoch that happens to align with the (very
    // separable) device clusters.
    rfveil::Rng rng(777);
    for (std::size_t i = train.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(train[i - 1].label, train[j].label);
    }
    for (std::size_t i = val.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(val[i - 1].label, val[j].label);
    }

    rfveil::ClassifierConfig ccfg;
    ccfg.image_size = cfg.image_size;
    ccfg.n_classes = cfg.k;
    ccfg.epochs = 10;
    ccfg.learning_rate = 0.03;
    ccfg.batch_size = 16;
    ccfg.seed = 4242;
    rfveil::ClassifierModel shuffled = rfveil::train_classifier(train, val, ccfg);

    // Nothing to learn: the loss should stay pinned near ln(k) instead of
    // dropping the way it does on truthful labels.
    CHECK(shuffled.meta.epoch_train_loss.back() > 0.6);

    // Agreement with i.i.d. random labels is Binomial(n, 1/k) regardless of
    // what the net computes, so the train-set score must sit in the 3-sigma
    // chance band (these image counts are far below memorization capacity).
    const rfveil::AccuracyReport rep = rfveil::evaluate_accuracy(shuffled, train);
    const double chance = 1.0 / static_cast<double>(cfg.k);
    const double sigma =
        std::sqrt(chance * (1.0 - chance) / static_cast<double>(train.size()));
    CHECK(std::abs(rep.accuracy - chance) <= 3.0 * sigma);
}

TEST_CASE("verification attack scores every sweep point per device") {
    const rfveil::SweepResult& res = shared_analysis();
    const rfveil::ExperimentConfig cfg = mini_config();
    const rfveil::TAnonymityResult& t = res.t_anonymity;

    REQUIRE(t.models.size() == 2);
    REQUIRE(t.rows.size() == 6);

    for (const auto& row : t.rows) {
        CHECK(!row.excluded);
        CHECK(row.auc >= 0.0);
        CHECK(row.auc <= 1.0);
        REQUIRE(row.roc.points.size() >= 2);
        CHECK(row.roc.points.front().first == 0.0);
        CHECK(row.roc.points.front().second == 0.0);
        CHECK(row.roc.points.back().first == 1.0);
        CHECK(row.roc.points.back().second == 1.0);
    }

    for (int d = 0; d < cfg.k; ++d) {
        const rfveil::TRow* self = find_t_row(t.rows, d, 0.0);
        const rfveil::TRow* weak = find_t_row(t.rows, d, 0.1);
        const rfveil::TRow* strong = find_t_row(t.rows, d, 0.3);
        REQUIRE(self != nullptr);
        REQUIRE(weak != nullptr);
        REQUIRE(strong != nullptr);
        // Held-out windows of the training distribution are indistinguishable
        // from the validation windows: the verifier reduces to a coin flip.
        CHECK(self->auc > 0.4);
        CHECK(self->auc < 0.6);
        // More jamming pushes reconstructions further off-manifold.
        CHECK(strong->auc > weak->auc);
        CHECK(strong->snr_db < weak->snr_db);
    }
}

TEST_CASE("analysis is unchanged after a disk round trip") {
    const rfveil::CaptureDataset& ds = shared_capture();
    const rfveil::SweepResult& res = shared_analysis();

    const std::string dir = fresh_dir("rfveil_harness_roundtrip");
    rfveil::save_dataset(ds, dir);
    const rfveil::CaptureDataset back = rfveil::load_dataset(dir);
    const rfveil::SweepResult res2 = rfveil::analyze_dataset(back);

    REQUIRE(res2.snr_rows.size() == res.snr_rows.size());
    for (std::size_t i = 0; i < res.snr_rows.size(); ++i) {
        CHECK(res2.snr_rows[i].mean_snr_db == res.snr_rows[i].mean_snr_db);
        CHECK(res2.snr_rows[i].ber == res.snr_rows[i].ber);
    }
    REQUIRE(res2.dist_rows.size() == res.dist_rows.size());
    for (std::size_t i = 0; i < res.dist_rows.size(); ++i) {
        CHECK(res2.dist_rows[i].ks_amplitude_vs_unjammed ==
              res.dist_rows[i].ks_amplitude_vs_unjammed);
        CHECK(res2.dist_rows[i].ks_phase_vs_unjammed ==
              res.dist_rows[i].ks_phase_vs_unjammed);
    }
    REQUIRE(res2.k_anonymity.rows.size() == res.k_anonymity.rows.size());
    for (std::size_t i = 0; i < res.k_anonymity.rows.size(); ++i)
        CHECK(res2.k_anonymity.rows[i].accuracy == res.k_anonymity.rows[i].accuracy);
    REQUIRE(res2.t_anonymity.rows.size() == res.t_anonymity.rows.size());
    for (std::size_t i = 0; i < res.t_anonymity.rows.size(); ++i)
        CHECK(res2.t_anonymity.rows[i].auc == res.t_anonymity.rows[i].auc);
    fs::remove_all(dir);
}

TEST_CASE("emitted tables are byte-stable and well-formed") {
    const rfveil::SweepResult& res = shared_analysis();

    const std::string dir_a = fresh_dir("rfveil_emit_a");
    const std::string dir_b = fresh_dir("rfveil_emit_b");
    const std::vector<std::string> paths_a =
        rfveil::emit_results(res, rfveil::EmitFormat::csv, dir_a);
    const std::vector<std::string> paths_b =
        rfveil::emit_results(res, rfveil::EmitFormat::csv, dir_b);

    const std::vector<std::string> expected_names = {
        "fig5_amplitude_cdf", "fig6_phase_cdf",       "fig7_snr_pdf",
        "fig8_snr_vs_rjp",    "fig10_accuracy_vs_rjp", "fig11_roc",
        "fig12_auc_vs_snr",   "fig13_radio_roc",       "flagged_cells"};
    REQUIRE(paths_a.size() == expected_names.size());
    for (std::size_t i = 0; i < expected_names.size(); ++i) {
        CHECK(fs::path(paths_a[i]).filename().string() == expected_names[i] + ".csv");
        CHECK(read_file(paths_a[i]) == read_file(paths_b[i]));  // byte-identical
    }

    const std::string fig10 = read_file(dir_a + "/fig10_accuracy_vs_rjp.csv");
    CHECK(fig10.substr(0, fig10.find('\n')) ==
          "rjp,attenuation_db,accuracy,ber,mean_snr_db");
    CHECK(csv_data_rows(fig10) == 3);
    CHECK(csv_data_rows(read_file(dir_a + "/fig8_snr_vs_rjp.csv")) == 6);
    CHECK(csv_data_rows(read_file(dir_a + "/fig13_radio_roc.csv")) == 0);  // cable run
    CHECK(csv_data_rows(read_file(dir_a + "/flagged_cells.csv")) == 0);

    SUBCASE("json mirrors the csv tables row for row") {
        const std::string dir_j = fresh_dir("rfveil_emit_json");
        const std::vector<std::string> jpaths =
            rfveil::emit_results(res, rfveil::EmitFormat::json, dir_j);
        REQUIRE(jpaths.size() == expected_names.size());
        for (std::size_t i = 0; i < jpaths.size(); ++i) {
            CHECK(fs::path(jpaths[i]).filename().string() == expected_names[i] + ".json");
            const nlohmann::json doc = nlohmann::json::parse(read_file(jpaths[i]));
            REQUIRE(doc.contains("rows"));
            REQUIRE(doc["rows"].is_array());
            CHECK(doc["rows"].size() ==
                  csv_data_rows(read_file(dir_a + "/" + expected_names[i] + ".csv")));
        }
        const nlohmann::json fig8 =
            nlohmann::json::parse(read_file(dir_j + "/fig8_snr_vs_rjp.json"));
        const auto& row0 = fig8["rows"][0];
        CHECK(row0.contains("device_id"));
        CHECK(row0.contains("rjp"));
        CHECK(row0.contains("attenuation_db"));
        CHECK(row0.contains("snr_db"));
        CHECK(row0.contains("ber"));
        CHECK(row0.contains("converged"));
        // The first ROC threshold is +infinity; JSON carries it as null.
        const nlohmann::json fig11 =
            nlohmann::json::parse(read_file(dir_j + "/fig11_roc.json"));
        REQUIRE(fig11["rows"].size() > 0);
        CHECK(fig11["rows"][0]["threshold"].is_null());
        fs::remove_all(dir_j);
    }

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("flagged cells vanish from every anonymity table") {
    rfveil::CaptureDataset tampered = shared_capture();
    // Pretend the strongest-jammer cell of device 0 had residual bit errors.
    for (auto& cell : tampered.cells)
        if (cell.key.device_id == 0 && cell.key.rjp_index == 2) {
            cell.flagged = true;
            cell.ber = 0.002;
        }

    const rfveil::SweepResult res = rfveil::analyze_dataset(tampered);

    REQUIRE(res.k_anonymity.rows.size() == 3);
    CHECK(!res.k_anonymity.rows[0].excluded);
    CHECK(!res.k_anonymity.rows[1].excluded);
    CHECK(res.k_anonymity.rows[2].excluded);

    const rfveil::TRow* t_tampered = find_t_row(res.t_anonymity.rows, 0, 0.3);
    const rfveil::TRow* t_clean = find_t_row(res.t_anonymity.rows, 1, 0.3);
    REQUIRE(t_tampered != nullptr);
    REQUIRE(t_clean != nullptr);
    CHECK(t_tampered->excluded);
    CHECK(!t_clean->excluded);

    const std::string dir = fresh_dir("rfveil_emit_flagged");
    rfveil::emit_results(res, rfveil::EmitFormat::csv, dir);
    CHECK(csv_data_rows(read_file(dir + "/fig10_accuracy_vs_rjp.csv")) == 2);
    CHECK(csv_data_rows(read_file(dir + "/flagged_cells.csv")) == 1);
    const std::string fig12 = read_file(dir + "/fig12_auc_vs_snr.csv");
    CHECK(csv_data_rows(fig12) == 5);  // six cells minus the flagged one

    const std::string flagged = read_file(dir + "/flagged_cells.csv");
    std::stringstream ss(flagged);
    std::string header, row;
    std::getline(ss, header);
    std::getline(ss, row);
    CHECK(header == "device_id,rjp,attenuation_db,converged,ber,snr_db");
    CHECK(row.substr(0, 6) == "0,0.3,");
    fs::remove_all(dir);
}

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "rfveil/capture.hpp"
#include "rfveil/config.hpp"

namespace {

namespace fs = std::filesystem;

rfveil::ExperimentConfig tiny_config() {
    rfveil::ExperimentConfig cfg = rfveil::cable_default_config();
    cfg.master_seed = 20240817;
    cfg.k = 2;
    cfg.rjp = {0.0, 0.2};
    cfg.attenuation_db = {20.0};
    cfg.symbols_per_cell = 30000;
    cfg.train_symbols_per_cell = 30000;
    cfg.stats_samples_per_cell = 20000;
    return cfg;
}

std::string fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    return p.string();
}

}  // namespace

TEST_CASE("cells are exactly reproducible and seed-separated") {
    const rfveil::ExperimentConfig cfg = tiny_config();
    const rfveil::DevicePool pool = rfveil::make_device_pool(cfg.k, cfg.master_seed);

    const rfveil::CellRecord a = rfveil::run_cell(cfg, pool.devices[0], 1, 0);
    const rfveil::CellRecord b = rfveil::run_cell(cfg, pool.devices[0], 1, 0);
    CHECK(a.seed_tx == b.seed_tx);
    CHECK(a.ber == b.ber);
    CHECK(a.snr_db == b.snr_db);
    CHECK(a.analysis_start == b.analysis_start);
    CHECK(a.symbols == b.symbols);
    CHECK(a.aligned_samples == b.aligned_samples);

    const rfveil::CellRecord other_dev = rfveil::run_cell(cfg, pool.devices[1], 1, 0);
    const rfveil::CellRecord other_rjp = rfveil::run_cell(cfg, pool.devices[0], 0, 0);
    CHECK(other_dev.seed_tx != a.seed_tx);
    CHECK(other_rjp.seed_tx != a.seed_tx);
    CHECK(other_dev.symbols != a.symbols);

    CHECK(a.key.device_id == 0);
    CHECK(a.key.rjp_index == 1);
    CHECK(a.rjp == 0.2);
    CHECK(a.attenuation_db == 20.0);
    REQUIRE(a.converged);
    CHECK(a.ber == 0.0);
    CHECK(!a.flagged);
    CHECK(a.symbols.size() == a.n_symbols_total - a.analysis_start);
    CHECK(a.aligned_samples.size() == cfg.stats_samples_per_cell);
}

TEST_CASE("captures cover the sweep grid in key order") {
    const rfveil::ExperimentConfig cfg = tiny_config();
    const rfveil::CaptureDataset ds = rfveil::run_capture(cfg);

    REQUIRE(ds.cells.size() == 4);  // 2 devices x 2 jamming powers x 1 attenuation
    CHECK(ds.pool.k() == 2);
    for (std::size_t i = 1; i < ds.cells.size(); ++i)
        CHECK(ds.cells[i - 1].key < ds.cells[i].key);

    for (int d = 0; d < 2; ++d)
        for (int r = 0; r < 2; ++r) {
            const rfveil::CellRecord* cell = ds.find(d, r, 0);
            REQUIRE(cell != nullptr);
            CHECK(cell->key.device_id == d);
            CHECK(cell->key.rjp_index == r);
            REQUIRE(cell->converged);
            CHECK(cell->ber == 0.0);
        }
    CHECK(ds.find(0, 0, 1) == nullptr);
    CHECK(ds.find(5, 0, 0) == nullptr);

    // Bench budget: 0.3 relative TX power sits near -0.3 dBm over a -25 dBm
    // floor, so unjammed cells must report close to 24.7 dB.
    for (int d = 0; d < 2; ++d) {
        const rfveil::CellRecord* unjammed = ds.find(d, 0, 0);
        const rfveil::CellRecord* jammed = ds.find(d, 1, 0);
        CHECK(std::abs(unjammed->snr_db - 24.7) < 2.0);
        CHECK(jammed->snr_db < unjammed->snr_db);
    }

    SUBCASE("a second capture of the same config is identical") {
        const rfveil::CaptureDataset ds2 = rfveil::run_capture(cfg);
        REQUIRE(ds2.cells.size() == ds.cells.size());
        for (std::size_t i = 0; i < ds.cells.size(); ++i) {
            CHECK(ds.cells[i].symbols == ds2.cells[i].symbols);
            CHECK(ds.cells[i].aligned_samples == ds2.cells[i].aligned_samples);
            CHECK(ds.cells[i].snr_db == ds2.cells[i].snr_db);
        }
    }

    SUBCASE("datasets round-trip through the on-disk layout") {
        const std::string dir = fresh_dir("rfveil_capture_roundtrip");
        rfveil::save_dataset(ds, dir);

        CHECK(fs::exists(fs::path(dir) / "config.txt"));
        const std::string base = rfveil::cell_basename(ds.cells[0].key);
        CHECK(base == "cell_d0_r0_a0");
        CHECK(fs::exists(fs::path(dir) / (base + ".iq")));
        CHECK(fs::exists(fs::path(dir) / (base + "_aligned.iq")));
        CHECK(fs::exists(fs::path(dir) / (base + ".json")));
        // Interleaved float32 I/Q: 8 bytes per stored symbol.
        CHECK(fs::file_size(fs::path(dir) / (base + ".iq")) ==
              8 * ds.cells[0].symbols.size());

        const rfveil::CaptureDataset back = rfveil::load_dataset(dir);
        CHECK(rfveil::config_to_text(back.config) == rfveil::config_to_text(ds.config));
        REQUIRE(back.pool.k() == ds.pool.k());
        for (int d = 0; d < ds.pool.k(); ++d) {
            CHECK(back.pool.devices[d].cfo_ppm == ds.pool.devices[d].cfo_ppm);
            CHECK(back.pool.devices[d].dc_offset == ds.pool.devices[d].dc_offset);
            CHECK(back.pool.devices[d].power_cal_offset_db ==
                  ds.pool.devices[d].power_cal_offset_db);
        }
        REQUIRE(back.cells.size() == ds.cells.size());
        for (std::size_t i = 0; i < ds.cells.size(); ++i) {
            const rfveil::CellRecord& x = ds.cells[i];
            const rfveil::CellRecord& y = back.cells[i];
            CHECK(x.key == y.key);
            CHECK(x.rjp == y.rjp);
            CHECK(x.attenuation_db == y.attenuation_db);
            CHECK(x.seed_tx == y.seed_tx);
            CHECK(x.seed_jam == y.seed_jam);
            CHECK(x.seed_chan == y.seed_chan);
            CHECK(x.n_symbols_total == y.n_symbols_total);
            CHECK(x.analysis_start == y.analysis_start);
            CHECK(x.ber == y.ber);
            CHECK(x.snr_db == y.snr_db);
            CHECK(x.converged == y.converged);
            CHECK(x.flagged == y.flagged);
            CHECK(x.symbols == y.symbols);            // float32 in, float32 out
            CHECK(x.aligned_samples == y.aligned_samples);
        }
        fs::remove_all(dir);
    }
}

TEST_CASE("capture rejects invalid experiments up front") {
    rfveil::ExperimentConfig bad = tiny_config();
    bad.k = 1;
    CHECK_THROWS_AS(rfveil::run_capture(bad), std::invalid_argument);

    rfveil::ExperimentConfig bad2 = tiny_config();
    bad2.rjp = {2.0};
    CHECK_THROWS_AS(rfveil::run_capture(bad2), std::invalid_argument);

    CHECK_THROWS_AS(rfveil::load_dataset("/nonexistent/rfveil_no_dataset"),
                    std::runtime_error);
}

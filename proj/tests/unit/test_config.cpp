#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rfveil/config.hpp"

namespace {

namespace fs = std::filesystem;

std::string temp_file(const std::string& name, const std::string& content) {
    const std::string path = (fs::temp_directory_path() / name).string();
    std::ofstream os(path);
    os << content;
    return path;
}

}  // namespace

TEST_CASE("presets describe the two bench setups") {
    const rfveil::ExperimentConfig cable = rfveil::cable_default_config();
    CHECK(cable.scenario == "cable");
    CHECK(cable.k == 5);
    CHECK(cable.tx_rel_power == 0.3);
    CHECK(cable.rx_rel_gain == 0.1);
    REQUIRE(cable.rjp.size() == 9);
    CHECK(cable.rjp.front() == 0.0);
    CHECK(cable.rjp.back() == 0.5);
    CHECK(cable.attenuation_db == std::vector<double>{20.0});
    CHECK(cable.sample_rate_hz == 2e6);
    CHECK(cable.sps == 4);
    CHECK(cable.image_size == 64);
    CHECK(cable.split_train + cable.split_val + cable.split_test ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_NOTHROW(rfveil::validate_config(cable));

    const rfveil::ExperimentConfig radio = rfveil::radio_default_config();
    CHECK(radio.scenario == "radio");
    CHECK(radio.tx_rel_power == 0.8);
    CHECK(radio.rx_rel_gain == 0.8);
    CHECK(radio.rjp == std::vector<double>{0.0, 1.0});
    CHECK(radio.attenuation_db == std::vector<double>{0.0, 20.0, 40.0});
    CHECK(radio.sample_rate_hz == 512e3);
    // Everything not overridden by the preset is shared with the cable setup.
    CHECK(radio.noise_floor_dbm == cable.noise_floor_dbm);
    CHECK(radio.sps == cable.sps);
    CHECK(radio.image_size == cable.image_size);
    CHECK_NOTHROW(rfveil::validate_config(radio));
}

TEST_CASE("parser reads key=value lines with comments and overrides") {
    const rfveil::ExperimentConfig empty = rfveil::parse_config_text("");
    CHECK(empty.scenario == "cable");
    CHECK(empty.k == rfveil::cable_default_config().k);

    const rfveil::ExperimentConfig cfg = rfveil::parse_config_text(
        "# experiment header comment\n"
        "  k = 3   # desk run\n"
        "\n"
        "rjp = 0, 0.25, 1\n"
        "master_seed = 123456789012345\n"
        "classifier.learning_rate = 0.0125\n");
    CHECK(cfg.k == 3);
    CHECK(cfg.rjp == std::vector<double>{0.0, 0.25, 1.0});
    CHECK(cfg.master_seed == 123456789012345ULL);
    CHECK(cfg.classifier.learning_rate == 0.0125);
    // Untouched keys keep their preset values.
    CHECK(cfg.tx_rel_power == 0.3);

    SUBCASE("the scenario preset applies before any other line") {
        const rfveil::ExperimentConfig r = rfveil::parse_config_text(
            "sample_rate_hz = 1e6\n"
            "scenario = radio\n");
        CHECK(r.scenario == "radio");
        CHECK(r.tx_rel_power == 0.8);        // from the radio preset
        CHECK(r.sample_rate_hz == 1e6);      // explicit line wins over preset
    }

    SUBCASE("later lines override earlier ones") {
        const rfveil::ExperimentConfig c = rfveil::parse_config_text("k = 3\nk = 7\n");
        CHECK(c.k == 7);
    }
}

TEST_CASE("parser rejects unknown keys and malformed lines") {
    CHECK_THROWS_AS(rfveil::parse_config_text("frobnicate = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("hello world\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("k = banana\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("rjp = 0.1,,0.2\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("rjp =\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("scenario = wifi\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("master_seed = twelve\n"), std::invalid_argument);
}

TEST_CASE("serialized configs parse back to the same experiment") {
    rfveil::ExperimentConfig cfg = rfveil::radio_default_config();
    cfg.master_seed = 77;
    cfg.k = 3;
    cfg.rjp = {0.0, 0.125, 1.0};
    cfg.attenuation_db = {0.0, 37.5};
    cfg.jammer_waveform = "single_tone";
    cfg.classifier.optimizer = "adam";
    cfg.classifier.learning_rate = 0.00075;
    cfg.autoencoder.bottleneck = 48;
    cfg.out_dir = "runs/demo";

    const std::string text = rfveil::config_to_text(cfg);
    const rfveil::ExperimentConfig back = rfveil::parse_config_text(text);
    CHECK(rfveil::config_to_text(back) == text);
    CHECK(back.scenario == "radio");
    CHECK(back.master_seed == 77);
    CHECK(back.k == 3);
    CHECK(back.rjp == cfg.rjp);
    CHECK(back.attenuation_db == cfg.attenuation_db);
    CHECK(back.jammer_waveform == "single_tone");
    CHECK(back.classifier.optimizer == "adam");
    CHECK(back.classifier.learning_rate == 0.00075);
    CHECK(back.autoencoder.bottleneck == 48);
    CHECK(back.out_dir == "runs/demo");
}

TEST_CASE("config files load from disk") {
    const std::string path = temp_file("rfveil_config_ok.cfg", "k = 4\nsps = 8\n");
    const rfveil::ExperimentConfig cfg = rfveil::load_config(path);
    CHECK(cfg.k == 4);
    CHECK(cfg.sps == 8);
    CHECK_THROWS_AS(rfveil::load_config("/nonexistent/rfveil_missing.cfg"),
                    std::runtime_error);
}

TEST_CASE("validation rejects out-of-range experiments") {
    using rfveil::ExperimentConfig;
    using rfveil::validate_config;

    auto broken = [](auto mutate) {
        ExperimentConfig c = rfveil::cable_default_config();
        mutate(c);
        return c;
    };

    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.k = 1; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.tx_rel_power = 0.005; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.tx_rel_power = 1.5; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.rx_rel_gain = 0.0; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.rx_rel_gain = 1.2; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.rjp = {0.5, -0.1}; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.rjp = {1.5}; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.attenuation_db = {-3.0}; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.jammer_waveform = "chirp"; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.sps = 1; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.sample_rate_hz = 0.0; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.split_val = 0.0; c.split_test = 0.4; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.split_train = 0.5; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.image_size = 30; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.samples_per_image = 0; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.distribution_bins = 1; })),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate_config(broken([](ExperimentConfig& c) { c.bound_half_width = 0.0; })),
                    std::invalid_argument);

    // The parser runs the same validation on its result.
    CHECK_THROWS_AS(rfveil::parse_config_text("sps = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(rfveil::parse_config_text("split_train = 0.9\n"), std::invalid_argument);
}

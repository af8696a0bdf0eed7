#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfveil {

struct ClassifierSettings {
    int epochs = 30;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    std::string optimizer = "sgd";
};

struct AutoencoderSettings {
    int epochs = 30;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    int bottleneck = 64;
    std::string optimizer = "sgd";
};

// Full description of one experiment; the flat key=value config file mirrors
// these fields one-to-one (nested structs use dotted keys).
struct ExperimentConfig {
    std::string scenario = "cable";  // "cable" | "radio"
    std::uint64_t master_seed = 1;
    int k = 5;
    double tx_rel_power = 0.3;
    double rx_rel_gain = 0.1;
    std::vector<double> rjp = {0.0, 0.03, 0.05, 0.07, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> attenuation_db = {20.0};
    std::string jammer_waveform = "gaussian_noise";  // | "single_tone"
    double jammer_tone_offset_hz = 50e3;
    double sample_rate_hz = 2e6;
    double carrier_freq_hz = 9e8;
    int sps = 4;
    double noise_floor_dbm = -25.0;
    std::size_t symbols_per_cell = 1000000;
    std::size_t train_symbols_per_cell = 1000000;  // used for the RJP=0 cells
    std::size_t stats_samples_per_cell = 200000;   // aligned-waveform samples kept
    std::size_t samples_per_image = 5000;
    int image_size = 64;
    double bound_half_width = 2.0;  // histogram plane is [-w, w] x [-w, w]
    double split_train = 0.6;
    double split_val = 0.2;
    double split_test = 0.2;
    int distribution_bins = 200;
    ClassifierSettings classifier;
    AutoencoderSettings autoencoder;
    std::string out_dir = "out";
};

// Scenario presets: cable (2 Msps, TX 0.3, RX 0.1, nine-point RJP sweep at
// 20 dB attenuation) and radio (512 ksps, TX 0.8, RX 0.8, RJP {0,1},
// attenuation {0,20,40}).
ExperimentConfig cable_default_config();
ExperimentConfig radio_default_config();

// key=value per line, '#' comments; unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);
void validate_config(const ExperimentConfig& cfg);

}  // namespace rfveil

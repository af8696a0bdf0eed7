#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfveil/imaging.hpp"
#include "rfveil/net.hpp"

namespace rfveil {

struct AutoencoderConfig {
    int image_size = 64;
    int bottleneck = 64;
    int epochs = 30;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    std::string optimizer = "sgd";
    std::uint64_t seed = 1;
};

struct AutoencoderMeta {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    std::vector<double> epoch_train_mse;
};

struct AutoencoderModel {
    Net net;
    AutoencoderConfig config;
    AutoencoderMeta meta;
};

// conv8-pool-conv16-pool encoder into a dense bottleneck, mirrored decoder
// with nearest upsampling, sigmoid output.  Rejects bottlenecks that do not
// compress (bottleneck >= pixel count).
Net build_autoencoder_net(const AutoencoderConfig& cfg);

AutoencoderModel train_autoencoder(const std::vector<FingerprintImage>& train_images,
                                   const AutoencoderConfig& cfg);

double reconstruction_error(AutoencoderModel& model, const FingerprintImage& image);

void save_autoencoder(const AutoencoderModel& model, const std::string& path);
AutoencoderModel load_autoencoder(const std::string& path, const AutoencoderConfig& cfg);

}  // namespace rfveil

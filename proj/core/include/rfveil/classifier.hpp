#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfveil/imaging.hpp"
#include "rfveil/net.hpp"

namespace rfveil {

struct LabeledImage {
    FingerprintImage image;
    int label = 0;
};

struct ClassifierConfig {
    int image_size = 64;
    int n_classes = 2;
    std::vector<int> conv_filters = {8, 16, 32};
    int epochs = 30;
    double learning_rate = 0.01;
    double momentum = 0.9;
    int batch_size = 32;
    std::string optimizer = "sgd";  // "sgd" | "adam"
    std::uint64_t seed = 1;
    bool use_bias = true;
};

struct TrainingMeta {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    int best_epoch = -1;
    double learning_rate = 0.0;
    double best_val_accuracy = 0.0;
    double final_train_accuracy = 0.0;
    std::vector<double> epoch_train_loss;
};

struct ClassifierModel {
    Net net;
    ClassifierConfig config;
    TrainingMeta meta;
};

// Builds the untrained conv->pool->relu stack ending in a linear layer of
// n_classes logits (softmax is applied at prediction / loss time).
Net build_classifier_net(const ClassifierConfig& cfg);

ClassifierModel train_classifier(const std::vector<LabeledImage>& train_set,
                                 const std::vector<LabeledImage>& val_set,
                                 const ClassifierConfig& cfg);

struct Prediction {
    int label = 0;
    std::vector<double> probabilities;
};

Prediction predict(ClassifierModel& model, const FingerprintImage& image);

struct AccuracyReport {
    double accuracy = 0.0;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

AccuracyReport evaluate_accuracy(ClassifierModel& model,
                                 const std::vector<LabeledImage>& test_set);

// Flattens image pixels to the double vector the nets consume.
std::vector<double> image_to_input(const FingerprintImage& image);

void save_classifier(const ClassifierModel& model, const std::string& path);
ClassifierModel load_classifier(const std::string& path, const ClassifierConfig& cfg);

}  // namespace rfveil

#include "rfveil/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rfveil/classifier.hpp"

namespace rfveil {

Net build_autoencoder_net(const AutoencoderConfig& cfg) {
    const int s = cfg.image_size;
    if (s % 4 != 0) throw std::invalid_argument("autoencoder: image size must be divisible by 4");
    if (cfg.bottleneck < 1) throw std::invalid_argument("autoencoder: bottleneck must be >= 1");
    if (static_cast<std::size_t>(cfg.bottleneck) >=
        static_cast<std::size_t>(s) * static_cast<std::size_t>(s))
        throw std::invalid_argument("autoencoder: bottleneck does not compress the input");

    Net net;
    Shape3 sh{s, s, 1};
    auto c1 = std::make_unique<Conv2D>(sh, 8);
    sh = c1->out_shape();
    net.add(std::move(c1));
    net.add(std::make_unique<Activation>(sh, ActKind::relu));
    auto p1 = std::make_unique<MaxPool2>(sh);
    sh = p1->out_shape();
    net.add(std::move(p1));

    auto c2 = std::make_unique<Conv2D>(sh, 16);
    sh = c2->out_shape();
    net.add(std::move(c2));
    net.add(std::make_unique<Activation>(sh, ActKind::relu));
    auto p2 = std::make_unique<MaxPool2>(sh);
    sh = p2->out_shape();
    net.add(std::move(p2));

    const int q = s / 4;
    const Shape3 flat{1, 1, static_cast<int>(sh.numel())};
    net.add(std::make_unique<Reshape>(sh, flat));
    net.add(std::make_unique<Dense>(flat, cfg.bottleneck));
    net.add(std::make_unique<Activation>(Shape3{1, 1, cfg.bottleneck}, ActKind::relu));

    const Shape3 dec_flat{1, 1, q * q * 8};
    net.add(std::make_unique<Dense>(Shape3{1, 1, cfg.bottleneck}, dec_flat.c));
    net.add(std::make_unique<Activation>(dec_flat, ActKind::relu));
    net.add(std::make_unique<Reshape>(dec_flat, Shape3{q, q, 8}));

    auto u1 = std::make_unique<Upsample2>(Shape3{q, q, 8});
    Shape3 us = u1->out_shape();
    net.add(std::move(u1));
    auto c3 = std::make_unique<Conv2D>(us, 8);
    us = c3->out_shape();
    net.add(std::move(c3));
    net.add(std::make_unique<Activation>(us, ActKind::relu));

    auto u2 = std::make_unique<Upsample2>(us);
    us = u2->out_shape();
    net.add(std::move(u2));
    auto c4 = std::make_unique<Conv2D>(us, 1);
    us = c4->out_shape();
    net.add(std::move(c4));
    net.add(std::make_unique<Activation>(us, ActKind::sigmoid));
    return net;
}

namespace {

std::vector<std::size_t> canonical_order(const std::vector<FingerprintImage>& images) {
    std::vector<std::size_t> idx(images.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(images[a].pixels.begin(), images[a].pixels.end(),
                                            images[b].pixels.begin(), images[b].pixels.end());
    });
    return idx;
}

void seeded_shuffle(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(idx[i - 1], idx[j]);
    }
}

}  // namespace

AutoencoderModel train_autoencoder(const std::vector<FingerprintImage>& train_images,
                                   const AutoencoderConfig& cfg) {
    if (train_images.empty()) throw std::invalid_argument("train_autoencoder: empty training set");
    for (const auto& img : train_images)
        if (img.size != cfg.image_size)
            throw std::invalid_argument("train_autoencoder: image size mismatch");

    AutoencoderModel model;
    model.config = cfg;
    model.net = build_autoencoder_net(cfg);
    Rng init_rng(derive_seed(cfg.seed, 0xAE17));
    model.net.init_weights(init_rng);

    SgdMomentum sgd(cfg.learning_rate, cfg.momentum);
    Adam adam(cfg.learning_rate);
    const bool use_adam = cfg.optimizer == "adam";
    if (!use_adam && cfg.optimizer != "sgd")
        throw std::invalid_argument("train_autoencoder: unknown optimizer " + cfg.optimizer);

    auto blocks = model.net.param_blocks();
    std::vector<std::size_t> order = canonical_order(train_images);
    const double n_px = static_cast<double>(model.net.input_shape().numel());

    model.meta.seed = cfg.seed;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0xAE50FF1E, static_cast<std::uint64_t>(epoch)));
        seeded_shuffle(order, shuffle_rng);
        double epoch_mse = 0.0;
        std::size_t n_seen = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            model.net.zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const std::vector<double> x = image_to_input(train_images[order[i]]);
                const std::vector<double> y = model.net.forward(x);
                double mse = 0.0;
                std::vector<double> grad(y.size());
                for (std::size_t j = 0; j < y.size(); ++j) {
                    const double d = y[j] - x[j];
                    mse += d * d;
                    grad[j] = 2.0 * d / n_px;
                }
                epoch_mse += mse / n_px;
                ++n_seen;
                model.net.backward(grad);
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            if (use_adam)
                adam.step(blocks, scale);
            else
                sgd.step(blocks, scale);
        }
        epoch_mse /= static_cast<double>(n_seen);
        if (!std::isfinite(epoch_mse)) throw TrainingDiverged(epoch);
        model.meta.epoch_train_mse.push_back(epoch_mse);
        model.meta.epochs_run = epoch + 1;
    }
    return model;
}

double reconstruction_error(AutoencoderModel& model, const FingerprintImage& image) {
    if (image.size != model.config.image_size)
        throw std::invalid_argument("reconstruction_error: image size mismatch");
    const std::vector<double> x = image_to_input(image);
    const std::vector<double> y = model.net.forward(x);
    double mse = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        const double d = y[j] - x[j];
        mse += d * d;
    }
    return mse / static_cast<double>(y.size());
}

void save_autoencoder(const AutoencoderModel& model, const std::string& path) {
    model.net.save(path);
}

AutoencoderModel load_autoencoder(const std::string& path, const AutoencoderConfig& cfg) {
    AutoencoderModel model;
    model.config = cfg;
    model.net = build_autoencoder_net(cfg);
    model.net.load(path);
    return model;
}

}  // namespace rfveil

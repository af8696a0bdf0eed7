#include "rfveil/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "rfveil/tensor.hpp"

namespace rfveil {

std::vector<double> image_to_input(const FingerprintImage& image) {
    std::vector<double> x(image.pixels.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(image.pixels[i]);
    return x;
}

Net build_classifier_net(const ClassifierConfig& cfg) {
    if (cfg.n_classes < 2) throw std::invalid_argument("classifier: need >= 2 classes");
    if (cfg.conv_filters.empty()) throw std::invalid_argument("classifier: need conv filters");
    Net net;
    Shape3 s{cfg.image_size, cfg.image_size, 1};
    for (int filters : cfg.conv_filters) {
        auto conv = std::make_unique<Conv2D>(s, filters, cfg.use_bias);
        s = conv->out_shape();
        net.add(std::move(conv));
        auto pool = std::make_unique<MaxPool2>(s);
        s = pool->out_shape();
        net.add(std::move(pool));
        net.add(std::make_unique<Activation>(s, ActKind::relu));
    }
    net.add(std::make_unique<Reshape>(s, Shape3{1, 1, static_cast<int>(s.numel())}));
    net.add(std::make_unique<Dense>(Shape3{1, 1, static_cast<int>(s.numel())}, cfg.n_classes,
                                    cfg.use_bias));
    return net;
}

namespace {

void check_classes_present(const std::vector<LabeledImage>& set, int n_classes,
                           const char* split_name) {
    std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
    for (const auto& li : set) {
        if (li.label < 0 || li.label >= n_classes)
            throw std::invalid_argument(std::string("train_classifier: label out of range in ") +
                                        split_name);
        seen[static_cast<std::size_t>(li.label)] = true;
    }
    for (int c = 0; c < n_classes; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw std::invalid_argument(std::string("train_classifier: class ") +
                                        std::to_string(c) + " missing from " + split_name);
}

// Canonical order independent of caller storage order: by label, then by
// lexicographic pixel comparison; the seeded shuffle then fully determines
// the batch sequence.
std::vector<std::size_t> canonical_order(const std::vector<LabeledImage>& set) {
    std::vector<std::size_t> idx(set.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (set[a].label != set[b].label) return set[a].label < set[b].label;
        return std::lexicographical_compare(
            set[a].image.pixels.begin(), set[a].image.pixels.end(),
            set[b].image.pixels.begin(), set[b].image.pixels.end());
    });
    return idx;
}

void seeded_shuffle(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = rng.uniform_index(i);
        std::swap(idx[i - 1], idx[j]);
    }
}

double eval_val_accuracy(Net& net, const std::vector<LabeledImage>& val_set) {
    std::size_t correct = 0;
    for (const auto& li : val_set) {
        const auto logits = net.forward(image_to_input(li.image));
        if (static_cast<int>(argmax(logits)) == li.label) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(val_set.size());
}

}  // namespace

ClassifierModel train_classifier(const std::vector<LabeledImage>& train_set,
                                 const std::vector<LabeledImage>& val_set,
                                 const ClassifierConfig& cfg) {
    if (train_set.empty() || val_set.empty())
        throw std::invalid_argument("train_classifier: empty split");
    {
        std::set<int> labels;
        for (const auto& li : train_set) labels.insert(li.label);
        if (labels.size() < 2) throw std::invalid_argument("train_classifier: need >= 2 classes");
    }
    check_classes_present(train_set, cfg.n_classes, "train split");
    check_classes_present(val_set, cfg.n_classes, "val split");
    for (const auto& li : train_set)
        if (li.image.size != cfg.image_size)
            throw std::invalid_argument("train_classifier: image size mismatch");

    ClassifierModel model;
    model.config = cfg;
    model.net = build_classifier_net(cfg);
    Rng init_rng(derive_seed(cfg.seed, 0x11A7));
    model.net.init_weights(init_rng);

    SgdMomentum sgd(cfg.learning_rate, cfg.momentum);
    Adam adam(cfg.learning_rate);
    const bool use_adam = cfg.optimizer == "adam";
    if (!use_adam && cfg.optimizer != "sgd")
        throw std::invalid_argument("train_classifier: unknown optimizer " + cfg.optimizer);

    auto blocks = model.net.param_blocks();
    std::vector<std::size_t> order = canonical_order(train_set);

    model.meta.seed = cfg.seed;
    model.meta.learning_rate = cfg.learning_rate;
    double best_val = -1.0;
    std::vector<std::vector<double>> best_weights;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(cfg.seed, 0x50FF1E, static_cast<std::uint64_t>(epoch)));
        seeded_shuffle(order, shuffle_rng);

        double epoch_loss = 0.0;
        std::size_t n_seen = 0, n_correct = 0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            model.net.zero_grads();
            for (std::size_t i = start; i < end; ++i) {
                const auto& li = train_set[order[i]];
                const auto logits = model.net.forward(image_to_input(li.image));
                const auto probs = softmax(logits);
                const double p_true = probs[static_cast<std::size_t>(li.label)];
                epoch_loss += -std::log(std::max(p_true, 1e-300));
                if (static_cast<int>(argmax(logits)) == li.label) ++n_correct;
                ++n_seen;
                std::vector<double> grad = probs;
                grad[static_cast<std::size_t>(li.label)] -= 1.0;
                model.net.backward(grad);
            }
            const double scale = 1.0 / static_cast<double>(end - start);
            if (use_adam)
                adam.step(blocks, scale);
            else
                sgd.step(blocks, scale);
        }
        epoch_loss /= static_cast<double>(n_seen);
        if (!std::isfinite(epoch_loss)) throw TrainingDiverged(epoch);
        model.meta.epoch_train_loss.push_back(epoch_loss);
        model.meta.final_train_accuracy =
            static_cast<double>(n_correct) / static_cast<double>(n_seen);

        const double val_acc = eval_val_accuracy(model.net, val_set);
        if (val_acc > best_val) {
            best_val = val_acc;
            best_weights = model.net.snapshot_weights();
            model.meta.best_epoch = epoch;
        }
        model.meta.epochs_run = epoch + 1;
    }
    if (!best_weights.empty()) model.net.restore_weights(best_weights);
    model.meta.best_val_accuracy = best_val;
    return model;
}

Prediction predict(ClassifierModel& model, const FingerprintImage& image) {
    if (image.size != model.config.image_size)
        throw std::invalid_argument("predict: image size mismatch");
    Prediction p;
    const auto logits = model.net.forward(image_to_input(image));
    p.probabilities = softmax(logits);
    p.label = static_cast<int>(argmax(p.probabilities));
    return p;
}

AccuracyReport evaluate_accuracy(ClassifierModel& model,
                                 const std::vector<LabeledImage>& test_set) {
    if (test_set.empty()) throw std::invalid_argument("evaluate_accuracy: empty test set");
    AccuracyReport rep;
    const std::size_t k = static_cast<std::size_t>(model.config.n_classes);
    rep.confusion.assign(k, std::vector<std::size_t>(k, 0));
    std::size_t correct = 0;
    for (const auto& li : test_set) {
        const Prediction p = predict(model, li.image);
        rep.confusion[static_cast<std::size_t>(li.label)][static_cast<std::size_t>(p.label)]++;
        if (p.label == li.label) ++correct;
    }
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(test_set.size());
    return rep;
}

void save_classifier(const ClassifierModel& model, const std::string& path) {
    model.net.save(path);
}

ClassifierModel load_classifier(const std::string& path, const ClassifierConfig& cfg) {
    ClassifierModel model;
    model.config = cfg;
    model.net = build_classifier_net(cfg);
    model.net.load(path);
    return model;
}

}  // namespace rfveil

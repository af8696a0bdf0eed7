#include "rfveil/gradcheck.hpp"

#include <cmath>
#include <stdexcept>

#include "rfveil/tensor.hpp"

namespace rfveil {

namespace {

double loss_only(Net& net, const std::vector<double>& input, const GradCheckOptions& opt) {
    const std::vector<double> out = net.forward(input);
    if (opt.loss == GradCheckLoss::softmax_cross_entropy) {
        const auto probs = softmax(out);
        return -std::log(std::max(probs[static_cast<std::size_t>(opt.class_label)], 1e-300));
    }
    const std::vector<double>& target = opt.mse_target.empty() ? input : opt.mse_target;
    if (target.size() != out.size())
        throw std::invalid_argument("gradient_check: MSE target size mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = out[i] - target[i];
        mse += d * d;
    }
    return mse / static_cast<double>(out.size());
}

}  // namespace

double gradient_check(Net& net, const std::vector<double>& input, const GradCheckOptions& opt) {
    auto blocks = net.param_blocks();
    if (blocks.empty()) throw std::invalid_argument("gradient_check: net has no parameters");

    // Analytic gradients.
    net.zero_grads();
    const std::vector<double> out = net.forward(input);
    std::vector<double> grad;
    if (opt.loss == GradCheckLoss::softmax_cross_entropy) {
        grad = softmax(out);
        grad[static_cast<std::size_t>(opt.class_label)] -= 1.0;
    } else {
        const std::vector<double>& target = opt.mse_target.empty() ? input : opt.mse_target;
        if (target.size() != out.size())
            throw std::invalid_argument("gradient_check: MSE target size mismatch");
        grad.resize(out.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            grad[i] = 2.0 * (out[i] - target[i]) / static_cast<double>(out.size());
    }
    net.backward(grad);
    if (opt.corrupt_block >= 0) {
        if (static_cast<std::size_t>(opt.corrupt_block) >= blocks.size())
            throw std::invalid_argument("gradient_check: corrupt_block out of range");
        for (auto& g : *blocks[static_cast<std::size_t>(opt.corrupt_block)].grads) g = -g;
    }

    Rng rng(opt.seed);
    double max_rel = 0.0;
    for (std::size_t probe = 0; probe < opt.n_probes; ++probe) {
        const std::size_t bi = static_cast<std::size_t>(rng.uniform_index(blocks.size()));
        auto& w = *blocks[bi].weights;
        if (w.empty()) continue;
        const std::size_t wi = static_cast<std::size_t>(rng.uniform_index(w.size()));
        const double analytic = (*blocks[bi].grads)[wi];

        const double saved = w[wi];
        w[wi] = saved + opt.step;
        const double lp = loss_only(net, input, opt);
        w[wi] = saved - opt.step;
        const double lm = loss_only(net, input, opt);
        w[wi] = saved;

        const double numeric = (lp - lm) / (2.0 * opt.step);
        const double denom = std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
        const double rel =
            (analytic == 0.0 && numeric == 0.0) ? 0.0 : std::abs(analytic - numeric) / denom;
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

}  // namespace rfveil

#pragma once

#include <cstdint>
#include <vector>

#include "rfveil/net.hpp"

namespace rfveil {

enum class GradCheckLoss { softmax_cross_entropy, mean_squared_error };

struct GradCheckOptions {
    GradCheckLoss loss = GradCheckLoss::softmax_cross_entropy;
    int class_label = 0;               // for cross-entropy
    std::vector<double> mse_target;    // for MSE (defaults to the input)
    std::size_t n_probes = 100;        // random parameters compared
    double step = 1e-4;                // central-difference step
    std::uint64_t seed = 7;
    int corrupt_block = -1;            // test hook: negate this block's gradients
};

// Compares backpropagated gradients against central finite differences on a
// random parameter subset.  Relative error per probe is
// |analytic - numeric| / max(|analytic| + |numeric|, 1e-6), and 0 when both
// vanish.  Returns the maximum over probes.
double gradient_check(Net& net, const std::vector<double>& input, const GradCheckOptions& opt);

}  // namespace rfveil

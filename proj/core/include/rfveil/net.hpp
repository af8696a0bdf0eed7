#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfveil/layers.hpp"
#include "rfveil/rng.hpp"

namespace rfveil {

struct TrainingDiverged : std::runtime_error {
    explicit TrainingDiverged(int epoch_)
        : std::runtime_error("training diverged (non-finite loss) at epoch " +
                             std::to_string(epoch_)),
          epoch(epoch_) {}
    int epoch;
};

// Sequential network over the Layer building blocks.  Single-sample forward
// and backward; gradients accumulate across calls until zero_grads().
class Net {
  public:
    Net& add(std::unique_ptr<Layer> layer);
    Shape3 input_shape() const;
    Shape3 output_shape() const;

    std::vector<double> forward(const std::vector<double>& x);
    // grad_out is dLoss/dOutput; returns dLoss/dInput.
    std::vector<double> backward(const std::vector<double>& grad_out);

    std::vector<ParamBlock> param_blocks();
    std::size_t n_params();
    void zero_grads();

    // He-style normal init scaled by fan-in, deterministic in rng state.
    void init_weights(Rng& rng);

    std::string architecture() const;  // stable descriptor string

    // Versioned binary container: magic, version, architecture string, then
    // per-block little-endian float32 weights.  load rejects mismatches.
    void save(const std::string& path) const;
    void load(const std::string& path);

    const std::vector<std::unique_ptr<Layer>>& layers() const { return layers_; }

    // Deep copy / restore of all weights (for best-epoch snapshots).
    std::vector<std::vector<double>> snapshot_weights();
    void restore_weights(const std::vector<std::vector<double>>& snap);

  private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

class SgdMomentum {
  public:
    SgdMomentum(double lr, double momentum) : lr_(lr), momentum_(momentum) {}
    // grad_scale multiplies accumulated gradients (e.g. 1/batch_size).
    void step(std::vector<ParamBlock>& blocks, double grad_scale);

  private:
    double lr_, momentum_;
    std::vector<std::vector<double>> velocity_;
};

class Adam {
  public:
    Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
    void step(std::vector<ParamBlock>& blocks, double grad_scale);

  private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

}  // namespace rfveil

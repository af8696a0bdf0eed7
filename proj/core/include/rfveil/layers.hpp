#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rfveil/tensor.hpp"

namespace rfveil {

struct ParamBlock {
    std::vector<double>* weights;
    std::vector<double>* grads;
    std::string name;
};

// Single-sample forward/backward building block.  backward must be called
// after forward on the same sample; weight gradients accumulate (+=) so that
// mini-batches can sum before an optimizer step.
class Layer {
  public:
    virtual ~Layer() = default;
    virtual Shape3 in_shape() const = 0;
    virtual Shape3 out_shape() const = 0;
    virtual void forward(const std::vector<double>& x, std::vector<double>& y) = 0;
    virtual void backward(const std::vector<double>& gy, std::vector<double>& gx) = 0;
    virtual void params(std::vector<ParamBlock>& out) {}
    // Stable architecture string; serialized models must match it exactly.
    virtual std::string descriptor() const = 0;
};

enum class ActKind { relu, tanh_act, sigmoid, linear };

class Conv2D : public Layer {
  public:
    Conv2D(Shape3 in, int out_channels, bool use_bias = true);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return {in_.h, in_.w, out_c_}; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    void params(std::vector<ParamBlock>& out) override;
    std::string descriptor() const override;

    std::vector<double> w, gw;  // [out_c][in_c][3][3]
    std::vector<double> b, gb;  // [out_c]

  private:
    Shape3 in_;
    int out_c_;
    bool use_bias_;
    std::vector<double> x_cache_;
};

class MaxPool2 : public Layer {
  public:
    explicit MaxPool2(Shape3 in);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return {in_.h / 2, in_.w / 2, in_.c}; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    std::string descriptor() const override;

  private:
    Shape3 in_;
    std::vector<std::size_t> argmax_;
};

class Activation : public Layer {
  public:
    Activation(Shape3 in, ActKind kind);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return in_; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    std::string descriptor() const override;

  private:
    Shape3 in_;
    ActKind kind_;
    std::vector<double> y_cache_;
};

class Dense : public Layer {
  public:
    Dense(Shape3 in, int out_units, bool use_bias = true);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return {1, 1, out_n_}; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    void params(std::vector<ParamBlock>& out) override;
    std::string descriptor() const override;

    std::vector<double> w, gw;  // [out][in]
    std::vector<double> b, gb;

  private:
    Shape3 in_;
    int out_n_;
    bool use_bias_;
    std::vector<double> x_cache_;
};

// Pure shape change (flatten or unflatten); element count must match.
class Reshape : public Layer {
  public:
    Reshape(Shape3 in, Shape3 out);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return out_; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    std::string descriptor() const override;

  private:
    Shape3 in_, out_;
};

// Nearest-neighbour 2x upsampling.
class Upsample2 : public Layer {
  public:
    explicit Upsample2(Shape3 in);
    Shape3 in_shape() const override { return in_; }
    Shape3 out_shape() const override { return {in_.h * 2, in_.w * 2, in_.c}; }
    void forward(const std::vector<double>& x, std::vector<double>& y) override;
    void backward(const std::vector<double>& gy, std::vector<double>& gx) override;
    std::string descriptor() const override;

  private:
    Shape3 in_;
};

}  // namespace rfveil

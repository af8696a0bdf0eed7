#include "rfveil/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfveil {

namespace {
std::string shape_str(const Shape3& s) {
    return std::to_string(s.h) + "x" + std::to_string(s.w) + "x" + std::to_string(s.c);
}
}  // namespace

// ---------------------------------------------------------------- Conv2D

Conv2D::Conv2D(Shape3 in, int out_channels, bool use_bias)
    : in_(in), out_c_(out_channels), use_bias_(use_bias) {
    if (out_channels < 1) throw std::invalid_argument("Conv2D: out_channels must be >= 1");
    const std::size_t nw = static_cast<std::size_t>(out_c_) * in_.c * 9;
    w.assign(nw, 0.0);
    gw.assign(nw, 0.0);
    b.assign(static_cast<std::size_t>(out_c_), 0.0);
    gb.assign(static_cast<std::size_t>(out_c_), 0.0);
}

void Conv2D::forward(const std::vector<double>& x, std::vector<double>& y) {
    x_cache_ = x;
    const int H = in_.h, W = in_.w, C = in_.c;
    y.assign(out_shape().numel(), 0.0);
    for (int oc = 0; oc < out_c_; ++oc) {
        double* yp = y.data() + static_cast<std::size_t>(oc) * H * W;
        if (use_bias_) {
            const double bias = b[static_cast<std::size_t>(oc)];
            for (int i = 0; i < H * W; ++i) yp[i] = bias;
        }
        for (int ic = 0; ic < C; ++ic) {
            const double* xp = x.data() + static_cast<std::size_t>(ic) * H * W;
            const double* wp = w.data() + (static_cast<std::size_t>(oc) * C + ic) * 9;
            for (int ky = -1; ky <= 1; ++ky) {
                for (int kx = -1; kx <= 1; ++kx) {
                    const double wv = wp[(ky + 1) * 3 + (kx + 1)];
                    if (wv == 0.0) continue;
                    const int y0 = std::max(0, -ky), y1 = std::min(H, H - ky);
                    const int x0 = std::max(0, -kx), x1 = std::min(W, W - kx);
                    for (int yy = y0; yy < y1; ++yy) {
                        double* yrow = yp + static_cast<std::size_t>(yy) * W;
                        const double* xrow = xp + static_cast<std::size_t>(yy + ky) * W + kx;
                        for (int xx = x0; xx < x1; ++xx) yrow[xx] += wv * xrow[xx];
                    }
                }
            }
        }
    }
}

void Conv2D::backward(const std::vector<double>& gy, std::vector<double>& gx) {
    const int H = in_.h, W = in_.w, C = in_.c;
    gx.assign(in_.numel(), 0.0);
    for (int oc = 0; oc < out_c_; ++oc) {
        const double* gyp = gy.data() + static_cast<std::size_t>(oc) * H * W;
        if (use_bias_) {
            double acc = 0.0;
            for (int i = 0; i < H * W; ++i) acc += gyp[i];
            gb[static_cast<std::size_t>(oc)] += acc;
        }
        for (int ic = 0; ic < C; ++ic) {
            const double* xp = x_cache_.data() + static_cast<std::size_t>(ic) * H * W;
            double* gxp = gx.data() + static_cast<std::size_t>(ic) * H * W;
            const std::size_t wbase = (static_cast<std::size_t>(oc) * C + ic) * 9;
            for (int ky = -1; ky <= 1; ++ky) {
                for (int kx = -1; kx <= 1; ++kx) {
                    const std::size_t wi = wbase + static_cast<std::size_t>((ky + 1) * 3 + (kx + 1));
                    const double wv = w[wi];
                    const int y0 = std::max(0, -ky), y1 = std::min(H, H - ky);
                    const int x0 = std::max(0, -kx), x1 = std::min(W, W - kx);
                    double wacc = 0.0;
                    for (int yy = y0; yy < y1; ++yy) {
                        const double* gyrow = gyp + static_cast<std::size_t>(yy) * W;
                        const double* xrow = xp + static_cast<std::size_t>(yy + ky) * W + kx;
                        double* gxrow = gxp + static_cast<std::size_t>(yy + ky) * W + kx;
                        for (int xx = x0; xx < x1; ++xx) {
                            wacc += gyrow[xx] * xrow[xx];
                            gxrow[xx] += wv * gyrow[xx];
                        }
                    }
                    gw[wi] += wacc;
                }
            }
        }
    }
}

void Conv2D::params(std::vector<ParamBlock>& out) {
    out.push_back({&w, &gw, "conv_w_" + shape_str(in_) + "_" + std::to_string(out_c_)});
    if (use_bias_)
        out.push_back({&b, &gb, "conv_b_" + shape_str(in_) + "_" + std::to_string(out_c_)});
}

std::string Conv2D::descriptor() const {
    return "conv3x3(" + shape_str(in_) + "->" + std::to_string(out_c_) +
           (use_bias_ ? ",bias" : ",nobias") + ")";
}

// ---------------------------------------------------------------- MaxPool2

MaxPool2::MaxPool2(Shape3 in) : in_(in) {
    if (in.h % 2 || in.w % 2)
        throw std::invalid_argument("MaxPool2: input height/width must be even");
}

void MaxPool2::forward(const std::vector<double>& x, std::vector<double>& y) {
    const int H = in_.h, W = in_.w, C = in_.c;
    const int OH = H / 2, OW = W / 2;
    y.resize(out_shape().numel());
    argmax_.resize(y.size());
    for (int c = 0; c < C; ++c) {
        const double* xp = x.data() + static_cast<std::size_t>(c) * H * W;
        double* yp = y.data() + static_cast<std::size_t>(c) * OH * OW;
        std::size_t* ap = argmax_.data() + static_cast<std::size_t>(c) * OH * OW;
        for (int oy = 0; oy < OH; ++oy) {
            for (int ox = 0; ox < OW; ++ox) {
                const std::size_t i00 = static_cast<std::size_t>(2 * oy) * W + 2 * ox;
                std::size_t best = i00;
                double v = xp[i00];
                const std::size_t cand[3] = {i00 + 1, i00 + static_cast<std::size_t>(W),
                                             i00 + static_cast<std::size_t>(W) + 1};
                for (std::size_t idx : cand)
                    if (xp[idx] > v) {
                        v = xp[idx];
                        best = idx;
                    }
                yp[static_cast<std::size_t>(oy) * OW + ox] = v;
                ap[static_cast<std::size_t>(oy) * OW + ox] =
                    static_cast<std::size_t>(c) * H * W + best;
            }
        }
    }
}

void MaxPool2::backward(const std::vector<double>& gy, std::vector<double>& gx) {
    gx.assign(in_.numel(), 0.0);
    for (std::size_t i = 0; i < gy.size(); ++i) gx[argmax_[i]] += gy[i];
}

std::string MaxPool2::descriptor() const { return "maxpool2(" + shape_str(in_) + ")"; }

// ---------------------------------------------------------------- Activation

Activation::Activation(Shape3 in, ActKind kind) : in_(in), kind_(kind) {}

void Activation::forward(const std::vector<double>& x, std::vector<double>& y) {
    y.resize(x.size());
    switch (kind_) {
        case ActKind::relu:
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
            break;
        case ActKind::tanh_act:
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
            break;
        case ActKind::sigmoid:
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
            break;
        case ActKind::linear:
            y = x;
            break;
    }
    y_cache_ = y;
}

void Activation::backward(const std::vector<double>& gy, std::vector<double>& gx) {
    gx.resize(gy.size());
    switch (kind_) {
        case ActKind::relu:
            for (std::size_t i = 0; i < gy.size(); ++i)
                gx[i] = y_cache_[i] > 0.0 ? gy[i] : 0.0;
            break;
        case ActKind::tanh_act:
            for (std::size_t i = 0; i < gy.size(); ++i)
                gx[i] = gy[i] * (1.0 - y_cache_[i] * y_cache_[i]);
            break;
        case ActKind::sigmoid:
            for (std::size_t i = 0; i < gy.size(); ++i)
                gx[i] = gy[i] * y_cache_[i] * (1.0 - y_cache_[i]);
            break;
        case ActKind::linear:
            gx = gy;
            break;
    }
}

std::string Activation::descriptor() const {
    const char* k = kind_ == ActKind::relu      ? "relu"
                    : kind_ == ActKind::tanh_act ? "tanh"
                    : kind_ == ActKind::sigmoid  ? "sigmoid"
                                                 : "linear";
    return std::string(k) + "(" + shape_str(in_) + ")";
}

// ---------------------------------------------------------------- Dense

Dense::Dense(Shape3 in, int out_units, bool use_bias)
    : in_(in), out_n_(out_units), use_bias_(use_bias) {
    if (out_units < 1) throw std::invalid_argument("Dense: out_units must be >= 1");
    w.assign(static_cast<std::size_t>(out_n_) * in_.numel(), 0.0);
    gw.assign(w.size(), 0.0);
    b.assign(static_cast<std::size_t>(out_n_), 0.0);
    gb.assign(b.size(), 0.0);
}

void Dense::forward(const std::vector<double>& x, std::vector<double>& y) {
    x_cache_ = x;
    const std::size_t in_n = in_.numel();
    y.resize(static_cast<std::size_t>(out_n_));
    for (int o = 0; o < out_n_; ++o) {
        const double* wp = w.data() + static_cast<std::size_t>(o) * in_n;
        double acc = use_bias_ ? b[static_cast<std::size_t>(o)] : 0.0;
        for (std::size_t i = 0; i < in_n; ++i) acc += wp[i] * x[i];
        y[static_cast<std::size_t>(o)] = acc;
    }
}

void Dense::backward(const std::vector<double>& gy, std::vector<double>& gx) {
    const std::size_t in_n = in_.numel();
    gx.assign(in_n, 0.0);
    for (int o = 0; o < out_n_; ++o) {
        const double g = gy[static_cast<std::size_t>(o)];
        if (use_bias_) gb[static_cast<std::size_t>(o)] += g;
        const double* wp = w.data() + static_cast<std::size_t>(o) * in_n;
        double* gwp = gw.data() + static_cast<std::size_t>(o) * in_n;
        for (std::size_t i = 0; i < in_n; ++i) {
            gwp[i] += g * x_cache_[i];
            gx[i] += g * wp[i];
        }
    }
}

void Dense::params(std::vector<ParamBlock>& out) {
    out.push_back({&w, &gw, "dense_w_" + std::to_string(in_.numel()) + "_" + std::to_string(out_n_)});
    if (use_bias_)
        out.push_back({&b, &gb, "dense_b_" + std::to_string(out_n_)});
}

std::string Dense::descriptor() const {
    return "dense(" + std::to_string(in_.numel()) + "->" + std::to_string(out_n_) +
           (use_bias_ ? ",bias" : ",nobias") + ")";
}

// ---------------------------------------------------------------- Reshape

Reshape::Reshape(Shape3 in, Shape3 out) : in_(in), out_(out) {
    if (in.numel() != out.numel())
        throw std::invalid_argument("Reshape: element count mismatch");
}

void Reshape::forward(const std::vector<double>& x, std::vector<double>& y) { y = x; }
void Reshape::backward(const std::vector<double>& gy, std::vector<double>& gx) { gx = gy; }

std::string Reshape::descriptor() const {
    return "reshape(" + shape_str(in_) + "->" + shape_str(out_) + ")";
}

// ---------------------------------------------------------------- Upsample2

Upsample2::Upsample2(Shape3 in) : in_(in) {}

void Upsample2::forward(const std::vector<double>& x, std::vector<double>& y) {
    const int H = in_.h, W = in_.w, C = in_.c;
    const int OH = 2 * H, OW = 2 * W;
    y.resize(out_shape().numel());
    for (int c = 0; c < C; ++c) {
        const double* xp = x.data() + static_cast<std::size_t>(c) * H * W;
        double* yp = y.data() + static_cast<std::size_t>(c) * OH * OW;
        for (int iy = 0; iy < H; ++iy) {
            for (int ix = 0; ix < W; ++ix) {
                const double v = xp[static_cast<std::size_t>(iy) * W + ix];
                double* q = yp + static_cast<std::size_t>(2 * iy) * OW + 2 * ix;
                q[0] = v;
                q[1] = v;
                q[OW] = v;
                q[OW + 1] = v;
            }
        }
    }
}

void Upsample2::backward(const std::vector<double>& gy, std::vector<double>& gx) {
    const int H = in_.h, W = in_.w, C = in_.c;
    const int OW = 2 * W;
    gx.resize(in_.numel());
    for (int c = 0; c < C; ++c) {
        const double* gp = gy.data() + static_cast<std::size_t>(c) * 4 * H * W;
        double* xp = gx.data() + static_cast<std::size_t>(c) * H * W;
        for (int iy = 0; iy < H; ++iy) {
            for (int ix = 0; ix < W; ++ix) {
                const double* q = gp + static_cast<std::size_t>(2 * iy) * OW + 2 * ix;
                xp[static_cast<std::size_t>(iy) * W + ix] = q[0] + q[1] + q[OW] + q[OW + 1];
            }
        }
    }
}

std::string Upsample2::descriptor() const { return "upsample2(" + shape_str(in_) + ")"; }

}  // namespace rfveil

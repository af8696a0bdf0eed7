#include "rfveil/net.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace rfveil {

Net& Net::add(std::unique_ptr<Layer> layer) {
    if (!layers_.empty() && !(layers_.back()->out_shape() == layer->in_shape()))
        throw std::invalid_argument("Net::add: shape mismatch at layer " +
                                    layer->descriptor());
    layers_.push_back(std::move(layer));
    return *this;
}

Shape3 Net::input_shape() const {
    if (layers_.empty()) throw std::logic_error("Net: empty");
    return layers_.front()->in_shape();
}

Shape3 Net::output_shape() const {
    if (layers_.empty()) throw std::logic_error("Net: empty");
    return layers_.back()->out_shape();
}

std::vector<double> Net::forward(const std::vector<double>& x) {
    if (x.size() != input_shape().numel())
        throw std::invalid_argument("Net::forward: input size mismatch");
    std::vector<double> a = x, b;
    for (auto& layer : layers_) {
        layer->forward(a, b);
        std::swap(a, b);
    }
    return a;
}

std::vector<double> Net::backward(const std::vector<double>& grad_out) {
    std::vector<double> g = grad_out, h;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
        (*it)->backward(g, h);
        std::swap(g, h);
    }
    return g;
}

std::vector<ParamBlock> Net::param_blocks() {
    std::vector<ParamBlock> out;
    for (auto& layer : layers_) layer->params(out);
    return out;
}

std::size_t Net::n_params() {
    std::size_t n = 0;
    for (auto& blk : param_blocks()) n += blk.weights->size();
    return n;
}

void Net::zero_grads() {
    for (auto& blk : param_blocks())
        std::fill(blk.grads->begin(), blk.grads->end(), 0.0);
}

void Net::init_weights(Rng& rng) {
    for (auto& layer : layers_) {
        if (auto* conv = dynamic_cast<Conv2D*>(layer.get())) {
            const double fan_in = static_cast<double>(conv->in_shape().c) * 9.0;
            const double std_dev = std::sqrt(2.0 / fan_in);
            for (auto& v : conv->w) v = std_dev * rng.gaussian();
            std::fill(conv->b.begin(), conv->b.end(), 0.0);
        } else if (auto* dense = dynamic_cast<Dense*>(layer.get())) {
            const double fan_in = static_cast<double>(dense->in_shape().numel());
            const double std_dev = std::sqrt(2.0 / fan_in);
            for (auto& v : dense->w) v = std_dev * rng.gaussian();
            std::fill(dense->b.begin(), dense->b.end(), 0.0);
        }
    }
}

std::string Net::architecture() const {
    std::string s;
    for (const auto& layer : layers_) {
        if (!s.empty()) s += "|";
        s += layer->descriptor();
    }
    return s;
}

namespace {
constexpr std::uint32_t kMagic = 0x4E564652;  // "RFVN" little-endian
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xFF),
                          static_cast<unsigned char>((v >> 8) & 0xFF),
                          static_cast<unsigned char>((v >> 16) & 0xFF),
                          static_cast<unsigned char>((v >> 24) & 0xFF)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}
}  // namespace

void Net::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("Net::save: cannot open " + path);
    write_u32(os, kMagic);
    write_u32(os, kVersion);
    const std::string arch = architecture();
    write_u32(os, static_cast<std::uint32_t>(arch.size()));
    os.write(arch.data(), static_cast<std::streamsize>(arch.size()));
    auto blocks = const_cast<Net*>(this)->param_blocks();
    write_u32(os, static_cast<std::uint32_t>(blocks.size()));
    for (const auto& blk : blocks) {
        write_u32(os, static_cast<std::uint32_t>(blk.weights->size()));
        for (double d : *blk.weights) {
            const float f = static_cast<float>(d);
            write_u32(os, std::bit_cast<std::uint32_t>(f));
        }
    }
    if (!os) throw std::runtime_error("Net::save: write failed for " + path);
}

void Net::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("Net::load: cannot open " + path);
    if (read_u32(is) != kMagic) throw std::runtime_error("Net::load: bad magic in " + path);
    if (read_u32(is) != kVersion)
        throw std::runtime_error("Net::load: unsupported version in " + path);
    const std::uint32_t arch_len = read_u32(is);
    std::string arch(arch_len, '\0');
    is.read(arch.data(), arch_len);
    if (arch != architecture())
        throw std::runtime_error("Net::load: architecture mismatch: file has '" + arch +
                                 "', net is '" + architecture() + "'");
    auto blocks = param_blocks();
    const std::uint32_t n_blocks = read_u32(is);
    if (n_blocks != blocks.size()) throw std::runtime_error("Net::load: block count mismatch");
    for (auto& blk : blocks) {
        const std::uint32_t n = read_u32(is);
        if (n != blk.weights->size())
            throw std::runtime_error("Net::load: block size mismatch in " + blk.name);
        for (auto& d : *blk.weights) {
            const float f = std::bit_cast<float>(read_u32(is));
            d = static_cast<double>(f);
        }
    }
    if (!is) throw std::runtime_error("Net::load: truncated file " + path);
}

std::vector<std::vector<double>> Net::snapshot_weights() {
    std::vector<std::vector<double>> snap;
    for (auto& blk : param_blocks()) snap.push_back(*blk.weights);
    return snap;
}

void Net::restore_weights(const std::vector<std::vector<double>>& snap) {
    auto blocks = param_blocks();
    if (snap.size() != blocks.size())
        throw std::invalid_argument("Net::restore_weights: snapshot mismatch");
    for (std::size_t i = 0; i < blocks.size(); ++i) *blocks[i].weights = snap[i];
}

void SgdMomentum::step(std::vector<ParamBlock>& blocks, double grad_scale) {
    if (velocity_.size() != blocks.size()) {
        velocity_.clear();
        for (const auto& blk : blocks) velocity_.emplace_back(blk.weights->size(), 0.0);
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& w = *blocks[i].weights;
        const auto& g = *blocks[i].grads;
        auto& v = velocity_[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            v[j] = momentum_ * v[j] - lr_ * g[j] * grad_scale;
            w[j] += v[j];
        }
    }
}

void Adam::step(std::vector<ParamBlock>& blocks, double grad_scale) {
    if (m_.size() != blocks.size()) {
        m_.clear();
        v_.clear();
        for (const auto& blk : blocks) {
            m_.emplace_back(blk.weights->size(), 0.0);
            v_.emplace_back(blk.weights->size(), 0.0);
        }
    }
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        auto& w = *blocks[i].weights;
        const auto& gr = *blocks[i].grads;
        for (std::size_t j = 0; j < w.size(); ++j) {
            const double g = gr[j] * grad_scale;
            m_[i][j] = beta1_ * m_[i][j] + (1.0 - beta1_) * g;
            v_[i][j] = beta2_ * v_[i][j] + (1.0 - beta2_) * g * g;
            const double mh = m_[i][j] / bc1;
            const double vh = v_[i][j] / bc2;
            w[j] -= lr_ * mh / (std::sqrt(vh) + eps_);
        }
    }
}

}  // namespace rfveil

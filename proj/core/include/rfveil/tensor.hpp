#pragma once

#include <cstddef>
#include <vector>

namespace rfveil {

// Height x width x channels descriptor for layer activations, stored flat in
// channel-major order: index = (c*h + y)*w + x.
struct Shape3 {
    int h = 1, w = 1, c = 1;
    std::size_t numel() const {
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
               static_cast<std::size_t>(c);
    }
    bool operator==(const Shape3& o) const { return h == o.h && w == o.w && c == o.c; }
};

// Numerically stable softmax (subtracts the max logit).
std::vector<double> softmax(const std::vector<double>& logits);

std::size_t argmax(const std::vector<double>& v);  // ties -> lowest index

}  // namespace rfveil

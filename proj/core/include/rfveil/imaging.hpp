#pragma once

#include <cstddef>
#include <vector>

#include "rfveil/types.hpp"

namespace rfveil {

struct PlaneBounds {
    double i_min = -2.0, i_max = 2.0;
    double q_min = -2.0, q_max = 2.0;
};

// 2D histogram of an I/Q window, max-normalized to [0,1].  peak_count keeps
// the normalizer so raw counts are recoverable; n_clipped counts samples that
// fell outside the bounds (they are accumulated into the edge bins).
struct FingerprintImage {
    int size = 224;
    std::vector<float> pixels;  // row-major, rows indexed by Q, columns by I
    std::size_t n_source_samples = 0;
    PlaneBounds bounds;
    double peak_count = 0.0;
    std::size_t n_clipped = 0;

    float at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(size) +
                      static_cast<std::size_t>(col)];
    }
};

FingerprintImage iq_to_image(const std::vector<Complex>& window, int size,
                             const PlaneBounds& bounds);

// Slide a window of samples_per_image across the stream; stride defaults to
// the window length (non-overlapping), ragged tail discarded.
std::vector<FingerprintImage> batch_windows(const std::vector<Complex>& symbols,
                                            std::size_t samples_per_image,
                                            std::size_t stride, int size,
                                            const PlaneBounds& bounds);

}  // namespace rfveil

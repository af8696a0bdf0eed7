#include "rfveil/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfveil {

FingerprintImage iq_to_image(const std::vector<Complex>& window, int size,
                             const PlaneBounds& bounds) {
    if (window.empty()) throw std::invalid_argument("iq_to_image: empty window");
    if (size < 2) throw std::invalid_argument("iq_to_image: size must be >= 2");
    if (!(bounds.i_max > bounds.i_min) || !(bounds.q_max > bounds.q_min))
        throw std::invalid_argument("iq_to_image: degenerate bounds");

    FingerprintImage img;
    img.size = size;
    img.bounds = bounds;
    img.n_source_samples = window.size();
    const std::size_t n_px = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
    std::vector<double> counts(n_px, 0.0);

    const double i_scale = size / (bounds.i_max - bounds.i_min);
    const double q_scale = size / (bounds.q_max - bounds.q_min);
    for (const auto& z : window) {
        int col = static_cast<int>((z.real() - bounds.i_min) * i_scale);
        int row = static_cast<int>((z.imag() - bounds.q_min) * q_scale);
        const bool outside = z.real() < bounds.i_min || z.real() > bounds.i_max ||
                             z.imag() < bounds.q_min || z.imag() > bounds.q_max;
        if (outside) ++img.n_clipped;
        col = std::clamp(col, 0, size - 1);
        row = std::clamp(row, 0, size - 1);
        counts[static_cast<std::size_t>(row) * static_cast<std::size_t>(size) +
               static_cast<std::size_t>(col)] += 1.0;
    }

    img.peak_count = *std::max_element(counts.begin(), counts.end());
    img.pixels.resize(n_px);
    const double inv = img.peak_count > 0.0 ? 1.0 / img.peak_count : 0.0;
    for (std::size_t i = 0; i < n_px; ++i)
        img.pixels[i] = static_cast<float>(counts[i] * inv);
    return img;
}

std::vector<FingerprintImage> batch_windows(const std::vector<Complex>& symbols,
                                            std::size_t samples_per_image,
                                            std::size_t stride, int size,
                                            const PlaneBounds& bounds) {
    if (stride < 1) throw std::invalid_argument("batch_windows: stride must be >= 1");
    if (samples_per_image < 1)
        throw std::invalid_argument("batch_windows: samples_per_image must be >= 1");
    std::vector<FingerprintImage> out;
    if (symbols.size() < samples_per_image) return out;
    const std::size_t n_images = (symbols.size() - samples_per_image) / stride + 1;
    out.reserve(n_images);
    for (std::size_t k = 0; k < n_images; ++k) {
        const auto begin = symbols.begin() + static_cast<std::ptrdiff_t>(k * stride);
        std::vector<Complex> window(begin, begin + static_cast<std::ptrdiff_t>(samples_per_image));
        out.push_back(iq_to_image(window, size, bounds));
    }
    return out;
}

}  // namespace rfveil

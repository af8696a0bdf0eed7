#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rfveil {

using Complex = std::complex<double>;

// A block of complex baseband samples together with the rates needed to
// interpret them.
struct SampleBuffer {
    std::vector<Complex> samples;
    double sample_rate_hz = 2.0e6;
    double carrier_freq_hz = 9.0e8;
};

inline double db_to_linear_power(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_power_to_db(double p) { return 10.0 * std::log10(p); }
inline double db_to_linear_amplitude(double db) { return std::pow(10.0, db / 20.0); }

// Mean per-sample power of a buffer, 0 for an empty buffer.
double mean_power(const std::vector<Complex>& v);

}  // namespace rfveil

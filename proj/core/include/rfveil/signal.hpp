#pragma once

#include <cstdint>
#include <vector>

#include "rfveil/types.hpp"

namespace rfveil {

// Known test message: N repetitions of the 256-byte counting pattern
// 0x00..0xFF, expanded MSB-first into bits.
struct Message {
    std::vector<std::uint8_t> payload;
    std::vector<std::uint8_t> bits;  // one 0/1 per entry, MSB-first per byte
};

Message generate_message(std::size_t repetitions);

struct ModulationParams {
    double carrier_freq_hz = 9.0e8;
    double amplitude = 1.0;
    double phase_offset_rad = 0.0;
    int samples_per_symbol = 4;
    double rolloff = 0.35;
    int filter_span_symbols = 11;
    double sample_rate_hz = 2.0e6;
    bool pulse_shaping = true;  // false = sample-and-hold impulse test mode
};

// Root-raised-cosine taps, span_symbols*sps + 1 entries, symmetric, unit
// energy (sum of squares = 1).
std::vector<double> rrc_taps(int samples_per_symbol, double rolloff, int span_symbols);

// Antipodal mapping: bit 0 -> +1, bit 1 -> -1.
std::vector<double> bpsk_symbols(const Message& msg);

// Upsample symbols by sps and convolve with taps ("same" alignment: output
// sample k*sps sits at the center-tap response of symbol k).  Each symbol
// contributes symbol_amplitude * taps to the waveform.
std::vector<Complex> shape_symbols(const std::vector<double>& symbols,
                                   const std::vector<double>& taps, int sps,
                                   double symbol_amplitude);

// Worst-case peak magnitude of shape_symbols output with unit symbol
// amplitude: max over sampling phases of the sum of |taps| at symbol spacing.
double waveform_peak_bound(const std::vector<double>& taps, int sps);

// Full modulator: message -> RRC-shaped BPSK baseband, scaled so the peak
// magnitude cannot exceed params.amplitude for any message, then rotated by
// phase_offset_rad.
SampleBuffer modulate_bpsk(const Message& msg, const ModulationParams& params);

// Centered FIR filtering with the given (matched) taps; output length equals
// input length.
SampleBuffer matched_filter(const SampleBuffer& in, const std::vector<double>& taps);

}  // namespace rfveil

#pragma once

#include <cstdint>
#include <vector>

#include "rfveil/device.hpp"
#include "rfveil/types.hpp"

namespace rfveil {

enum class JammerWaveform { gaussian_noise, single_tone };

struct JammerConfig {
    double relative_jamming_power = 0.0;  // RJP in [0,1]; 0 = jammer off
    double attenuation_db = 0.0;
    JammerWaveform waveform = JammerWaveform::gaussian_noise;
    double tone_offset_hz = 50e3;  // baseband offset for single_tone
    std::uint64_t seed = 0;
};

enum class ChannelKind { cable, radio };

struct MultipathTap {
    int delay_samples = 0;
    Complex gain = {1.0, 0.0};
};

struct ChannelConfig {
    ChannelKind kind = ChannelKind::cable;
    double noise_floor_dbm = -25.0;
    std::vector<MultipathTap> multipath_taps;  // empty for cable
    double rx_gain_rel = 1.0;
};

// Jammer baseband of n samples.  Average per-sample power equals the Table-2
// dBm at RJP minus attenuation_db, on the simulation scale where 0 dBm is
// linear power 1.  RJP = 0 yields exact zeros.
SampleBuffer synthesize_jammer(std::size_t n_samples, double sample_rate_hz,
                               const JammerConfig& cfg, const PowerMap& map);

// Element-wise sum (the RF combiner is linear, no normalization).
SampleBuffer combine(const SampleBuffer& tx, const SampleBuffer& jam);

// Cable: AWGN at the noise floor, then rx gain.  Radio: multipath FIR, then
// AWGN, then rx gain.  Deterministic in seed.
SampleBuffer apply_channel(const SampleBuffer& sig, const ChannelConfig& cfg,
                           std::uint64_t seed);

// Gentle 3-tap office-style multipath: delays 0,1,2 samples, exponentially
// decaying magnitudes with seeded random phases, normalized to unit total
// power.
std::vector<MultipathTap> default_radio_taps(std::uint64_t seed);

}  // namespace rfveil

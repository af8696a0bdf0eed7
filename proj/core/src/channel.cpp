#include "rfveil/channel.hpp"

#include <cmath>
#include <stdexcept>

#include "rfveil/rng.hpp"

namespace rfveil {

SampleBuffer synthesize_jammer(std::size_t n_samples, double sample_rate_hz,
                               const JammerConfig& cfg, const PowerMap& map) {
    if (n_samples == 0) throw std::invalid_argument("synthesize_jammer: n_samples must be > 0");
    SampleBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    if (cfg.relative_jamming_power == 0.0) {
        out.samples.assign(n_samples, Complex(0.0, 0.0));
        return out;
    }
    const double dbm = relative_power_to_dbm(cfg.relative_jamming_power, map) - cfg.attenuation_db;
    const double power = db_to_linear_power(dbm);
    out.samples.resize(n_samples);
    Rng rng(cfg.seed);
    if (cfg.waveform == JammerWaveform::gaussian_noise) {
        for (auto& z : out.samples) z = rng.complex_gaussian(power);
    } else {
        const double amp = std::sqrt(power);
        const double dphi = 2.0 * M_PI * cfg.tone_offset_hz / sample_rate_hz;
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        for (auto& z : out.samples) {
            z = std::polar(amp, phi);
            phi += dphi;
        }
    }
    return out;
}

SampleBuffer combine(const SampleBuffer& tx, const SampleBuffer& jam) {
    if (tx.samples.size() != jam.samples.size())
        throw std::invalid_argument("combine: length mismatch");
    if (tx.sample_rate_hz != jam.sample_rate_hz)
        throw std::invalid_argument("combine: sample rate mismatch");
    SampleBuffer out = tx;
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] += jam.samples[i];
    return out;
}

SampleBuffer apply_channel(const SampleBuffer& sig, const ChannelConfig& cfg,
                           std::uint64_t seed) {
    if (sig.samples.empty()) throw std::invalid_argument("apply_channel: empty input");
    if (cfg.kind == ChannelKind::cable && !cfg.multipath_taps.empty())
        throw std::invalid_argument("apply_channel: cable channel must have no multipath taps");
    if (cfg.kind == ChannelKind::radio &&
        (cfg.multipath_taps.empty() || cfg.multipath_taps.front().delay_samples != 0))
        throw std::invalid_argument("apply_channel: radio channel needs taps with tap[0].delay = 0");

    SampleBuffer out;
    out.sample_rate_hz = sig.sample_rate_hz;
    out.carrier_freq_hz = sig.carrier_freq_hz;
    const std::size_t n = sig.samples.size();

    if (cfg.kind == ChannelKind::radio) {
        out.samples.assign(n, Complex(0.0, 0.0));
        for (const auto& tap : cfg.multipath_taps) {
            const std::size_t d = static_cast<std::size_t>(tap.delay_samples);
            for (std::size_t i = d; i < n; ++i) out.samples[i] += tap.gain * sig.samples[i - d];
        }
    } else {
        out.samples = sig.samples;
    }

    const double noise_power = db_to_linear_power(cfg.noise_floor_dbm);
    if (noise_power > 0.0) {
        Rng rng(seed);
        for (auto& z : out.samples) z += rng.complex_gaussian(noise_power);
    }
    if (cfg.rx_gain_rel != 1.0) {
        for (auto& z : out.samples) z *= cfg.rx_gain_rel;
    }
    return out;
}

std::vector<MultipathTap> default_radio_taps(std::uint64_t seed) {
    Rng rng(derive_seed(seed, 0x7A95ULL));
    std::vector<MultipathTap> taps(3);
    const double mags[3] = {1.0, 0.3, 0.1};
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
        taps[i].delay_samples = i;
        const double ang = (i == 0) ? 0.0 : rng.uniform(0.0, 2.0 * M_PI);
        taps[i].gain = std::polar(mags[i], ang);
        total += mags[i] * mags[i];
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& t : taps) t.gain *= scale;
    return taps;
}

}  // namespace rfveil

#include "rfveil/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace rfveil {

Message generate_message(std::size_t repetitions) {
    if (repetitions < 1) throw std::invalid_argument("generate_message: repetitions must be >= 1");
    Message msg;
    msg.payload.reserve(256 * repetitions);
    for (std::size_t r = 0; r < repetitions; ++r)
        for (int b = 0; b < 256; ++b) msg.payload.push_back(static_cast<std::uint8_t>(b));
    msg.bits.reserve(msg.payload.size() * 8);
    for (std::uint8_t byte : msg.payload)
        for (int k = 7; k >= 0; --k) msg.bits.push_back(static_cast<std::uint8_t>((byte >> k) & 1));
    return msg;
}

std::vector<double> rrc_taps(int sps, double rolloff, int span_symbols) {
    if (sps < 2) throw std::invalid_argument("rrc_taps: samples_per_symbol must be >= 2");
    if (rolloff <= 0.0 || rolloff > 1.0) throw std::invalid_argument("rrc_taps: rolloff must be in (0,1]");
    if (span_symbols < 1) throw std::invalid_argument("rrc_taps: span must be >= 1");
    const int n = span_symbols * sps + 1;
    const int mid = n / 2;
    std::vector<double> h(n);
    const double beta = rolloff;
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k - mid) / sps;  // in symbol periods
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 - beta + 4.0 * beta / M_PI;
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-9) {
            const double a = M_PI / (4.0 * beta);
            v = (beta / std::sqrt(2.0)) *
                ((1.0 + 2.0 / M_PI) * std::sin(a) + (1.0 - 2.0 / M_PI) * std::cos(a));
        } else {
            const double num = std::sin(M_PI * t * (1.0 - beta)) +
                               4.0 * beta * t * std::cos(M_PI * t * (1.0 + beta));
            const double den = M_PI * t * (1.0 - (4.0 * beta * t) * (4.0 * beta * t));
            v = num / den;
        }
        h[k] = v;
    }
    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= scale;
    return h;
}

std::vector<double> bpsk_symbols(const Message& msg) {
    std::vector<double> sym;
    sym.reserve(msg.bits.size());
    for (std::uint8_t b : msg.bits) sym.push_back(b ? -1.0 : 1.0);
    return sym;
}

std::vector<Complex> shape_symbols(const std::vector<double>& symbols,
                                   const std::vector<double>& taps, int sps,
                                   double symbol_amplitude) {
    const std::size_t n_out = symbols.size() * static_cast<std::size_t>(sps);
    const int mid = static_cast<int>(taps.size()) / 2;
    std::vector<double> acc(n_out, 0.0);
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        const double a = symbols[k] * symbol_amplitude;
        const long base = static_cast<long>(k) * sps - mid;
        for (std::size_t j = 0; j < taps.size(); ++j) {
            const long idx = base + static_cast<long>(j);
            if (idx < 0 || idx >= static_cast<long>(n_out)) continue;
            acc[static_cast<std::size_t>(idx)] += a * taps[j];
        }
    }
    std::vector<Complex> out(n_out);
    for (std::size_t i = 0; i < n_out; ++i) out[i] = Complex(acc[i], 0.0);
    return out;
}

double waveform_peak_bound(const std::vector<double>& taps, int sps) {
    double worst = 0.0;
    for (int phase = 0; phase < sps; ++phase) {
        double s = 0.0;
        for (std::size_t j = phase; j < taps.size(); j += static_cast<std::size_t>(sps))
            s += std::abs(taps[j]);
        worst = std::max(worst, s);
    }
    return worst;
}

SampleBuffer modulate_bpsk(const Message& msg, const ModulationParams& params) {
    if (msg.bits.empty()) throw std::invalid_argument("modulate_bpsk: empty message");
    if (params.samples_per_symbol < 2)
        throw std::invalid_argument("modulate_bpsk: samples_per_symbol must be >= 2");
    const std::vector<double> sym = bpsk_symbols(msg);
    SampleBuffer out;
    out.sample_rate_hz = params.sample_rate_hz;
    out.carrier_freq_hz = params.carrier_freq_hz;
    if (!params.pulse_shaping) {
        out.samples.reserve(sym.size() * static_cast<std::size_t>(params.samples_per_symbol));
        for (double s : sym)
            for (int i = 0; i < params.samples_per_symbol; ++i)
                out.samples.emplace_back(s * params.amplitude, 0.0);
    } else {
        const std::vector<double> taps =
            rrc_taps(params.samples_per_symbol, params.rolloff, params.filter_span_symbols);
        const double bound = waveform_peak_bound(taps, params.samples_per_symbol);
        const double amp = params.amplitude / bound;
        out.samples = shape_symbols(sym, taps, params.samples_per_symbol, amp);
    }
    if (params.phase_offset_rad != 0.0) {
        const Complex rot = std::polar(1.0, params.phase_offset_rad);
        for (auto& z : out.samples) z *= rot;
    }
    return out;
}

SampleBuffer matched_filter(const SampleBuffer& in, const std::vector<double>& taps) {
    if (in.samples.empty()) throw std::invalid_argument("matched_filter: empty input");
    const long n = static_cast<long>(in.samples.size());
    const long mid = static_cast<long>(taps.size()) / 2;
    SampleBuffer out;
    out.sample_rate_hz = in.sample_rate_hz;
    out.carrier_freq_hz = in.carrier_freq_hz;
    out.samples.assign(in.samples.size(), Complex(0.0, 0.0));
    for (long i = 0; i < n; ++i) {
        Complex acc(0.0, 0.0);
        const long lo = std::max(0L, i - (static_cast<long>(taps.size()) - 1 - mid));
        const long hi = std::min(n - 1, i + mid);
        for (long m = lo; m <= hi; ++m) {
            acc += in.samples[static_cast<std::size_t>(m)] * taps[static_cast<std::size_t>(mid + m - i)];
        }
        out.samples[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

}  // namespace rfveil

#include "rfveil/device.hpp"

#include <cmath>
#include <stdexcept>

#include "rfveil/rng.hpp"

namespace rfveil {

PowerMap default_power_map() {
    PowerMap m;
    m.table = {{0.01, -9.6}, {0.03, -9.0}, {0.04, -8.5}, {0.05, -8.0}, {0.07, -7.5},
               {0.1, -6.5},  {0.2, -3.5},  {0.3, -0.3},  {0.4, 3.2},   {0.5, 6.5},
               {0.6, 9.7},   {0.7, 13.3},  {0.8, 16.5},  {0.9, 18.9},  {1.0, 20.0}};
    return m;
}

double relative_power_to_dbm(double rel, const PowerMap& map) {
    if (map.table.size() < 2) throw std::invalid_argument("relative_power_to_dbm: map too small");
    const double lo = map.table.front().first;
    const double hi = map.table.back().first;
    if (!(rel >= lo && rel <= hi))
        throw std::out_of_range("relative_power_to_dbm: rel outside calibrated range");
    for (std::size_t i = 1; i < map.table.size(); ++i) {
        if (rel <= map.table[i].first) {
            const auto& [x0, y0] = map.table[i - 1];
            const auto& [x1, y1] = map.table[i];
            const double t = (rel - x0) / (x1 - x0);
            return y0 + t * (y1 - y0);
        }
    }
    return map.table.back().second;
}

SampleBuffer apply_impairments(const SampleBuffer& clean, const DeviceProfile& p,
                               std::uint64_t seed) {
    if (clean.samples.empty()) throw std::invalid_argument("apply_impairments: empty input");
    SampleBuffer out = clean;
    auto& v = out.samples;

    // 1) PA cubic nonlinearity
    if (p.pa_cubic_coeff != 0.0) {
        for (auto& z : v) z += p.pa_cubic_coeff * z * std::norm(z);
    }

    // 2) I/Q gain and phase imbalance.  Gain imbalance g applies to I; the Q
    // branch picks up a small copy of I through the quadrature error.
    if (p.iq_gain_imbalance_db != 0.0 || p.iq_phase_skew_rad != 0.0) {
        const double g = db_to_linear_amplitude(p.iq_gain_imbalance_db);
        const double se = std::sin(p.iq_phase_skew_rad);
        const double ce = std::cos(p.iq_phase_skew_rad);
        for (auto& z : v) {
            const double i = g * z.real();
            const double q = ce * z.imag() + se * z.real();
            z = Complex(i, q);
        }
    }

    // 3) DC offset
    if (p.dc_offset != Complex(0.0, 0.0)) {
        for (auto& z : v) z += p.dc_offset;
    }

    // 4) Oscillator: CFO plus Wiener phase noise.  The per-sample random-walk
    // increment variance 2*pi*linewidth/fs gives a Lorentzian line of the
    // configured width.
    const double dfreq = p.cfo_ppm * 1e-6 * out.carrier_freq_hz;
    if (dfreq != 0.0 || p.phase_noise_linewidth_hz > 0.0) {
        const double dphi_cfo = 2.0 * M_PI * dfreq / out.sample_rate_hz;
        const double sigma =
            p.phase_noise_linewidth_hz > 0.0
                ? std::sqrt(2.0 * M_PI * p.phase_noise_linewidth_hz / out.sample_rate_hz)
                : 0.0;
        Rng rng(seed);
        double phi = 0.0;
        for (auto& z : v) {
            z *= std::polar(1.0, phi);
            phi += dphi_cfo;
            if (sigma > 0.0) phi += sigma * rng.gaussian();
        }
    }

    // 5) TX power miscalibration
    if (p.power_cal_offset_db != 0.0) {
        const double a = db_to_linear_amplitude(p.power_cal_offset_db);
        for (auto& z : v) z *= a;
    }
    return out;
}

DevicePool make_device_pool(int k, std::uint64_t master_seed) {
    if (k < 2) throw std::invalid_argument("make_device_pool: k must be >= 2");
    DevicePool pool;
    pool.devices.reserve(static_cast<std::size_t>(k));
    Rng rng(derive_seed(master_seed, 0xDE71CEULL));
    for (int d = 0; d < k; ++d) {
        DeviceProfile p;
        p.device_id = d;
        // Re-draw until this CFO is >= 1 ppm away from every earlier device.
        for (;;) {
            p.cfo_ppm = rng.uniform(-30.0, 30.0);
            bool ok = true;
            for (const auto& q : pool.devices)
                if (std::abs(q.cfo_ppm - p.cfo_ppm) < 1.0) ok = false;
            if (ok) break;
        }
        p.phase_noise_linewidth_hz = rng.uniform(1.0, 100.0);
        p.iq_gain_imbalance_db = rng.uniform(-0.5, 0.5);
        p.iq_phase_skew_rad = rng.uniform(-0.05, 0.05);
        const double dc_mag = rng.uniform(0.0, 0.02);
        const double dc_ang = rng.uniform(0.0, 2.0 * M_PI);
        p.dc_offset = std::polar(dc_mag, dc_ang);
        p.pa_cubic_coeff = rng.uniform(-0.05, 0.0);
        p.power_cal_offset_db = rng.uniform(-5.0, 5.0);
        pool.devices.push_back(p);
    }
    return pool;
}

}  // namespace rfveil

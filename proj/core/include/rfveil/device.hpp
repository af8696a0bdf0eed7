#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rfveil/types.hpp"

namespace rfveil {

// Per-transmitter hardware fingerprint.  An all-zero profile is the identity.
struct DeviceProfile {
    int device_id = 0;
    double cfo_ppm = 0.0;                  // carrier frequency offset, ppm of f_c
    double phase_noise_linewidth_hz = 0.0; // Lorentzian linewidth of the oscillator
    double iq_gain_imbalance_db = 0.0;     // I-branch gain relative to Q-branch
    double iq_phase_skew_rad = 0.0;        // quadrature error
    Complex dc_offset = {0.0, 0.0};
    double pa_cubic_coeff = 0.0;           // y = x + c * x * |x|^2
    double power_cal_offset_db = 0.0;      // TX power miscalibration
};

struct DevicePool {
    std::vector<DeviceProfile> devices;
    int k() const { return static_cast<int>(devices.size()); }
};

// (relative TX setting, dBm) calibration points; piecewise linear between.
struct PowerMap {
    std::vector<std::pair<double, double>> table;
};

// The 15-point USRP-style calibration curve from (0.01, -9.6) to (1, 20).
PowerMap default_power_map();

double relative_power_to_dbm(double rel, const PowerMap& map);

// Applies the impairment chain in TX order: PA cubic nonlinearity, I/Q
// gain/phase imbalance, DC offset, oscillator rotation (CFO + Wiener phase
// noise seeded deterministically), power miscalibration gain.
SampleBuffer apply_impairments(const SampleBuffer& clean, const DeviceProfile& profile,
                               std::uint64_t seed);

// k profiles drawn deterministically from master_seed.  CFOs of any two
// profiles differ by at least 1 ppm (rejection sampling).
DevicePool make_device_pool(int k, std::uint64_t master_seed);

}  // namespace rfveil

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rfveil/channel.hpp"
#include "rfveil/config.hpp"
#include "rfveil/device.hpp"
#include "rfveil/receiver.hpp"

namespace rfveil {

struct CellKey {
    int device_id = 0;
    int rjp_index = 0;
    int att_index = 0;
    auto operator<=>(const CellKey&) const = default;
};

// One (device, RJP, attenuation) sweep point: the eavesdropper's recovered
// symbol-rate I/Q plus link quality metadata.
struct CellRecord {
    CellKey key;
    double rjp = 0.0;
    double attenuation_db = 0.0;
    std::uint64_t seed_tx = 0, seed_jam = 0, seed_chan = 0;
    std::vector<std::complex<float>> symbols;          // post-acquisition
    std::vector<std::complex<float>> aligned_samples;  // sample-rate, carrier-aligned
    std::size_t n_symbols_total = 0;
    std::size_t analysis_start = 0;
    double ber = 1.0;
    double snr_db = 0.0;
    bool converged = false;
    bool flagged = false;  // unconverged or BER > 0: excluded from anonymity claims
};

struct CaptureDataset {
    ExperimentConfig config;
    DevicePool pool;
    std::vector<CellRecord> cells;  // sorted by key

    const CellRecord* find(int device_id, int rjp_index, int att_index) const;
};

// Synthesizes one cell end to end; all randomness is derived from the master
// seed and the cell coordinates, so any cell is independently reproducible.
CellRecord run_cell(const ExperimentConfig& cfg, const DeviceProfile& profile,
                    int rjp_index, int att_index);

// Full sweep capture.  Cells are computed in parallel (deterministically
// seeded) and assembled in key order.
CaptureDataset run_capture(const ExperimentConfig& cfg);

// Per-cell persistence: interleaved little-endian float32 I/Q files plus a
// JSON sidecar with the full metadata; load_dataset is the import path for
// externally recorded captures in the same layout.
void save_dataset(const CaptureDataset& dataset, const std::string& dir);
CaptureDataset load_dataset(const std::string& dir);

std::string cell_basename(const CellKey& key);

}  // namespace rfveil

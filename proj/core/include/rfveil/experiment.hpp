#pragma once

#include <cstddef>
#include <vector>

#include "rfveil/autoencoder.hpp"
#include "rfveil/capture.hpp"
#include "rfveil/classifier.hpp"
#include "rfveil/metrics.hpp"
#include "rfveil/receiver.hpp"

namespace rfveil {

// Time-ordered split of one cell's fingerprint images: the earliest windows
// train, the middle validate, the latest test.  Windows never straddle a
// split boundary, so train and test pixels come from disjoint time ranges.
struct ImageSplits {
    std::vector<FingerprintImage> train, val, test;
};

ImageSplits build_image_splits(const CellRecord& cell, const ExperimentConfig& cfg);

// Converts a cell's stored float32 symbols back to the double-precision
// complex stream the imaging and statistics code consumes.
std::vector<Complex> cell_symbol_stream(const CellRecord& cell);

// One row of the identification attack: a k-way classifier trained on
// unjammed traffic, evaluated on the held-out windows of every sweep point.
struct KRow {
    double rjp = 0.0;
    double attenuation_db = 0.0;
    double accuracy = 0.0;
    double ber = 0.0;          // mean over devices
    double mean_snr_db = 0.0;  // mean over devices
    std::size_t n_test_images = 0;
    bool excluded = false;  // some contributing cell never converged
    std::vector<std::vector<std::size_t>> confusion;
};

struct KAnonymityResult {
    ClassifierModel model;
    std::vector<KRow> rows;       // one per (rjp, attenuation), rjp-major order
    double baseline_accuracy = 0.0;  // unjammed row at the training attenuation
};

KAnonymityResult run_k_anonymity(const CaptureDataset& dataset);

// One row of the verification attack: a per-device autoencoder trained on
// that device's unjammed traffic; scores are reconstruction errors.  The ROC
// separates jammed windows (positives) from held-out unjammed windows
// (negatives), so AUC -> 1 means jamming pushed the fingerprint out of the
// device's learned manifold and AUC -> 0.5 means the jammer changed nothing.
struct TRow {
    int device_id = 0;
    double rjp = 0.0;
    double attenuation_db = 0.0;
    double auc = 0.5;
    double snr_db = 0.0;
    bool excluded = false;
    RocCurve roc;
};

struct TAnonymityResult {
    std::vector<AutoencoderModel> models;  // indexed by device id
    std::vector<TRow> rows;                // device-major, then rjp, then attenuation
};

TAnonymityResult run_t_anonymity(const CaptureDataset& dataset);

// Amplitude/phase statistics of the carrier-aligned waveform, aggregated
// across devices for one (rjp, attenuation) point, with KS distances against
// the unjammed point at the same attenuation.
struct DistRow {
    double rjp = 0.0;
    double attenuation_db = 0.0;
    Distribution amplitude;
    Distribution phase;
    double ks_amplitude_vs_unjammed = 0.0;
    double ks_phase_vs_unjammed = 0.0;
};

// Link quality of one cell: aggregate SNR, BER, and the per-symbol SNR
// density the receiver observed.
struct SnrRow {
    int device_id = 0;
    double rjp = 0.0;
    double attenuation_db = 0.0;
    double mean_snr_db = 0.0;
    double ber = 1.0;
    bool converged = false;
    Distribution snr_pdf;
};

// Link quality rows for every cell / aggregated distribution rows for every
// converged sweep point; the cheap, training-free analyses.
std::vector<SnrRow> link_snr_rows(const CaptureDataset& dataset);
std::vector<DistRow> distribution_rows(const CaptureDataset& dataset);

struct SweepResult {
    ExperimentConfig config;
    std::vector<SnrRow> snr_rows;
    std::vector<DistRow> dist_rows;
    KAnonymityResult k_anonymity;
    TAnonymityResult t_anonymity;
};

// All analyses over an existing capture: link statistics, distributions,
// identification attack, verification attack.
SweepResult analyze_dataset(const CaptureDataset& dataset);

// Capture plus analyze in one call.
SweepResult run_sweep(const ExperimentConfig& cfg);

}  // namespace rfveil

#include "rfveil/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

#include "rfveil/rng.hpp"

namespace rfveil {

namespace {

constexpr std::uint64_t kClassifierSeedTag = 0xC1A55;
constexpr std::uint64_t kAutoencoderSeedTag = 0xAE00;

int least_jammed_index(const ExperimentConfig& cfg) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(cfg.rjp.size()); ++i)
        if (cfg.rjp[static_cast<std::size_t>(i)] < cfg.rjp[static_cast<std::size_t>(best)])
            best = i;
    return best;
}

std::string cell_name(int device, int ri, int ai, const ExperimentConfig& cfg) {
    return "device " + std::to_string(device) + ", rjp " +
           std::to_string(cfg.rjp[static_cast<std::size_t>(ri)]) + ", attenuation " +
           std::to_string(cfg.attenuation_db[static_cast<std::size_t>(ai)]) + " dB";
}

PlaneBounds bounds_from_config(const ExperimentConfig& cfg) {
    PlaneBounds b;
    b.i_min = -cfg.bound_half_width;
    b.i_max = cfg.bound_half_width;
    b.q_min = -cfg.bound_half_width;
    b.q_max = cfg.bound_half_width;
    return b;
}

ClassifierConfig classifier_config(const ExperimentConfig& cfg) {
    ClassifierConfig c;
    c.image_size = cfg.image_size;
    c.n_classes = cfg.k;
    c.epochs = cfg.classifier.epochs;
    c.learning_rate = cfg.classifier.learning_rate;
    c.momentum = cfg.classifier.momentum;
    c.batch_size = cfg.classifier.batch_size;
    c.optimizer = cfg.classifier.optimizer;
    c.seed = derive_seed(cfg.master_seed, kClassifierSeedTag);
    return c;
}

AutoencoderConfig autoencoder_config(const ExperimentConfig& cfg, int device) {
    AutoencoderConfig a;
    a.image_size = cfg.image_size;
    a.bottleneck = cfg.autoencoder.bottleneck;
    a.epochs = cfg.autoencoder.epochs;
    a.learning_rate = cfg.autoencoder.learning_rate;
    a.momentum = cfg.autoencoder.momentum;
    a.batch_size = cfg.autoencoder.batch_size;
    a.optimizer = cfg.autoencoder.optimizer;
    a.seed = derive_seed(cfg.master_seed, kAutoencoderSeedTag, static_cast<std::uint64_t>(device));
    return a;
}

// Splits for every converged cell, computed once per analysis.
std::map<CellKey, ImageSplits> all_splits(const CaptureDataset& ds) {
    std::map<CellKey, ImageSplits> out;
    for (const auto& cell : ds.cells)
        if (cell.converged) out.emplace(cell.key, build_image_splits(cell, ds.config));
    return out;
}

std::vector<double> reconstruction_errors(AutoencoderModel& model,
                                          const std::vector<FingerprintImage>& images) {
    std::vector<double> out;
    out.reserve(images.size());
    for (const auto& img : images) out.push_back(reconstruction_error(model, img));
    return out;
}

}  // namespace

std::vector<Complex> cell_symbol_stream(const CellRecord& cell) {
    std::vector<Complex> out;
    out.reserve(cell.symbols.size());
    for (const auto& z : cell.symbols)
        out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    return out;
}

ImageSplits build_image_splits(const CellRecord& cell, const ExperimentConfig& cfg) {
    ImageSplits out;
    const std::vector<Complex> stream = cell_symbol_stream(cell);
    if (stream.size() < cfg.samples_per_image) return out;
    const auto images = batch_windows(stream, cfg.samples_per_image, cfg.samples_per_image,
                                      cfg.image_size, bounds_from_config(cfg));
    const std::size_t n = images.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.split_train));
    const auto n_val = static_cast<std::size_t>(std::floor(static_cast<double>(n) * cfg.split_val));
    out.train.assign(images.begin(), images.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val.assign(images.begin() + static_cast<std::ptrdiff_t>(n_train),
                   images.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(images.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), images.end());
    return out;
}

KAnonymityResult run_k_anonymity(const CaptureDataset& ds) {
    const ExperimentConfig& cfg = ds.config;
    if (cfg.k < 2) throw std::invalid_argument("run_k_anonymity: need at least 2 devices");
    const int ri0 = least_jammed_index(cfg);
    const int ai0 = 0;
    const auto splits = all_splits(ds);

    std::vector<LabeledImage> train, val;
    for (int d = 0; d < cfg.k; ++d) {
        const CellRecord* base = ds.find(d, ri0, ai0);
        if (!base || !base->converged)
            throw std::invalid_argument("run_k_anonymity: no unjammed training data for " +
                                        cell_name(d, ri0, ai0, cfg));
        const ImageSplits& s = splits.at(base->key);
        if (s.train.empty() || s.val.empty() || s.test.empty())
            throw std::invalid_argument("run_k_anonymity: insufficient images in a split for " +
                                        cell_name(d, ri0, ai0, cfg));
        for (const auto& img : s.train) train.push_back({img, d});
        for (const auto& img : s.val) val.push_back({img, d});
    }

    KAnonymityResult res;
    res.model = train_classifier(train, val, classifier_config(cfg));

    for (int ri = 0; ri < static_cast<int>(cfg.rjp.size()); ++ri) {
        for (int ai = 0; ai < static_cast<int>(cfg.attenuation_db.size()); ++ai) {
            KRow row;
            row.rjp = cfg.rjp[static_cast<std::size_t>(ri)];
            row.attenuation_db = cfg.attenuation_db[static_cast<std::size_t>(ai)];
            std::vector<LabeledImage> test;
            double ber_sum = 0.0, snr_sum = 0.0;
            int n_ok = 0;
            for (int d = 0; d < cfg.k; ++d) {
                const CellRecord* cell = ds.find(d, ri, ai);
                if (!cell) continue;
                if (cell->flagged) {
                    row.excluded = true;
                    continue;
                }
                const ImageSplits& s = splits.at(cell->key);
                if (s.test.empty())
                    throw std::invalid_argument(
                        "run_k_anonymity: insufficient images in the test split for " +
                        cell_name(d, ri, ai, cfg));
                for (const auto& img : s.test) test.push_back({img, d});
                ber_sum += cell->ber;
                snr_sum += cell->snr_db;
                ++n_ok;
            }
            if (n_ok > 0) {
                row.ber = ber_sum / n_ok;
                row.mean_snr_db = snr_sum / n_ok;
            } else {
                row.excluded = true;
                row.ber = 1.0;
                row.mean_snr_db = 0.0;
            }
            if (!test.empty()) {
                const AccuracyReport rep = evaluate_accuracy(res.model, test);
                row.accuracy = rep.accuracy;
                row.confusion = rep.confusion;
                row.n_test_images = test.size();
            } else {
                row.confusion.assign(static_cast<std::size_t>(cfg.k),
                                     std::vector<std::size_t>(static_cast<std::size_t>(cfg.k), 0));
            }
            if (ri == ri0 && ai == ai0) res.baseline_accuracy = row.accuracy;
            res.rows.push_back(std::move(row));
        }
    }
    return res;
}

TAnonymityResult run_t_anonymity(const CaptureDataset& ds) {
    const ExperimentConfig& cfg = ds.config;
    const int ri0 = least_jammed_index(cfg);
    const int ai0 = 0;
    const auto splits = all_splits(ds);

    TAnonymityResult res;
    res.models.resize(static_cast<std::size_t>(cfg.k));

    for (int d = 0; d < cfg.k; ++d) {
        const CellRecord* base = ds.find(d, ri0, ai0);
        if (!base || !base->converged)
            throw std::invalid_argument("run_t_anonymity: no unjammed training data for " +
                                        cell_name(d, ri0, ai0, cfg));
        const ImageSplits& s = splits.at(base->key);
        if (s.train.empty() || s.val.empty() || s.test.empty())
            throw std::invalid_argument("run_t_anonymity: insufficient images in a split for " +
                                        cell_name(d, ri0, ai0, cfg));
    }

    // Per-device autoencoders are independent; train them in parallel.
    {
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.k));
        for (int d = 0; d < cfg.k; ++d) {
            workers.emplace_back([&, d]() {
                try {
                    const CellRecord* base = ds.find(d, ri0, ai0);
                    res.models[static_cast<std::size_t>(d)] =
                        train_autoencoder(splits.at(base->key).train, autoencoder_config(cfg, d));
                } catch (...) {
                    errors[static_cast<std::size_t>(d)] = std::current_exception();
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (int d = 0; d < cfg.k; ++d) {
        AutoencoderModel& model = res.models[static_cast<std::size_t>(d)];
        const CellRecord* base = ds.find(d, ri0, ai0);
        // Held-out unjammed windows the autoencoder never trained on.
        const std::vector<double> negatives =
            reconstruction_errors(model, splits.at(base->key).val);
        for (int ri = 0; ri < static_cast<int>(cfg.rjp.size()); ++ri) {
            for (int ai = 0; ai < static_cast<int>(cfg.attenuation_db.size()); ++ai) {
                TRow row;
                row.device_id = d;
                row.rjp = cfg.rjp[static_cast<std::size_t>(ri)];
                row.attenuation_db = cfg.attenuation_db[static_cast<std::size_t>(ai)];
                const CellRecord* cell = ds.find(d, ri, ai);
                if (!cell) continue;
                row.snr_db = cell->snr_db;
                if (cell->flagged) {
                    row.excluded = true;
                    res.rows.push_back(std::move(row));
                    continue;
                }
                const std::vector<double> positives =
                    reconstruction_errors(model, splits.at(cell->key).test);
                if (positives.empty() || negatives.empty())
                    throw std::invalid_argument(
                        "run_t_anonymity: insufficient images in a split for " +
                        cell_name(d, ri, ai, cfg));
                row.roc = roc_and_auc(positives, negatives);
                row.auc = row.roc.auc;
                res.rows.push_back(std::move(row));
            }
        }
    }
    return res;
}

namespace {

SnrRow make_snr_row(const CellRecord& cell, const ExperimentConfig& cfg) {
    SnrRow row;
    row.device_id = cell.key.device_id;
    row.rjp = cell.rjp;
    row.attenuation_db = cell.attenuation_db;
    row.converged = cell.converged;
    row.ber = cell.converged ? cell.ber : 1.0;
    row.mean_snr_db = cell.converged ? cell.snr_db : 0.0;
    if (cell.converged && !cell.symbols.empty()) {
        SymbolStream stream;
        stream.symbols = cell_symbol_stream(cell);
        stream.timing_converged = true;
        stream.carrier_converged = true;
        const SnrEstimate est = estimate_snr(stream);
        row.snr_pdf = empirical_distribution(est.per_symbol_db, cfg.distribution_bins);
    }
    return row;
}

}  // namespace

std::vector<SnrRow> link_snr_rows(const CaptureDataset& ds) {
    std::vector<SnrRow> rows;
    rows.reserve(ds.cells.size());
    for (const auto& cell : ds.cells) rows.push_back(make_snr_row(cell, ds.config));
    return rows;
}

std::vector<DistRow> distribution_rows(const CaptureDataset& ds) {
    const ExperimentConfig& cfg = ds.config;
    const int ri0 = least_jammed_index(cfg);
    std::vector<DistRow> rows;

    for (int ai = 0; ai < static_cast<int>(cfg.attenuation_db.size()); ++ai) {
        std::vector<double> base_amp, base_phase;
        // Pass 0 collects the unjammed reference at this attenuation; pass 1
        // builds every row and its KS distance against that reference.
        for (int pass = 0; pass < 2; ++pass) {
            for (int ri = 0; ri < static_cast<int>(cfg.rjp.size()); ++ri) {
                if (pass == 0 && ri != ri0) continue;
                std::vector<double> amps, phases;
                for (int d = 0; d < cfg.k; ++d) {
                    const CellRecord* cell = ds.find(d, ri, ai);
                    if (!cell || !cell->converged || cell->aligned_samples.empty()) continue;
                    SampleBuffer buf;
                    buf.samples.reserve(cell->aligned_samples.size());
                    for (const auto& z : cell->aligned_samples)
                        buf.samples.emplace_back(static_cast<double>(z.real()),
                                                 static_cast<double>(z.imag()));
                    for (const auto& p : amplitude_phase(buf)) {
                        amps.push_back(p.r_a);
                        phases.push_back(p.r_phi);
                    }
                }
                if (pass == 0) {
                    base_amp = std::move(amps);
                    base_phase = std::move(phases);
                    break;
                }
                if (amps.empty()) continue;  // nothing converged at this point
                DistRow row;
                row.rjp = cfg.rjp[static_cast<std::size_t>(ri)];
                row.attenuation_db = cfg.attenuation_db[static_cast<std::size_t>(ai)];
                row.amplitude = empirical_distribution(amps, cfg.distribution_bins);
                row.phase = empirical_distribution(phases, cfg.distribution_bins);
                if (!base_amp.empty()) {
                    row.ks_amplitude_vs_unjammed = ks_distance(amps, base_amp);
                    row.ks_phase_vs_unjammed = ks_distance(phases, base_phase);
                }
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

SweepResult analyze_dataset(const CaptureDataset& ds) {
    if (ds.cells.empty()) throw std::invalid_argument("analyze_dataset: empty dataset");
    SweepResult out;
    out.config = ds.config;
    out.snr_rows = link_snr_rows(ds);
    out.dist_rows = distribution_rows(ds);
    out.k_anonymity = run_k_anonymity(ds);
    out.t_anonymity = run_t_anonymity(ds);
    return out;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
    return analyze_dataset(run_capture(cfg));
}

}  // namespace rfveil

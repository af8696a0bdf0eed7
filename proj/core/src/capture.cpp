#include "rfveil/capture.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "rfveil/rng.hpp"
#include "rfveil/signal.hpp"

namespace rfveil {

namespace {
constexpr std::uint64_t kPurposeTx = 1, kPurposeJam = 2, kPurposeChan = 3, kPurposePath = 4;
}

const CellRecord* CaptureDataset::find(int device_id, int rjp_index, int att_index) const {
    const CellKey key{device_id, rjp_index, att_index};
    const auto it = std::lower_bound(
        cells.begin(), cells.end(), key,
        [](const CellRecord& c, const CellKey& k) { return c.key < k; });
    if (it == cells.end() || !(it->key == key)) return nullptr;
    return &*it;
}

CellRecord run_cell(const ExperimentConfig& cfg, const DeviceProfile& profile,
                    int rjp_index, int att_index) {
    CellRecord cell;
    cell.key = {profile.device_id, rjp_index, att_index};
    cell.rjp = cfg.rjp[static_cast<std::size_t>(rjp_index)];
    cell.attenuation_db = cfg.attenuation_db[static_cast<std::size_t>(att_index)];
    const auto dev = static_cast<std::uint64_t>(profile.device_id);
    const auto ri = static_cast<std::uint64_t>(rjp_index);
    const auto ai = static_cast<std::uint64_t>(att_index);
    cell.seed_tx = derive_seed(cfg.master_seed, dev, ri, ai, kPurposeTx);
    cell.seed_jam = derive_seed(cfg.master_seed, dev, ri, ai, kPurposeJam);
    cell.seed_chan = derive_seed(cfg.master_seed, dev, ri, ai, kPurposeChan);

    const std::size_t n_sym =
        cell.rjp == 0.0 ? cfg.train_symbols_per_cell : cfg.symbols_per_cell;

    const PowerMap pmap = default_power_map();
    const Message period = generate_message(1);
    const std::size_t reps = (n_sym + period.bits.size() - 1) / period.bits.size();
    const Message msg = generate_message(reps);

    // TX power is defined at symbol level: recovered symbol amplitude squared
    // equals the Table-2 linear power (0 dBm == 1.0).
    const double p_tx = db_to_linear_power(relative_power_to_dbm(cfg.tx_rel_power, pmap));
    const std::vector<double> taps = rrc_taps(cfg.sps, 0.35, 11);
    SampleBuffer tx;
    tx.sample_rate_hz = cfg.sample_rate_hz;
    tx.carrier_freq_hz = cfg.carrier_freq_hz;
    tx.samples = shape_symbols(bpsk_symbols(msg), taps, cfg.sps, std::sqrt(p_tx));

    const SampleBuffer dirty = apply_impairments(tx, profile, cell.seed_tx);

    JammerConfig jcfg;
    jcfg.relative_jamming_power = cell.rjp;
    jcfg.attenuation_db = cell.attenuation_db;
    jcfg.waveform = cfg.jammer_waveform == "single_tone" ? JammerWaveform::single_tone
                                                         : JammerWaveform::gaussian_noise;
    jcfg.tone_offset_hz = cfg.jammer_tone_offset_hz;
    jcfg.seed = cell.seed_jam;
    const SampleBuffer jam =
        synthesize_jammer(dirty.samples.size(), cfg.sample_rate_hz, jcfg, pmap);
    const SampleBuffer mixed = combine(dirty, jam);

    ChannelConfig ccfg;
    ccfg.noise_floor_dbm = cfg.noise_floor_dbm;
    ccfg.rx_gain_rel = cfg.rx_rel_gain;
    if (cfg.scenario == "radio") {
        ccfg.kind = ChannelKind::radio;
        // The propagation path is a property of the device's placement, not
        // of the jammer settings: keyed by device only, stable across the
        // whole RJP x attenuation sweep.
        ccfg.multipath_taps =
            default_radio_taps(derive_seed(cfg.master_seed, dev, kPurposePath));
    } else {
        ccfg.kind = ChannelKind::cable;
    }
    const SampleBuffer rx = apply_channel(mixed, ccfg, cell.seed_chan);

    ReceiverParams rparams;
    rparams.sps = cfg.sps;
    // BER alignment works on the 2048-bit base period; the receiver's
    // convergence guard needs two periods of it after the acquisition skip.
    const ReceiverOutput out = run_receiver(rx, rparams, period);

    // The message is padded to whole base periods, so the recovered count is
    // what the cell actually holds -- not the requested symbols_per_cell.
    cell.n_symbols_total = out.symbols.symbols.size();
    cell.converged = out.converged;
    cell.analysis_start = out.analysis_start;
    if (out.converged) {
        cell.ber = out.ber;
        cell.snr_db = out.snr.aggregate_db;
        const std::size_t n_post = out.symbols.symbols.size() - out.analysis_start;
        cell.symbols.reserve(n_post);
        for (std::size_t i = out.analysis_start; i < out.symbols.symbols.size(); ++i) {
            const Complex& z = out.symbols.symbols[i];
            cell.symbols.emplace_back(static_cast<float>(z.real()),
                                      static_cast<float>(z.imag()));
        }
        const std::size_t keep =
            std::min(cfg.stats_samples_per_cell, out.aligned.samples.size());
        cell.aligned_samples.reserve(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            const Complex& z = out.aligned.samples[i];
            cell.aligned_samples.emplace_back(static_cast<float>(z.real()),
                                              static_cast<float>(z.imag()));
        }
    }
    cell.flagged = !cell.converged || cell.ber > 0.0;
    return cell;
}

CaptureDataset run_capture(const ExperimentConfig& cfg) {
    validate_config(cfg);
    CaptureDataset ds;
    ds.config = cfg;
    ds.pool = make_device_pool(cfg.k, cfg.master_seed);

    struct Job {
        const DeviceProfile* profile;
        int rjp_index;
        int att_index;
    };
    std::vector<Job> jobs;
    for (const auto& profile : ds.pool.devices)
        for (int ri = 0; ri < static_cast<int>(cfg.rjp.size()); ++ri)
            for (int ai = 0; ai < static_cast<int>(cfg.attenuation_db.size()); ++ai)
                jobs.push_back({&profile, ri, ai});

    ds.cells.resize(jobs.size());
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                        static_cast<unsigned>(jobs.size())));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    std::vector<std::exception_ptr> errors(n_threads);
    for (unsigned t = 0; t < n_threads; ++t) {
        workers.emplace_back([&, t]() {
            try {
                for (;;) {
                    const std::size_t j = next.fetch_add(1);
                    if (j >= jobs.size()) break;
                    ds.cells[j] = run_cell(cfg, *jobs[j].profile, jobs[j].rjp_index,
                                           jobs[j].att_index);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::sort(ds.cells.begin(), ds.cells.end(),
              [](const CellRecord& a, const CellRecord& b) { return a.key < b.key; });
    return ds;
}

std::string cell_basename(const CellKey& key) {
    return "cell_d" + std::to_string(key.device_id) + "_r" + std::to_string(key.rjp_index) +
           "_a" + std::to_string(key.att_index);
}

namespace {

void write_iq(const std::string& path, const std::vector<std::complex<float>>& v) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save_dataset: cannot open " + path);
    static_assert(sizeof(std::complex<float>) == 8);
    if (!v.empty())
        os.write(reinterpret_cast<const char*>(v.data()),
                 static_cast<std::streamsize>(v.size() * sizeof(std::complex<float>)));
    if (!os) throw std::runtime_error("save_dataset: write failed for " + path);
}

std::vector<std::complex<float>> read_iq(const std::string& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw std::runtime_error("load_dataset: cannot open " + path);
    const std::streamsize bytes = is.tellg();
    if (bytes % 8 != 0) throw std::runtime_error("load_dataset: odd-sized I/Q file " + path);
    is.seekg(0);
    std::vector<std::complex<float>> v(static_cast<std::size_t>(bytes) / 8);
    if (bytes > 0) is.read(reinterpret_cast<char*>(v.data()), bytes);
    if (!is) throw std::runtime_error("load_dataset: read failed for " + path);
    return v;
}

nlohmann::json profile_to_json(const DeviceProfile& p) {
    return nlohmann::json{{"device_id", p.device_id},
                          {"cfo_ppm", p.cfo_ppm},
                          {"phase_noise_linewidth_hz", p.phase_noise_linewidth_hz},
                          {"iq_gain_imbalance_db", p.iq_gain_imbalance_db},
                          {"iq_phase_skew_rad", p.iq_phase_skew_rad},
                          {"dc_offset_i", p.dc_offset.real()},
                          {"dc_offset_q", p.dc_offset.imag()},
                          {"pa_cubic_coeff", p.pa_cubic_coeff},
                          {"power_cal_offset_db", p.power_cal_offset_db}};
}

DeviceProfile profile_from_json(const nlohmann::json& j) {
    DeviceProfile p;
    p.device_id = j.at("device_id").get<int>();
    p.cfo_ppm = j.at("cfo_ppm").get<double>();
    p.phase_noise_linewidth_hz = j.at("phase_noise_linewidth_hz").get<double>();
    p.iq_gain_imbalance_db = j.at("iq_gain_imbalance_db").get<double>();
    p.iq_phase_skew_rad = j.at("iq_phase_skew_rad").get<double>();
    p.dc_offset = Complex(j.at("dc_offset_i").get<double>(), j.at("dc_offset_q").get<double>());
    p.pa_cubic_coeff = j.at("pa_cubic_coeff").get<double>();
    p.power_cal_offset_db = j.at("power_cal_offset_db").get<double>();
    return p;
}

}  // namespace

void save_dataset(const CaptureDataset& dataset, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream os(dir + "/config.txt");
        if (!os) throw std::runtime_error("save_dataset: cannot write config");
        os << config_to_text(dataset.config);
    }
    for (const auto& cell : dataset.cells) {
        const std::string base = dir + "/" + cell_basename(cell.key);
        write_iq(base + ".iq", cell.symbols);
        write_iq(base + "_aligned.iq", cell.aligned_samples);

        nlohmann::json j;
        j["device_id"] = cell.key.device_id;
        j["rjp_index"] = cell.key.rjp_index;
        j["att_index"] = cell.key.att_index;
        j["rjp"] = cell.rjp;
        j["attenuation_db"] = cell.attenuation_db;
        j["seed_tx"] = cell.seed_tx;
        j["seed_jam"] = cell.seed_jam;
        j["seed_chan"] = cell.seed_chan;
        j["n_symbols_total"] = cell.n_symbols_total;
        j["analysis_start"] = cell.analysis_start;
        j["n_symbols_stored"] = cell.symbols.size();
        j["n_aligned_stored"] = cell.aligned_samples.size();
        j["ber"] = cell.ber;
        j["snr_db"] = cell.snr_db;
        j["converged"] = cell.converged;
        j["flagged"] = cell.flagged;
        j["symbol_rate_hz"] = dataset.config.sample_rate_hz / dataset.config.sps;
        j["sample_rate_hz"] = dataset.config.sample_rate_hz;
        j["device_profile"] =
            profile_to_json(dataset.pool.devices[static_cast<std::size_t>(cell.key.device_id)]);
        std::ofstream os(base + ".json");
        if (!os) throw std::runtime_error("save_dataset: cannot write sidecar for " + base);
        os << j.dump(2) << "\n";
    }
}

CaptureDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    CaptureDataset ds;
    ds.config = load_config(dir + "/config.txt");
    ds.pool.devices.resize(static_cast<std::size_t>(ds.config.k));

    std::vector<std::string> sidecars;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("cell_", 0) == 0 && entry.path().extension() == ".json")
            sidecars.push_back(entry.path().string());
    }
    std::sort(sidecars.begin(), sidecars.end());

    for (const auto& path : sidecars) {
        std::ifstream is(path);
        nlohmann::json j;
        is >> j;
        CellRecord cell;
        cell.key = {j.at("device_id").get<int>(), j.at("rjp_index").get<int>(),
                    j.at("att_index").get<int>()};
        cell.rjp = j.at("rjp").get<double>();
        cell.attenuation_db = j.at("attenuation_db").get<double>();
        cell.seed_tx = j.at("seed_tx").get<std::uint64_t>();
        cell.seed_jam = j.at("seed_jam").get<std::uint64_t>();
        cell.seed_chan = j.at("seed_chan").get<std::uint64_t>();
        cell.n_symbols_total = j.at("n_symbols_total").get<std::size_t>();
        cell.analysis_start = j.at("analysis_start").get<std::size_t>();
        cell.ber = j.at("ber").get<double>();
        cell.snr_db = j.at("snr_db").get<double>();
        cell.converged = j.at("converged").get<bool>();
        cell.flagged = j.at("flagged").get<bool>();
        const std::string base = path.substr(0, path.size() - 5);
        cell.symbols = read_iq(base + ".iq");
        if (fs::exists(base + "_aligned.iq")) cell.aligned_samples = read_iq(base + "_aligned.iq");
        if (cell.symbols.size() != j.at("n_symbols_stored").get<std::size_t>())
            throw std::runtime_error("load_dataset: symbol count mismatch for " + base);
        const auto& pj = j.at("device_profile");
        const int dev = cell.key.device_id;
        if (dev < 0 || dev >= ds.config.k)
            throw std::runtime_error("load_dataset: device id out of range in " + base);
        ds.pool.devices[static_cast<std::size_t>(dev)] = profile_from_json(pj);
        ds.cells.push_back(std::move(cell));
    }
    std::sort(ds.cells.begin(), ds.cells.end(),
              [](const CellRecord& a, const CellRecord& b) { return a.key < b.key; });
    return ds;
}

}  // namespace rfveil

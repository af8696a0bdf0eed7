#include "rfveil/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rfveil {

ExperimentConfig cable_default_config() { return ExperimentConfig{}; }

ExperimentConfig radio_default_config() {
    ExperimentConfig cfg;
    cfg.scenario = "radio";
    cfg.tx_rel_power = 0.8;
    cfg.rx_rel_gain = 0.8;
    cfg.rjp = {0.0, 1.0};
    cfg.attenuation_db = {0.0, 20.0, 40.0};
    cfg.sample_rate_hz = 512e3;
    return cfg;
}

namespace {

std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad number '" + item + "' in key " + key);
        }
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for key " + key);
    return out;
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    char buf[64];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.9g", v[i]);
        if (i) s += ",";
        s += buf;
    }
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

double to_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad number '" + v + "' for key " + key);
    }
}

long long to_ll(const std::string& v, const std::string& key) {
    try {
        return std::stoll(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer '" + v + "' for key " + key);
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& key) {
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad integer '" + v + "' for key " + key);
    }
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> m = {
        {"scenario", [](ExperimentConfig& c, const std::string& v) { c.scenario = v; }},
        {"master_seed", [](ExperimentConfig& c, const std::string& v) { c.master_seed = to_u64(v, "master_seed"); }},
        {"k", [](ExperimentConfig& c, const std::string& v) { c.k = static_cast<int>(to_ll(v, "k")); }},
        {"tx_rel_power", [](ExperimentConfig& c, const std::string& v) { c.tx_rel_power = to_double(v, "tx_rel_power"); }},
        {"rx_rel_gain", [](ExperimentConfig& c, const std::string& v) { c.rx_rel_gain = to_double(v, "rx_rel_gain"); }},
        {"rjp", [](ExperimentConfig& c, const std::string& v) { c.rjp = parse_list(v, "rjp"); }},
        {"attenuation_db", [](ExperimentConfig& c, const std::string& v) { c.attenuation_db = parse_list(v, "attenuation_db"); }},
        {"jammer_waveform", [](ExperimentConfig& c, const std::string& v) { c.jammer_waveform = v; }},
        {"jammer_tone_offset_hz", [](ExperimentConfig& c, const std::string& v) { c.jammer_tone_offset_hz = to_double(v, "jammer_tone_offset_hz"); }},
        {"sample_rate_hz", [](ExperimentConfig& c, const std::string& v) { c.sample_rate_hz = to_double(v, "sample_rate_hz"); }},
        {"carrier_freq_hz", [](ExperimentConfig& c, const std::string& v) { c.carrier_freq_hz = to_double(v, "carrier_freq_hz"); }},
        {"sps", [](ExperimentConfig& c, const std::string& v) { c.sps = static_cast<int>(to_ll(v, "sps")); }},
        {"noise_floor_dbm", [](ExperimentConfig& c, const std::string& v) { c.noise_floor_dbm = to_double(v, "noise_floor_dbm"); }},
        {"symbols_per_cell", [](ExperimentConfig& c, const std::string& v) { c.symbols_per_cell = static_cast<std::size_t>(to_ll(v, "symbols_per_cell")); }},
        {"train_symbols_per_cell", [](ExperimentConfig& c, const std::string& v) { c.train_symbols_per_cell = static_cast<std::size_t>(to_ll(v, "train_symbols_per_cell")); }},
        {"stats_samples_per_cell", [](ExperimentConfig& c, const std::string& v) { c.stats_samples_per_cell = static_cast<std::size_t>(to_ll(v, "stats_samples_per_cell")); }},
        {"samples_per_image", [](ExperimentConfig& c, const std::string& v) { c.samples_per_image = static_cast<std::size_t>(to_ll(v, "samples_per_image")); }},
        {"image_size", [](ExperimentConfig& c, const std::string& v) { c.image_size = static_cast<int>(to_ll(v, "image_size")); }},
        {"bound_half_width", [](ExperimentConfig& c, const std::string& v) { c.bound_half_width = to_double(v, "bound_half_width"); }},
        {"split_train", [](ExperimentConfig& c, const std::string& v) { c.split_train = to_double(v, "split_train"); }},
        {"split_val", [](ExperimentConfig& c, const std::string& v) { c.split_val = to_double(v, "split_val"); }},
        {"split_test", [](ExperimentConfig& c, const std::string& v) { c.split_test = to_double(v, "split_test"); }},
        {"distribution_bins", [](ExperimentConfig& c, const std::string& v) { c.distribution_bins = static_cast<int>(to_ll(v, "distribution_bins")); }},
        {"classifier.epochs", [](ExperimentConfig& c, const std::string& v) { c.classifier.epochs = static_cast<int>(to_ll(v, "classifier.epochs")); }},
        {"classifier.learning_rate", [](ExperimentConfig& c, const std::string& v) { c.classifier.learning_rate = to_double(v, "classifier.learning_rate"); }},
        {"classifier.momentum", [](ExperimentConfig& c, const std::string& v) { c.classifier.momentum = to_double(v, "classifier.momentum"); }},
        {"classifier.batch_size", [](ExperimentConfig& c, const std::string& v) { c.classifier.batch_size = static_cast<int>(to_ll(v, "classifier.batch_size")); }},
        {"classifier.optimizer", [](ExperimentConfig& c, const std::string& v) { c.classifier.optimizer = v; }},
        {"autoencoder.epochs", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.epochs = static_cast<int>(to_ll(v, "autoencoder.epochs")); }},
        {"autoencoder.learning_rate", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.learning_rate = to_double(v, "autoencoder.learning_rate"); }},
        {"autoencoder.momentum", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.momentum = to_double(v, "autoencoder.momentum"); }},
        {"autoencoder.batch_size", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.batch_size = static_cast<int>(to_ll(v, "autoencoder.batch_size")); }},
        {"autoencoder.bottleneck", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.bottleneck = static_cast<int>(to_ll(v, "autoencoder.bottleneck")); }},
        {"autoencoder.optimizer", [](ExperimentConfig& c, const std::string& v) { c.autoencoder.optimizer = v; }},
        {"out_dir", [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; }},
    };
    return m;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    // Start from the preset matching the declared scenario so that a config
    // file only needs to state deviations.  The scenario key is applied first.
    std::vector<std::pair<std::string, std::string>> pairs;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (setters().find(key) == setters().end())
            throw std::invalid_argument("config: unknown key '" + key + "'");
        pairs.emplace_back(key, value);
    }

    ExperimentConfig cfg;
    for (const auto& [key, value] : pairs)
        if (key == "scenario") {
            if (value == "cable") cfg = cable_default_config();
            else if (value == "radio") cfg = radio_default_config();
            else throw std::invalid_argument("config: scenario must be cable or radio, got '" + value + "'");
        }
    for (const auto& [key, value] : pairs) setters().at(key)(cfg, value);
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    std::stringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    os << "scenario = " << cfg.scenario << "\n";
    os << "master_seed = " << cfg.master_seed << "\n";
    os << "k = " << cfg.k << "\n";
    os << "tx_rel_power = " << num(cfg.tx_rel_power) << "\n";
    os << "rx_rel_gain = " << num(cfg.rx_rel_gain) << "\n";
    os << "rjp = " << format_list(cfg.rjp) << "\n";
    os << "attenuation_db = " << format_list(cfg.attenuation_db) << "\n";
    os << "jammer_waveform = " << cfg.jammer_waveform << "\n";
    os << "jammer_tone_offset_hz = " << num(cfg.jammer_tone_offset_hz) << "\n";
    os << "sample_rate_hz = " << num(cfg.sample_rate_hz) << "\n";
    os << "carrier_freq_hz = " << num(cfg.carrier_freq_hz) << "\n";
    os << "sps = " << cfg.sps << "\n";
    os << "noise_floor_dbm = " << num(cfg.noise_floor_dbm) << "\n";
    os << "symbols_per_cell = " << cfg.symbols_per_cell << "\n";
    os << "train_symbols_per_cell = " << cfg.train_symbols_per_cell << "\n";
    os << "stats_samples_per_cell = " << cfg.stats_samples_per_cell << "\n";
    os << "samples_per_image = " << cfg.samples_per_image << "\n";
    os << "image_size = " << cfg.image_size << "\n";
    os << "bound_half_width = " << num(cfg.bound_half_width) << "\n";
    os << "split_train = " << num(cfg.split_train) << "\n";
    os << "split_val = " << num(cfg.split_val) << "\n";
    os << "split_test = " << num(cfg.split_test) << "\n";
    os << "distribution_bins = " << cfg.distribution_bins << "\n";
    os << "classifier.epochs = " << cfg.classifier.epochs << "\n";
    os << "classifier.learning_rate = " << num(cfg.classifier.learning_rate) << "\n";
    os << "classifier.momentum = " << num(cfg.classifier.momentum) << "\n";
    os << "classifier.batch_size = " << cfg.classifier.batch_size << "\n";
    os << "classifier.optimizer = " << cfg.classifier.optimizer << "\n";
    os << "autoencoder.epochs = " << cfg.autoencoder.epochs << "\n";
    os << "autoencoder.learning_rate = " << num(cfg.autoencoder.learning_rate) << "\n";
    os << "autoencoder.momentum = " << num(cfg.autoencoder.momentum) << "\n";
    os << "autoencoder.batch_size = " << cfg.autoencoder.batch_size << "\n";
    os << "autoencoder.bottleneck = " << cfg.autoencoder.bottleneck << "\n";
    os << "autoencoder.optimizer = " << cfg.autoencoder.optimizer << "\n";
    os << "out_dir = " << cfg.out_dir << "\n";
    return os.str();
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.scenario != "cable" && cfg.scenario != "radio")
        throw std::invalid_argument("config: scenario must be cable or radio");
    if (cfg.k < 2) throw std::invalid_argument("config: k must be >= 2");
    if (cfg.tx_rel_power < 0.01 || cfg.tx_rel_power > 1.0)
        throw std::invalid_argument("config: tx_rel_power must be in [0.01, 1]");
    if (cfg.rx_rel_gain <= 0.0 || cfg.rx_rel_gain > 1.0)
        throw std::invalid_argument("config: rx_rel_gain must be in (0, 1]");
    for (double r : cfg.rjp)
        if (r < 0.0 || r > 1.0) throw std::invalid_argument("config: rjp values must be in [0, 1]");
    for (double a : cfg.attenuation_db)
        if (a < 0.0) throw std::invalid_argument("config: attenuation_db must be >= 0");
    if (cfg.jammer_waveform != "gaussian_noise" && cfg.jammer_waveform != "single_tone")
        throw std::invalid_argument("config: jammer_waveform must be gaussian_noise or single_tone");
    if (cfg.sps < 2) throw std::invalid_argument("config: sps must be >= 2");
    if (cfg.sample_rate_hz <= 0.0) throw std::invalid_argument("config: sample_rate_hz must be > 0");
    if (cfg.split_train <= 0.0 || cfg.split_val <= 0.0 || cfg.split_test <= 0.0)
        throw std::invalid_argument("config: split fractions must be positive");
    if (std::abs(cfg.split_train + cfg.split_val + cfg.split_test - 1.0) > 1e-9)
        throw std::invalid_argument("config: split fractions must sum to 1");
    if (cfg.image_size < 2 || cfg.image_size % 4 != 0)
        throw std::invalid_argument("config: image_size must be a positive multiple of 4");
    if (cfg.samples_per_image < 1)
        throw std::invalid_argument("config: samples_per_image must be >= 1");
    if (cfg.distribution_bins < 2)
        throw std::invalid_argument("config: distribution_bins must be >= 2");
    if (cfg.bound_half_width <= 0.0)
        throw std::invalid_argument("config: bound_half_width must be > 0");
}

}  // namespace rfveil

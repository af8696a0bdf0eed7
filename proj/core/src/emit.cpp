#include "rfveil/emit.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rfveil {

namespace {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string jfmt(double v) { return std::isfinite(v) ? fmt(v) : std::string("null"); }

class RowSink {
  public:
    RowSink(EmitFormat format, std::vector<std::string> columns)
        : format_(format), columns_(std::move(columns)) {
        if (format_ == EmitFormat::csv) {
            for (std::size_t i = 0; i < columns_.size(); ++i) {
                if (i) body_ << ',';
                body_ << columns_[i];
            }
            body_ << '\n';
        } else {
            body_ << "{\n  \"rows\": [";
        }
    }

    // One row; values are pre-formatted CSV tokens paired with JSON tokens.
    void row(const std::vector<std::pair<std::string, std::string>>& values) {
        if (values.size() != columns_.size())
            throw std::logic_error("emit_results: column count mismatch");
        if (format_ == EmitFormat::csv) {
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) body_ << ',';
                body_ << values[i].first;
            }
            body_ << '\n';
        } else {
            body_ << (n_rows_ ? ",\n    {" : "\n    {");
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (i) body_ << ", ";
                body_ << '"' << columns_[i] << "\": " << values[i].second;
            }
            body_ << '}';
        }
        ++n_rows_;
    }

    std::string finish() {
        if (format_ == EmitFormat::json) body_ << (n_rows_ ? "\n  ]\n}\n" : "]\n}\n");
        return body_.str();
    }

  private:
    EmitFormat format_;
    std::vector<std::string> columns_;
    std::ostringstream body_;
    std::size_t n_rows_ = 0;
};

std::pair<std::string, std::string> num(double v) { return {fmt(v), jfmt(v)}; }
std::pair<std::string, std::string> num(std::size_t v) {
    const std::string s = std::to_string(v);
    return {s, s};
}
std::pair<std::string, std::string> num(int v) {
    const std::string s = std::to_string(v);
    return {s, s};
}
std::pair<std::string, std::string> flag(bool v) {
    return {v ? "1" : "0", v ? "true" : "false"};
}

void write_file(const std::string& path, const std::string& content,
                std::vector<std::string>& written) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("emit_results: cannot open " + path);
    os << content;
    if (!os) throw std::runtime_error("emit_results: write failed for " + path);
    written.push_back(path);
}

std::string extension(EmitFormat f) { return f == EmitFormat::csv ? ".csv" : ".json"; }

void emit_cdf_file(const std::vector<DistRow>& rows, bool phase, EmitFormat format,
                   const std::string& path, std::vector<std::string>& written) {
    RowSink sink(format, {"rjp", "attenuation_db", "x", "cdf", "ks_vs_unjammed"});
    for (const auto& row : rows) {
        const Distribution& dist = phase ? row.phase : row.amplitude;
        const double ks = phase ? row.ks_phase_vs_unjammed : row.ks_amplitude_vs_unjammed;
        for (std::size_t i = 0; i < dist.cdf_x.size(); ++i)
            sink.row({num(row.rjp), num(row.attenuation_db), num(dist.cdf_x[i]),
                      num(dist.cdf_y[i]), num(ks)});
    }
    write_file(path, sink.finish(), written);
}

void emit_roc_file(const SweepResult& result, bool radio_only, EmitFormat format,
                   const std::string& path, std::vector<std::string>& written) {
    RowSink sink(format,
                 {"device_id", "rjp", "attenuation_db", "auc", "threshold", "fpr", "tpr"});
    const bool is_radio = result.config.scenario == "radio";
    if (!radio_only || is_radio) {
        for (const auto& row : result.t_anonymity.rows) {
            if (row.excluded) continue;
            for (std::size_t i = 0; i < row.roc.points.size(); ++i)
                sink.row({num(row.device_id), num(row.rjp), num(row.attenuation_db),
                          num(row.auc), num(row.roc.thresholds[i]), num(row.roc.points[i].first),
                          num(row.roc.points[i].second)});
        }
    }
    write_file(path, sink.finish(), written);
}

}  // namespace

std::vector<std::string> emit_results(const SweepResult& result, EmitFormat format,
                                      const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("emit_results: cannot create " + out_dir);
    const std::string ext = extension(format);
    std::vector<std::string> written;

    emit_cdf_file(result.dist_rows, false, format, out_dir + "/fig5_amplitude_cdf" + ext, written);
    emit_cdf_file(result.dist_rows, true, format, out_dir + "/fig6_phase_cdf" + ext, written);

    {
        RowSink sink(format, {"device_id", "rjp", "attenuation_db", "snr_db", "density"});
        for (const auto& row : result.snr_rows) {
            if (!row.converged) continue;
            for (std::size_t i = 0; i < row.snr_pdf.pdf_x.size(); ++i)
                sink.row({num(row.device_id), num(row.rjp), num(row.attenuation_db),
                          num(row.snr_pdf.pdf_x[i]), num(row.snr_pdf.pdf_y[i])});
        }
        write_file(out_dir + "/fig7_snr_pdf" + ext, sink.finish(), written);
    }
    {
        RowSink sink(format,
                     {"device_id", "rjp", "attenuation_db", "snr_db", "ber", "converged"});
        for (const auto& row : result.snr_rows)
            sink.row({num(row.device_id), num(row.rjp), num(row.attenuation_db),
                      num(row.mean_snr_db), num(row.ber), flag(row.converged)});
        write_file(out_dir + "/fig8_snr_vs_rjp" + ext, sink.finish(), written);
    }
    {
        RowSink sink(format, {"rjp", "attenuation_db", "accuracy", "ber", "mean_snr_db"});
        for (const auto& row : result.k_anonymity.rows) {
            if (row.excluded) continue;
            sink.row({num(row.rjp), num(row.attenuation_db), num(row.accuracy), num(row.ber),
                      num(row.mean_snr_db)});
        }
        write_file(out_dir + "/fig10_accuracy_vs_rjp" + ext, sink.finish(), written);
    }
    emit_roc_file(result, false, format, out_dir + "/fig11_roc" + ext, written);
    {
        RowSink sink(format, {"device_id", "rjp", "attenuation_db", "snr_db", "auc"});
        for (const auto& row : result.t_anonymity.rows) {
            if (row.excluded) continue;
            sink.row({num(row.device_id), num(row.rjp), num(row.attenuation_db), num(row.snr_db),
                      num(row.auc)});
        }
        write_file(out_dir + "/fig12_auc_vs_snr" + ext, sink.finish(), written);
    }
    emit_roc_file(result, true, format, out_dir + "/fig13_radio_roc" + ext, written);
    {
        RowSink sink(format,
                     {"device_id", "rjp", "attenuation_db", "converged", "ber", "snr_db"});
        for (const auto& row : result.snr_rows) {
            const bool flagged = !row.converged || row.ber > 0.0;
            if (!flagged) continue;
            sink.row({num(row.device_id), num(row.rjp), num(row.attenuation_db),
                      flag(row.converged), num(row.ber), num(row.mean_snr_db)});
        }
        write_file(out_dir + "/flagged_cells" + ext, sink.finish(), written);
    }
    return written;
}

}  // namespace rfveil

#pragma once

#include <string>
#include <vector>

#include "rfveil/experiment.hpp"

namespace rfveil {

enum class EmitFormat { csv, json };

// Writes one file per figure analogue (fig5_amplitude_cdf, fig6_phase_cdf,
// fig7_snr_pdf, fig8_snr_vs_rjp, fig10_accuracy_vs_rjp, fig11_roc,
// fig12_auc_vs_snr, fig13_radio_roc) plus flagged_cells, in the requested
// format, into out_dir.  Returns the paths written.
//
// Output is byte-deterministic: fixed column/key order, floats printed with
// %.9g, newline "\n", no timestamps.  Rows from cells that failed the link
// gate (no convergence, or BER > 0) appear only in flagged_cells, never in
// the accuracy/ROC/AUC tables.  Non-finite floats are "inf"/"-inf"/"nan" in
// CSV and null in JSON.
std::vector<std::string> emit_results(const SweepResult& result, EmitFormat format,
                                      const std::string& out_dir);

}  // namespace rfveil

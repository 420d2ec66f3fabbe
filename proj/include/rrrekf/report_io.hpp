#pragma once

#include <filesystem>

#include "rrrekf/config.hpp"
#include "rrrekf/diagnostics.hpp"

namespace rrrekf {

/**
 * @brief Serialize a report into `dir`:
 *   theta.csv      name, estimate, sigma, pct_crb (model parameter order)
 *   corr100.csv    rounded 100x correlation matrix
 *   qr.csv         final Q and R diagonals
 *   costs.csv      J1..J8 per iteration
 *   residues.csv   three residue series with bounds and PSD-loss flags
 *   trajectory.csv open-loop / prior / posterior / smoothed states and z
 *   flags.txt      anomaly log (clamps, PSD losses, J2 sign events)
 * Deterministic ordering, 17 significant digits.
 */
void write_report(const EstimationReport& report, const std::filesystem::path& dir);

/// Side-by-side parameter table for several reports (one column pair each).
void write_comparison(const std::vector<EstimationReport>& reports,
                      const std::filesystem::path& file);

/// Everything needed to reproduce the final pass of a run bit for bit.
void write_checkpoint(const EstimationReport& report, const RunConfig& cfg,
                      const std::filesystem::path& file);

/// Re-run the checkpointed final pass and rebuild the full report.
EstimationReport rebuild_from_checkpoint(const std::filesystem::path& file,
                                         std::string* dataset_path = nullptr);

}  // namespace rrrekf

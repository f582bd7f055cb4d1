#pragma once

#include <iosfwd>
#include <string>

#include "regretlab/config.hpp"

namespace regretlab {

// Runs every run of the experiment across a worker pool and writes
//   <outdir>/<name>/run<k>/trajectory.csv
//   <outdir>/<name>/summary.json     (per-run stats + aggregates)
//   <outdir>/<name>/manifest.json    (artifact paths, sizes, content hashes)
// CSV bodies are byte-identical across repeat invocations with the same
// config and seed; only the summary's metadata block carries a timestamp.
// On failure writes <outdir>/<name>/error.json and returns 1; returns 0 on
// success. Progress and the artifact locations are logged to `log`.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace regretlab

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qot/plan_analysis.hpp"
#include "qot/solver.hpp"
#include "qot/sweep.hpp"

namespace qot {

/// All numeric output is written with 17 significant digits so that
/// round-tripping through text is exact and reruns are byte-identical.
std::string fmt17(double v);

uint64_t fnv1a(const std::string& data);
std::string hash_file(const std::string& path);  // fnv1a as 16 hex digits

/// Writes <stem>_f.csv, <stem>_g.csv (grid_value, potential_value) and
/// <stem>.json with the run metadata and the marginal parameters.
/// Returns the paths written.
std::vector<std::string> write_checkpoint(const std::string& stem, const PotentialPair& p);

/// Rebuilds the pair from <stem>.json + the two CSVs. Throws std::runtime_error
/// on missing files, malformed rows, or metadata/grid mismatches.
PotentialPair read_checkpoint(const std::string& stem);

/// x, y_m, y_M, diameter, f_prime, f_second_or_nan, barycentric per x node.
void write_sections_csv(const std::string& path, const PotentialPair& p);

void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& recs);

void write_fits_json(const std::string& path,
                     const std::vector<std::pair<std::string, RateFit>>& fits);

/// manifest.json in `dir` listing every path with its content hash.
void write_manifest(const std::string& dir, const std::vector<std::string>& paths);

}  // namespace qot

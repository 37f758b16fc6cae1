#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qot/marginal.hpp"
#include "qot/sweep.hpp"

namespace qot {

enum class RunMode { Solve, Sweep, Check, Oracle };

struct MarginalSpec {
    std::string family = "uniform";
    double a = 0, b = 1;
    double c0 = 0, c1 = 0;  // linear
    double beta = 0;        // cosine_bump

    Marginal build() const;  // throws on invalid parameters
};

struct ExperimentConfig {
    MarginalSpec marginal0, marginal1;
    RunMode mode = RunMode::Solve;
    std::vector<double> eps;  // one value for solve/oracle, ladder for sweep
    SweepConfig sweep;        // holds the solver overrides too
    std::string outdir = ".";
    unsigned seed = 0;  // reserved; the pipeline is deterministic
};

/// Collects every validation problem instead of stopping at the first.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

/// Flat INI-like text: [marginal0], [marginal1], [run] sections with
/// key = value lines; '#' starts a comment. Unset keys take defaults.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config(const std::string& path);

}  // namespace qot

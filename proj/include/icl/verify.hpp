#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icl/oracle.hpp"
#include "icl/rng.hpp"

namespace icl {

/// Outcome of one randomized battery. Seeds list every checked instance so a
/// failure can be replayed in isolation.
struct BatteryResult {
    bool pass = true;
    int checked = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::string> failures;

    void fail(std::uint64_t seed, const std::string& what);
};

/// Random instance on <= max_atoms atoms: preorder with optional ties,
/// responses with repeated values, strictly positive weights.
struct RandomInstance {
    FiniteSpace space;
    Preorder order;
    std::vector<double> y;
};

RandomInstance random_instance(Rng& rng, int max_atoms, bool covariate_based = false);

/// Fit certificate + three-way solver agreement + ICL self-calibration.
BatteryResult run_oracle_battery(std::uint64_t seed, int instances, int max_atoms);

/// CRPS minimality, elementary-score minimality per threshold, and quantile
/// path equalities against the brute oracles.
BatteryResult run_universality_battery(std::uint64_t seed, int instances, int max_atoms);

/// Calibration implication hierarchy over random forecast profiles.
BatteryResult run_hierarchy_battery(std::uint64_t seed, int profiles);

/// Fixed-point agreement batteries (mean and quantile).
BatteryResult run_fixed_point_battery(std::uint64_t seed, int mean_cases, int quantile_cases);

/// Classical-equivalence battery: flag agrees with direct monotonicity check
/// and, when true, ICL equals the classical law.
BatteryResult run_classical_battery(std::uint64_t seed, int instances, int max_atoms);

/// Finds all four counterexamples within budget; when fixtures_dir is
/// nonempty, additionally replays each stored fixture and compares the
/// serialized instances byte for byte.
BatteryResult run_counterexample_battery(std::uint64_t seed, const std::string& fixtures_dir);

}  // namespace icl

#pragma once

#include "tga/attack.hpp"
#include "tga/countermeasure.hpp"
#include "tga/locker.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tga {

/// Environment variable holding the worker count for parallel runs.
inline constexpr const char* kWorkersEnv = "TGA_WORKERS";

/// Worker count from TGA_WORKERS, else the hardware concurrency (at least 1).
unsigned workers_from_env();

struct ExperimentSpec {
    std::string benchmark;
    Scheme scheme = Scheme::Rll;
    std::size_t key_size = 128;
    KeyBudget budget{32, 64};
    std::size_t cluster = 3;
    /// Placement style inside countermeasure families (RLL or SLL).
    Scheme cm_base = Scheme::Rll;
    std::size_t runs = 20;
    std::uint64_t base_seed = 1;
    int max_layers = 4;
    std::size_t max_uf_keys = kMaxUfKeys;
};

struct RunResult {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::size_t key_size = 0;
    Score score;
    /// Correct-key equivalence of the locked instance.
    bool verified = false;
    double seconds = 0.0;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<RunResult> runs;
    double sr_mean = 0.0;
    double sr_stddev = 0.0;
    double mr_mean = 0.0;
    double time_min = 0.0;
    double time_mean = 0.0;
    double time_max = 0.0;
};

/// Locks a fresh instance for one seed with the scheme and sizes of `spec`.
LockedCircuit lock_for_spec(const Netlist& n, const ExperimentSpec& spec, std::uint64_t seed);

/// lock -> verify -> attack -> score for runs 0..runs-1 with seed base_seed + run.
ExperimentResult run_experiment(const Netlist& n, const ExperimentSpec& spec, unsigned workers = 1);

/// Recomputes the aggregates from the per-run rows.
void aggregate(ExperimentResult& r);

inline constexpr const char* kCsvSchema = "# tga-eval-csv v1";

/// Per-run metrics; byte-identical for identical specs.
std::string results_csv(const ExperimentResult& r);
/// Per-run attack times, kept apart from the deterministic files.
std::string timing_csv(const ExperimentResult& r);
/// Spec plus SR/MR aggregates; byte-identical for identical specs.
std::string aggregate_json(const ExperimentResult& r);
/// Attack time min/mean/max.
std::string timing_json(const ExperimentResult& r);

}  // namespace tga

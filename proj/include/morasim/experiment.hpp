#ifndef MORASIM_EXPERIMENT_HPP
#define MORASIM_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "morasim/engine.hpp"
#include "morasim/model.hpp"

namespace morasim {

struct ExperimentConfig {
    std::vector<Rational> d_max{Rational(1, 10), Rational(2, 5), Rational(7, 10), Rational(1)};
    Rational band_width = Rational(1, 20);
    Rational max_density = 3;  // bands [d, d + width] with d + width <= max_density
    std::size_t sets_per_band = 20;
    std::int64_t hyperperiods = 5;
    // Policies compared against MAX: "mora", "mora:<s_off>" or "const:<s>".
    std::vector<std::string> policies{"mora"};
    PriorityOrder priority = PriorityOrder::Edf;
    std::vector<Time> period_pool{10, 20, 40, 50, 80, 100};
    std::uint64_t seed = 1;
    unsigned threads = 1;
    bool check_invariants = false;
};

// Throws Error on an invalid configuration.
void validate_config(const ExperimentConfig& config);
Policy parse_policy(const std::string& text);
std::vector<Rational> density_bands(const ExperimentConfig& config);

// Seed of one (D_max, band, set) cell; independent of thread count.
std::uint64_t cell_seed(std::uint64_t master, std::size_t dmax_index, std::size_t band_index, std::size_t set_index);

struct RunRecord {
    Rational d_max;
    Rational band_low;
    std::size_t set = 0;
    std::uint64_t seed = 0;
    std::size_t tasks = 0;
    std::size_t processors = 0;
    std::string sizing_test;
    Energy max_energy;
    std::vector<Rational> pct;  // per policy, 100 * E / E_max
    std::string error;          // empty when every run met all deadlines
};

struct PolicySummary {
    std::string policy;
    double mean_pct = 0;
    double stddev_pct = 0;
    std::size_t n_sets = 0;
};

struct DmaxSummary {
    Rational d_max;
    double mean_m_over_n = 0;
    std::size_t n_sets = 0;
    std::vector<PolicySummary> policies;  // same order as the config
};

struct ExperimentResult {
    std::vector<RunRecord> runs;  // sorted by (d_max, band, set)
    std::vector<DmaxSummary> summary;
    std::size_t failures = 0;
};

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const ProcessorModel& model,
                                const ProgressFn& progress = {});

// Dmax,policy,mean_pct,stddev_pct,n_sets (MAX rows carry the literal 100).
std::string consumption_csv(const ExperimentConfig& config, const ExperimentResult& result);
// Dmax,mean_m_over_n
std::string ratio_csv(const ExperimentResult& result);
// One row per generated set.
std::string runs_csv(const ExperimentConfig& config, const ExperimentResult& result);
std::string consumption_svg(const ExperimentConfig& config, const ExperimentResult& result);
std::string ratio_svg(const ExperimentResult& result);

}  // namespace morasim

#endif  // MORASIM_EXPERIMENT_HPP

#pragma once

// Seeded experiment runner. Each trial draws from its own CounterRng stream
// (seed, trial index), so results do not depend on thread count or order.
// Reports go to <out>/report.json and <out>/table.csv.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entropy/entropy_lab.hpp"
#include "entropy/rng.hpp"
#include "entropy/tree_core.hpp"
#include "entropy/volterra.hpp"

namespace entropy {

enum class ExperimentKind { tree_approx, tree_scaling, subtree_count, volterra_check, volterra_approx, nets };

std::string to_string(ExperimentKind kind);
/// Accepts the CLI spellings ("tree-approx", …); std::invalid_argument otherwise.
ExperimentKind parse_experiment_kind(const std::string& name);

struct Tolerances {
    double inequality = 1e-12;  // slack on exact inequalities
    double quadrature = 1e-10;  // adaptive quadrature abs_tol
    double oracle = 1e-8;       // quadrature vs closed form, modulus and sign checks
    double degenerate = 1e-10;  // degenerate negative-dependence cases
    double approximation = 1e-6;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::tree_approx;
    double beta = 2.0;
    std::vector<int> n_values;
    int trials = 100;
    std::uint64_t seed = 42;
    Tolerances tol;
    std::string out;      // output directory; empty = do not write
    int depth = 0;        // tree depth for tree-scaling / nets (0 = kind default)
    int max_atoms = 50;   // tree measures; Volterra measures use min(max_atoms, 12)
    unsigned threads = 0; // 0 = ENTROPY_LAB_THREADS or hardware concurrency

    /// Throws std::invalid_argument on an unusable spec.
    void validate() const;
};

/// Spec with the per-kind defaults (n values, trials, beta).
ExperimentSpec default_spec(ExperimentKind kind);

struct TrialRecord {
    std::string check;  // what was measured, e.g. "residual", "modulus"
    int n = 0;
    int trial = 0;
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
    bool quadrature_failure = false;
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::vector<TrialRecord> records;
    std::size_t passed = 0;
    std::size_t failed = 0;
    std::size_t quadrature_failures = 0;
    std::size_t quadrature_trials = 0;
    double max_ratio = 0.0;         // max value/bound over records with bound > 0
    std::optional<double> slope;    // tree-scaling only
    double wall_time = 0.0;         // seconds

    /// 0 all pass; 3 every quadrature-dependent trial failed; 2 otherwise on any failure.
    int exit_code() const;
};

/// `atoms` nodes drawn uniformly by level (0..max_depth) then index, signed
/// uniform masses, normalised to ‖μ‖₁ = 1. max_depth ≤ kMaxLevel.
TreeMeasure random_tree_measure(CounterRng& rng, int max_depth, int atoms);

/// Atomic measure on (0, r]: half the atoms log-uniform in [1e-6 r, r], half
/// uniform; signed uniform masses, normalised to ‖μ‖₁ = 1.
IntervalMeasure random_interval_measure(CounterRng& rng, double r, int atoms);

/// Thread count after applying ENTROPY_LAB_THREADS as a cap.
unsigned resolve_threads(unsigned requested);

/// Combined-net experiment for one n (β = 2): Γ_n, one greedy member net per
/// subtree, then dist(V*μ, net) against S₁ + n^{-1/2} + 2δ and S₁ + S₂(μ) + 2δ.
struct CombinedNetOutcome {
    std::size_t family_size = 0;
    std::size_t net_size = 0;
    double size_bound = 0.0;
    double s1 = 0.0;
    std::vector<double> distances;
    std::vector<double> s2;  // per trial: min over Γ of ‖(V* − A_Υ)μ‖
    double delta = 1e-3;
};
CombinedNetOutcome combined_net_experiment(int n, int trials, std::uint64_t seed, int max_atoms = 50);

/// Runs the experiment, writes report.json and table.csv when spec.out is set.
ExperimentReport run(const ExperimentSpec& spec);

/// Deterministic JSON (wall_time is the only varying field).
std::string report_json(const ExperimentReport& report);
std::string report_csv(const ExperimentReport& report);
void write_report(const ExperimentReport& report, const std::string& dir);

}  // namespace entropy

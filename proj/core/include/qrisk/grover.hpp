#pragma once

#include <cstdint>
#include <vector>

#include "qrisk/qae.hpp"

namespace qrisk {

struct SearchTarget {
    std::vector<std::uint64_t> outcomes; // QAE outcomes to mark
};

/// Nearest grid cell to the target probability plus its mirror, optionally
/// widened by +-`widen` cells on each side.
SearchTarget target_from_probability(double p, int n_ae, int widen = 0);

struct SearchConfig {
    int steps = 1;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
};

/// Ŝ = (π/4)·sqrt(N/(M·factor)), rounded as max(1, floor(·)).
int optimal_steps(double n_states, double m_solutions, double effective_factor = 1.8);
double optimal_steps_raw(double n_states, double m_solutions, double effective_factor = 1.8);

struct SearchResult {
    std::vector<double> marginal; // exact, over the modification register
    Histogram histogram;          // sampled when shots > 0
    int top_index = 0;
    double top_probability = 0.0;
    std::uint64_t model_calls = 0; // RM/RM+ applications
    int steps = 0;
};

/// Oracle = QAE, one conditioned phase flip per target outcome, inverse QAE.
/// Requires a dedicated |1>-prepared phase qubit `grover_phase`.
Circuit build_oracle(const QaeCircuit& body, const SearchTarget& target, int grover_phase);

/// Inversion about the mean over a register.
Circuit diffusion(const std::vector<int>& reg, int n_qubits);

SearchResult run_search(const RiskModel& model, const SearchTarget& target, const SearchConfig& config,
                        int n_ae, CompileOptions opts = {});

/// RM applications consumed by `steps` oracle invocations at width n_ae.
std::uint64_t search_model_calls(int steps, int n_ae);

struct ScalingRow {
    int n_items = 0;
    int n_params = 0;
    std::uint64_t classical_evals = 0;
    std::uint64_t quantum_model_calls = 0;
    int grover_steps = 0;
    double planted_probability = 0.0; // exact search success of the planted index
    std::uint64_t classical_shots = 0;
};

/// The chain-model scaling study: classical per-parameter Monte Carlo versus
/// Grover search over the modification register, sizes min..max.
std::vector<ScalingRow> scaling_experiment(int min_items, int max_items, double confidence,
                                           std::uint64_t seed, int n_ae = 6);

std::string scaling_csv(const std::vector<ScalingRow>& rows);

} // namespace qrisk

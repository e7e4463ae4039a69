#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrisk/circuit.hpp"

namespace qrisk {

/// M̂ = Π (cos(αᵢ) + sin(αᵢ))²
double effective_solutions(const std::vector<double>& alpha);

/// Ŝ = (π/4)·sqrt(N/M̂), unrounded.
double predicted_steps(double n_states, double m_hat);

/// P = Π cos²(αᵢ)
double predicted_success(const std::vector<double>& alpha);

/// Grover with the mixing-rotation (false-positive) oracle: search qubits
/// conjugated by U3(2αᵢ) around a perfect mark of |1...1>. Returns the exact
/// probability of the true solution after `steps` iterations.
double run_false_positive_grover(int n, const std::vector<double>& alpha, int steps);

/// Textbook Grover over n qubits with the top `m_solutions` basis states
/// marked; returns exact success probability after `steps`.
double standard_grover_success(int n, int m_solutions, int steps);

/// Root oracle: the mark is guarded by an internal register (X-prepared
/// indicator plus k Hadamard ancillas) and fires only on the given ancilla
/// sign patterns ('+' matches |0>, '-' matches |1>). The product over all
/// 2^k patterns equals the perfect oracle. `ancilla_alpha` rotates ancilla 0
/// by U3(2α) instead of H (unequal activation).
Circuit build_root_oracle(int n, std::uint64_t solution, int k, const std::vector<std::string>& patterns,
                          double ancilla_alpha = 0.0);

/// First `a` sign patterns in binary order (bit j: 0 -> '+', 1 -> '-').
std::vector<std::string> first_patterns(int k, int a);

/// Success of root-oracle Grover, summed over all ancilla states.
double root_grover_success(int n, int m_solutions, int k, int a, int steps, double ancilla_alpha = 0.0);

struct RootDelta {
    double delta_root = 0.0; // ΔP̃ₙ
    double delta_std = 0.0;  // ΔPₙ
    double ratio = 0.0;
};

RootDelta root_grover_delta(int n, int m_solutions, int k, int a, int steps);

/// Verify P̃ₙ ≥ (cos²α / 2^k)·Pₙ for steps 1..max_steps; returns the smallest
/// measured P̃ₙ/Pₙ ratio.
double unequal_activation_ratio(double alpha, int k, int n, int max_steps);

} // namespace qrisk

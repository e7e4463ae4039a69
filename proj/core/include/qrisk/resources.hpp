#pragma once

#include <cstdint>
#include <string>

#include "qrisk/circuit.hpp"

namespace qrisk {

struct QubitEstimate {
    int items = 0;
    int tree_ancilla = 0;
    int modification = 0; // n_s
    int qae = 0;          // n_ae
    int cost = 0;         // n_c
    int indicator = 1;
    int phase = 1;
    int headline = 0; // items + modification + tree_ancilla + qae + cost
    int total = 0;    // headline + indicator + phase
};

/// Qubit budget for n_r risk items with n_t transitions, an n_c-bit cost
/// register and an n_ae-bit estimation register. The modification register
/// holds one setting per parameter (ceil(log2(n_r+n_t)) qubits); the
/// transition-tree ancilla overhead is estimated as ceil(log10(n_r+n_t)).
QubitEstimate estimate_qubits(int n_r, int n_t, int n_c, int n_ae);

struct GateEstimate {
    double model_gates = 0.0;  // m_r
    double qae_gates = 0.0;    // 2^n_ae * m_r
    int grover_steps = 0;      // n_g
    double grover_total = 0.0; // 2 * n_g * qae_gates
};

/// Gate budget: m_r = (n_r+n_t)·log10(n_r+n_t) + n_r·n_c·log10(n_c), scaled
/// through amplitude estimation and the Grover step heuristic
/// n_g = max(1, floor((π/4)·sqrt(n_params / effective_factor))).
GateEstimate estimate_gates(int n_r, int n_t, int n_c, int n_ae, int n_params,
                            double effective_factor = 1.0);

/// O(arity^2) elementary-gate expansion rule, constant 1: a gate touching
/// `arity` wires costs arity^2 elementary gates (arity 1 stays 1).
double elementary_expansion(const Circuit& circuit);
double elementary_expansion(int arity, std::uint64_t count);

std::string resource_report(const QubitEstimate& q, const GateEstimate& g);

} // namespace qrisk

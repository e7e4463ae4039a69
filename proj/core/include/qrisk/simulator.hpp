#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qrisk/circuit.hpp"

namespace qrisk {

/// Thrown when a requested simulation exceeds the dense statevector budget.
class BudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kMaxSimQubits = 26;

struct StateVector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amps;

    explicit StateVector(int n);
    double norm() const; // fixed-order chunked reduction
};

/// Apply a circuit in place. Checks |norm - 1| <= 1e-9 afterwards.
void apply(StateVector& state, const Circuit& circuit);
void apply_gate(StateVector& state, const Gate& gate);

/// Exact probability table over a register (outcome bit i = reg[i]).
std::vector<double> marginal(const StateVector& state, const std::vector<int>& reg);

struct Histogram {
    int width = 0;
    std::uint64_t shots = 0;
    std::string label;
    std::vector<std::uint64_t> counts; // indexed by outcome value
    std::vector<double> probs;         // exact marginal

    /// CSV rows `outcome,count,probability`, outcome rendered LSB-first.
    std::string to_csv() const;
    std::uint64_t mode() const;
};

/// Multinomial sample of a register via inverse CDF; bit-reproducible per seed.
Histogram sample(const StateVector& state, const std::vector<int>& reg, std::uint64_t shots,
                 std::uint64_t seed, const std::string& label = "");

std::string bits_lsb_first(std::uint64_t value, int width);

} // namespace qrisk

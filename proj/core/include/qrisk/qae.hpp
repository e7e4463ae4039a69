#pragma once

#include <cstdint>
#include <map>

#include "qrisk/compiler.hpp"
#include "qrisk/simulator.hpp"

namespace qrisk {

struct QrmParts {
    Circuit rm;  // state preparation
    Circuit qrm; // the Grover operator -RM.S0.RM+.SX (phase ancilla assumed |1>)
    RegisterLayout layout;
};

/// Compile the model and build the QRM operator over its layout (phase
/// ancilla included). The -1 factor is folded into the reflections so that
/// controlled powers keep the correct relative phase.
QrmParts build_qrm(const RiskModel& model, CompileOptions opts = {});

Circuit qft(int m);
Circuit inverse_qft(int m);

struct QaeCircuit {
    Circuit circuit;
    RegisterLayout layout; // model registers, shifted past the output register
    std::vector<int> ae_reg;
    int n_ae = 0;
};

/// Amplitude-estimation circuit: Hadamards on the output register, one RM,
/// controlled QRM^(2^j) by gate repetition, inverse QFT. Output qubit 0 is
/// the least significant bit of the outcome.
QaeCircuit build_qae(const RiskModel& model, int n_ae, int mod_index, CompileOptions opts = {});

/// Same without the phase-ancilla X and modification-register preparation;
/// this is the oracle body reused by the Grover sensitivity search.
QaeCircuit build_qae_body(const RiskModel& model, int n_ae, CompileOptions opts = {});

double decode(std::uint64_t a, int n_ae);

struct QaeResult {
    Histogram histogram; // exact probabilities, plus counts when shots > 0
    std::map<std::uint64_t, double> decoded;
    std::uint64_t mode = 0;
    double modal_mass = 0.0; // bracketing cells + mirrors, exact
};

QaeResult run_qae(const RiskModel& model, int n_ae, int mod_index, std::uint64_t shots,
                  std::uint64_t seed, CompileOptions opts = {});

} // namespace qrisk

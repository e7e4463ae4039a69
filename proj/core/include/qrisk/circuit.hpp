#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qrisk {

enum class GateKind { U3, X, Z, H, Phase, Increment };

struct Control {
    int qubit = 0;
    bool positive = true;
};

/// One gate. U3 carries (theta, phi, lambda); Phase carries theta as its
/// angle. Increment adds `amount` (mod 2^w) to the register formed by
/// `targets` (LSB first). All gates accept an arbitrary control list with
/// explicit polarities.
struct Gate {
    GateKind kind = GateKind::X;
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    long long amount = 0;
    std::vector<int> targets;
    std::vector<Control> controls;

    Gate inverse() const;
};

Gate u3(double theta, int target, std::vector<Control> controls = {});
Gate x(int target, std::vector<Control> controls = {});
Gate z(int target, std::vector<Control> controls = {});
Gate h(int target);
Gate phase(double angle, int target, std::vector<Control> controls = {});
Gate increment(long long amount, std::vector<int> reg, std::vector<Control> controls = {});

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<std::pair<std::string, std::vector<int>>> registers;

    void add(Gate g);
    Circuit inverse() const;
    /// Same circuit with every qubit index shifted by `offset`, widened to
    /// `new_n_qubits` wires.
    Circuit shifted(int offset, int new_n_qubits) const;
    /// Expand Increment gates into the multi-controlled-NOT ripple form;
    /// other gates pass through unchanged.
    Circuit lowered() const;
    std::string to_text() const;
    std::size_t gate_count() const { return gates.size(); }
    /// Largest number of wires (targets + controls) touched by one gate.
    int max_arity() const;
    void validate() const; // index ranges, target/control disjointness
};

/// Copy of `g` with one extra control attached.
Gate with_control(Gate g, Control c);

} // namespace qrisk

#pragma once

#include <map>
#include <vector>

#include "qrisk/circuit.hpp"
#include "qrisk/model.hpp"

namespace qrisk {

enum class IndicatorStyle {
    Auto,        // Masked when the threshold mask is exact, else General
    Masked,      // X on indicator controlled on the threshold's set cost bits
    General,     // two's-complement compare via add / sign test / uncompute
    Conjunction, // unit costs, threshold == item count: X controlled on all items
    None,
};

struct CompileOptions {
    bool with_modifications = false;
    bool with_cost = true; // cost register and indicator
    bool with_phase = false; // reserve the phase-kickback ancilla
    IndicatorStyle indicator = IndicatorStyle::Auto;
};

struct RegisterLayout {
    std::vector<int> mod_reg;
    std::vector<int> item_qubits; // parallel to model item order
    std::map<int, int> item_qubit; // id -> qubit
    std::vector<int> ancilla; // transition-tree ancillas
    std::vector<int> cost_reg;
    int indicator = -1;
    int phase = -1;
    int n_qubits = 0;

    /// Qubits written by RM from |0>: items, ancillas, cost, indicator.
    std::vector<int> rm_targets() const;
};

struct Compiled {
    Circuit circuit; // the RM operator
    RegisterLayout layout;
};

/// Eq: sin^2(theta/2) = p.
double angle_for_probability(double p);

Compiled compile_model(const RiskModel& model, const CompileOptions& opts = {});

/// Conditional-probability chain for an XOR group; probabilities are the
/// members' (possibly modified) intrinsic values. Pairs compile to the
/// rotation + complement-NOT form. `source` adds an outer control.
std::vector<Gate> compile_xor_chain(const std::vector<double>& probs, const std::vector<int>& qubits,
                                    std::vector<Control> source = {});

/// Binary OR-tree over m >= 2 transition sources; appends 4 doubly-controlled
/// rotations per pair onto zero-cost ancilla items. Returns the root node's
/// (qubit, effective transition probability).
std::pair<int, double> compile_transition_tree(std::vector<std::pair<int, double>> nodes,
                                               std::vector<int>& free_ancillas, std::vector<Gate>& out);

void append_cost_accumulator(Circuit& circuit, const RiskModel& model, const RegisterLayout& layout);
void append_threshold_indicator(Circuit& circuit, const RiskModel& model, const RegisterLayout& layout,
                                IndicatorStyle style);

/// True when `(v & threshold) == threshold` decides v >= threshold for every
/// reachable v, i.e. the Masked indicator is exact.
bool masked_indicator_valid(long long threshold, long long max_loss);

} // namespace qrisk

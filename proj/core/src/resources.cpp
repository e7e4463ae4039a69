#include "qrisk/resources.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qrisk {

namespace {

int ceil_log2(int v) { return v <= 1 ? 0 : static_cast<int>(std::ceil(std::log2(static_cast<double>(v)))); }
int ceil_log10(int v) { return v <= 1 ? 0 : static_cast<int>(std::ceil(std::log10(static_cast<double>(v)))); }

} // namespace

QubitEstimate estimate_qubits(int n_r, int n_t, int n_c, int n_ae) {
    if (n_r < 0 || n_t < 0 || n_c < 0 || n_ae < 0) throw std::invalid_argument("negative resource input");
    QubitEstimate e;
    e.items = n_r;
    e.modification = ceil_log2(n_r + n_t);
    e.tree_ancilla = ceil_log10(n_r + n_t);
    e.qae = n_ae;
    e.cost = n_c;
    e.headline = e.items + e.modification + e.tree_ancilla + e.qae + e.cost;
    e.total = e.headline + e.indicator + e.phase;
    return e;
}

GateEstimate estimate_gates(int n_r, int n_t, int n_c, int n_ae, int n_params, double effective_factor) {
    if (n_r < 1 || n_c < 1 || n_ae < 0 || n_params < 1) throw std::invalid_argument("resource inputs too small");
    GateEstimate e;
    const double nt = static_cast<double>(n_r + n_t);
    e.model_gates = nt * std::log10(nt) + static_cast<double>(n_r) * n_c * std::log10(static_cast<double>(n_c));
    e.qae_gates = std::pow(2.0, n_ae) * e.model_gates;
    e.grover_steps = std::max(
        1, static_cast<int>(std::floor(M_PI / 4.0 * std::sqrt(static_cast<double>(n_params) / effective_factor))));
    e.grover_total = 2.0 * e.grover_steps * e.qae_gates;
    return e;
}

double elementary_expansion(int arity, std::uint64_t count) {
    if (arity < 1) throw std::invalid_argument("arity must be >= 1");
    return static_cast<double>(count) * (arity == 1 ? 1.0 : static_cast<double>(arity) * arity);
}

double elementary_expansion(const Circuit& circuit) {
    double total = 0.0;
    for (const Gate& g : circuit.gates)
        total += elementary_expansion(static_cast<int>(g.targets.size() + g.controls.size()), 1);
    return total;
}

std::string resource_report(const QubitEstimate& q, const GateEstimate& g) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "qubits: items=%d modification=%d tree_ancilla=%d qae=%d cost=%d headline=%d "
                  "total=%d (with indicator+phase)\n"
                  "gates: model=%.4g qae=%.4g grover_steps=%d grover_total=%.4g\n",
                  q.items, q.modification, q.tree_ancilla, q.qae, q.cost, q.headline, q.total,
                  g.model_gates, g.qae_gates, g.grover_steps, g.grover_total);
    return buf;
}

} // namespace qrisk

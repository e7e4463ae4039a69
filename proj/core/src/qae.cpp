#include "qrisk/qae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qrisk {

QrmParts build_qrm(const RiskModel& model, CompileOptions opts) {
    opts.with_phase = true;
    Compiled c = compile_model(model, opts);
    if (c.layout.indicator < 0) throw ModelError("indicator-missing", "QRM needs a threshold indicator");
    QrmParts parts;
    parts.layout = c.layout;
    parts.rm = c.circuit;
    Circuit& q = parts.qrm;
    q.n_qubits = c.circuit.n_qubits;
    q.registers = c.circuit.registers;
    q.add(z(parts.layout.phase, {{parts.layout.indicator, true}})); // S_X
    const Circuit inv = c.circuit.inverse();
    q.gates.insert(q.gates.end(), inv.gates.begin(), inv.gates.end());
    std::vector<Control> zeros;
    for (int t : parts.layout.rm_targets()) zeros.push_back({t, false});
    q.add(z(parts.layout.phase, std::move(zeros))); // zero-state flip
    q.add(z(parts.layout.phase));                   // global -1, made relative under control
    q.gates.insert(q.gates.end(), c.circuit.gates.begin(), c.circuit.gates.end());
    return parts;
}

Circuit qft(int m) {
    Circuit c;
    c.n_qubits = m;
    for (int j = m - 1; j >= 0; --j) {
        c.add(h(j));
        for (int k = j - 1; k >= 0; --k)
            c.add(phase(M_PI / static_cast<double>(1LL << (j - k)), j, {{k, true}}));
    }
    for (int i = 0; i < m / 2; ++i) {
        const int a = i, b = m - 1 - i;
        c.add(x(b, {{a, true}}));
        c.add(x(a, {{b, true}}));
        c.add(x(b, {{a, true}}));
    }
    return c;
}

Circuit inverse_qft(int m) { return qft(m).inverse(); }

QaeCircuit build_qae_body(const RiskModel& model, int n_ae, CompileOptions opts) {
    if (n_ae < 1) throw std::invalid_argument("n_ae must be >= 1");
    QrmParts parts = build_qrm(model, opts);
    QaeCircuit out;
    out.n_ae = n_ae;
    const int n = n_ae + parts.layout.n_qubits;
    if (n > kMaxSimQubits)
        throw BudgetError("QAE needs " + std::to_string(n) + " qubits (max " + std::to_string(kMaxSimQubits) + ")");
    for (int j = 0; j < n_ae; ++j) out.ae_reg.push_back(j);
    // shift model registers past the output register
    out.layout = parts.layout;
    auto shift = [n_ae](int& q) { if (q >= 0) q += n_ae; };
    for (int& q : out.layout.mod_reg) shift(q);
    for (int& q : out.layout.item_qubits) shift(q);
    for (auto& [id, q] : out.layout.item_qubit) shift(q);
    for (int& q : out.layout.ancilla) shift(q);
    for (int& q : out.layout.cost_reg) shift(q);
    shift(out.layout.indicator);
    shift(out.layout.phase);
    out.layout.n_qubits = n;

    Circuit& c = out.circuit;
    c.n_qubits = n;
    c.registers.emplace_back("ae", out.ae_reg);
    const Circuit rm = parts.rm.shifted(n_ae, n);
    const Circuit qrm = parts.qrm.shifted(n_ae, n);
    for (const auto& [name, reg] : rm.registers) c.registers.emplace_back(name, reg);
    for (int j = 0; j < n_ae; ++j) c.add(h(j));
    c.gates.insert(c.gates.end(), rm.gates.begin(), rm.gates.end());
    for (int j = 0; j < n_ae; ++j)
        for (std::uint64_t rep = 0; rep < (1ULL << j); ++rep)
            for (const Gate& g : qrm.gates) c.add(with_control(g, {j, true}));
    const Circuit iqft = inverse_qft(n_ae).shifted(0, n);
    c.gates.insert(c.gates.end(), iqft.gates.begin(), iqft.gates.end());
    return out;
}

QaeCircuit build_qae(const RiskModel& model, int n_ae, int mod_index, CompileOptions opts) {
    QaeCircuit body = build_qae_body(model, n_ae, opts);
    Circuit prep;
    prep.n_qubits = body.circuit.n_qubits;
    prep.add(x(body.layout.phase));
    for (std::size_t b = 0; b < body.layout.mod_reg.size(); ++b)
        if ((mod_index >> b) & 1) prep.add(x(body.layout.mod_reg[b]));
    prep.gates.insert(prep.gates.end(), body.circuit.gates.begin(), body.circuit.gates.end());
    prep.registers = body.circuit.registers;
    body.circuit = std::move(prep);
    return body;
}

double decode(std::uint64_t a, int n_ae) {
    const double s = std::sin(M_PI * static_cast<double>(a) / std::pow(2.0, n_ae));
    return s * s;
}

QaeResult run_qae(const RiskModel& model, int n_ae, int mod_index, std::uint64_t shots,
                  std::uint64_t seed, CompileOptions opts) {
    const QaeCircuit qc = build_qae(model, n_ae, mod_index, opts);
    StateVector st(qc.circuit.n_qubits);
    apply(st, qc.circuit);
    QaeResult res;
    res.histogram = sample(st, qc.ae_reg, shots, seed, "qae");
    for (std::uint64_t a = 0; a < res.histogram.probs.size(); ++a) res.decoded[a] = decode(a, n_ae);
    res.mode = res.histogram.mode();
    // mass of the two grid cells bracketing the amplitude, plus their mirror
    // images; this is the quantity bounded below by 8/pi^2
    const std::uint64_t grid = res.histogram.probs.size();
    const std::uint64_t up = (res.mode + 1) % grid;
    const std::uint64_t down = (res.mode + grid - 1) % grid;
    const std::uint64_t next = res.histogram.probs[up] >= res.histogram.probs[down] ? up : down;
    std::vector<std::uint64_t> cells = {res.mode, next, (grid - res.mode) % grid, (grid - next) % grid};
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    res.modal_mass = 0.0;
    for (std::uint64_t cell : cells) res.modal_mass += res.histogram.probs[cell];
    return res;
}

} // namespace qrisk

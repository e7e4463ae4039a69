#include "qrisk/circuit.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace qrisk {

Gate Gate::inverse() const {
    Gate g = *this;
    switch (kind) {
    case GateKind::U3:
        g.theta = -theta;
        g.phi = -lambda;
        g.lambda = -phi;
        break;
    case GateKind::Phase:
        g.theta = -theta;
        break;
    case GateKind::Increment:
        g.amount = -amount;
        break;
    case GateKind::X:
    case GateKind::Z:
    case GateKind::H:
        break;
    }
    return g;
}

Gate u3(double theta, int target, std::vector<Control> controls) {
    Gate g;
    g.kind = GateKind::U3;
    g.theta = theta;
    g.targets = {target};
    g.controls = std::move(controls);
    return g;
}

Gate x(int target, std::vector<Control> controls) {
    Gate g;
    g.kind = GateKind::X;
    g.targets = {target};
    g.controls = std::move(controls);
    return g;
}

Gate z(int target, std::vector<Control> controls) {
    Gate g;
    g.kind = GateKind::Z;
    g.targets = {target};
    g.controls = std::move(controls);
    return g;
}

Gate h(int target) {
    Gate g;
    g.kind = GateKind::H;
    g.targets = {target};
    return g;
}

Gate phase(double angle, int target, std::vector<Control> controls) {
    Gate g;
    g.kind = GateKind::Phase;
    g.theta = angle;
    g.targets = {target};
    g.controls = std::move(controls);
    return g;
}

Gate increment(long long amount, std::vector<int> reg, std::vector<Control> controls) {
    Gate g;
    g.kind = GateKind::Increment;
    g.amount = amount;
    g.targets = std::move(reg);
    g.controls = std::move(controls);
    return g;
}

Gate with_control(Gate g, Control c) {
    g.controls.push_back(c);
    return g;
}

void Circuit::add(Gate g) { gates.push_back(std::move(g)); }

Circuit Circuit::inverse() const {
    Circuit inv;
    inv.n_qubits = n_qubits;
    inv.registers = registers;
    inv.gates.reserve(gates.size());
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) inv.gates.push_back(it->inverse());
    return inv;
}

Circuit Circuit::shifted(int offset, int new_n_qubits) const {
    Circuit out;
    out.n_qubits = new_n_qubits;
    for (const auto& [name, reg] : registers) {
        std::vector<int> shifted_reg;
        for (int q : reg) shifted_reg.push_back(q + offset);
        out.registers.emplace_back(name, std::move(shifted_reg));
    }
    out.gates.reserve(gates.size());
    for (Gate g : gates) {
        for (int& t : g.targets) t += offset;
        for (Control& c : g.controls) c.qubit += offset;
        out.gates.push_back(std::move(g));
    }
    return out;
}

Circuit Circuit::lowered() const {
    Circuit out;
    out.n_qubits = n_qubits;
    out.registers = registers;
    for (const Gate& g : gates) {
        if (g.kind != GateKind::Increment) {
            out.gates.push_back(g);
            continue;
        }
        const int w = static_cast<int>(g.targets.size());
        long long amount = ((g.amount % (1LL << w)) + (1LL << w)) % (1LL << w);
        // Add one set bit at a time; each power-of-two increment is a ripple
        // of multi-controlled NOTs from the top bit down to the bit added.
        for (int k = w - 1; k >= 0; --k) {
            if (!((amount >> k) & 1)) continue;
            for (int j = w - 1; j >= k; --j) {
                std::vector<Control> ctl = g.controls;
                for (int b = k; b < j; ++b) ctl.push_back({g.targets[b], true});
                out.gates.push_back(x(g.targets[j], std::move(ctl)));
            }
        }
    }
    return out;
}

int Circuit::max_arity() const {
    int m = 0;
    for (const Gate& g : gates)
        m = std::max(m, static_cast<int>(g.targets.size() + g.controls.size()));
    return m;
}

void Circuit::validate() const {
    for (const Gate& g : gates) {
        std::vector<int> seen;
        for (int t : g.targets) {
            if (t < 0 || t >= n_qubits) throw std::out_of_range("gate target out of range");
            seen.push_back(t);
        }
        for (const Control& c : g.controls) {
            if (c.qubit < 0 || c.qubit >= n_qubits)
                throw std::out_of_range("gate control out of range");
            seen.push_back(c.qubit);
        }
        std::sort(seen.begin(), seen.end());
        if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
            throw std::invalid_argument("gate targets and controls must be disjoint");
    }
}

namespace {

const char* kind_name(GateKind k) {
    switch (k) {
    case GateKind::U3: return "U3";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::Phase: return "P";
    case GateKind::Increment: return "INC";
    }
    return "?";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

std::string Circuit::to_text() const {
    std::string out;
    for (const Gate& g : gates) {
        out += "GATE ";
        out += kind_name(g.kind);
        if (g.kind == GateKind::U3)
            out += "(" + fmt(g.theta) + "," + fmt(g.phi) + "," + fmt(g.lambda) + ")";
        else if (g.kind == GateKind::Phase)
            out += "(" + fmt(g.theta) + ")";
        else if (g.kind == GateKind::Increment)
            out += "(" + std::to_string(g.amount) + ")";
        for (int t : g.targets) out += " " + std::to_string(t);
        if (!g.controls.empty()) {
            out += " [";
            for (std::size_t i = 0; i < g.controls.size(); ++i) {
                if (i) out += " ";
                out += (g.controls[i].positive ? "+" : "-") + std::to_string(g.controls[i].qubit);
            }
            out += "]";
        }
        out += "\n";
    }
    return out;
}

} // namespace qrisk

#include "qrisk/compiler.hpp"

#include <cmath>
#include <stdexcept>

namespace qrisk {

double angle_for_probability(double p) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw std::out_of_range("probability out of [0,1]");
    p = std::min(1.0, std::max(0.0, p));
    return 2.0 * std::asin(std::sqrt(p));
}

std::vector<int> RegisterLayout::rm_targets() const {
    std::vector<int> t = item_qubits;
    t.insert(t.end(), ancilla.begin(), ancilla.end());
    t.insert(t.end(), cost_reg.begin(), cost_reg.end());
    if (indicator >= 0) t.push_back(indicator);
    return t;
}

bool masked_indicator_valid(long long threshold, long long max_loss) {
    for (long long v = 0; v <= max_loss; ++v)
        if ((v >= threshold) != ((v & threshold) == threshold)) return false;
    return true;
}

std::vector<Gate> compile_xor_chain(const std::vector<double>& probs, const std::vector<int>& qubits,
                                    std::vector<Control> source) {
    if (probs.size() != qubits.size() || probs.size() < 2)
        throw std::invalid_argument("xor chain needs >= 2 members");
    std::vector<Gate> out;
    out.push_back(u3(angle_for_probability(probs[0]), qubits[0], source));
    if (probs.size() == 2) {
        std::vector<Control> ctl = source;
        ctl.push_back({qubits[0], false});
        out.push_back(x(qubits[1], std::move(ctl)));
        return out;
    }
    double remaining = 1.0 - probs[0];
    for (std::size_t j = 1; j < probs.size(); ++j) {
        const double cond = remaining > 1e-12 ? std::min(1.0, probs[j] / remaining) : 0.0;
        std::vector<Control> ctl = source;
        for (std::size_t e = 0; e < j; ++e) ctl.push_back({qubits[e], false});
        out.push_back(u3(angle_for_probability(cond), qubits[j], std::move(ctl)));
        remaining -= probs[j];
    }
    return out;
}

std::pair<int, double> compile_transition_tree(std::vector<std::pair<int, double>> nodes,
                                               std::vector<int>& free_ancillas, std::vector<Gate>& out) {
    while (nodes.size() > 1) {
        std::vector<std::pair<int, double>> next;
        for (std::size_t i = 0; i + 1 < nodes.size(); i += 2) {
            const auto [qa, ta] = nodes[i];
            const auto [qb, tb] = nodes[i + 1];
            if (free_ancillas.empty()) throw std::logic_error("transition tree ancilla underflow");
            const int q = free_ancillas.back();
            free_ancillas.pop_back();
            out.push_back(u3(angle_for_probability(0.0), q, {{qa, false}, {qb, false}}));
            out.push_back(u3(angle_for_probability(ta), q, {{qa, true}, {qb, false}}));
            out.push_back(u3(angle_for_probability(tb), q, {{qa, false}, {qb, true}}));
            out.push_back(u3(angle_for_probability(ta + tb - ta * tb), q, {{qa, true}, {qb, true}}));
            next.emplace_back(q, 1.0);
        }
        if (nodes.size() % 2) next.push_back(nodes.back());
        nodes = std::move(next);
    }
    return nodes[0];
}

namespace {

int bit_width(long long v) {
    int w = 0;
    while (v > 0) {
        ++w;
        v >>= 1;
    }
    return w;
}

IndicatorStyle resolve_style(const RiskModel& model, const CompileOptions& opts) {
    if (!opts.with_cost) return IndicatorStyle::None;
    if (opts.indicator == IndicatorStyle::Auto)
        return masked_indicator_valid(model.threshold, model.total_cost()) ? IndicatorStyle::Masked
                                                                           : IndicatorStyle::General;
    if (opts.indicator == IndicatorStyle::Conjunction) {
        for (const auto& it : model.items)
            if (it.cost != 1) throw ModelError("indicator-style", "conjunction indicator needs unit costs");
        if (model.threshold != static_cast<long long>(model.items.size()))
            throw ModelError("indicator-style", "conjunction indicator needs threshold == item count");
    }
    return opts.indicator;
}

RegisterLayout build_layout(const RiskModel& model, const CompileOptions& opts, IndicatorStyle style) {
    RegisterLayout lay;
    int q = 0;
    if (opts.with_modifications && model.max_modification_index() >= 1) {
        const int n_s = std::max(1, bit_width(model.max_modification_index()));
        for (int i = 0; i < n_s; ++i) lay.mod_reg.push_back(q++);
    }
    for (const auto& it : model.items) {
        lay.item_qubits.push_back(q);
        lay.item_qubit[it.id] = q++;
    }
    for (const auto& it : model.items) {
        const int m = static_cast<int>(model.incoming(it.id).size());
        for (int i = 0; i < std::max(0, m - 1); ++i) lay.ancilla.push_back(q++);
    }
    if (style == IndicatorStyle::Masked || style == IndicatorStyle::General) {
        int n_c = std::max(1, bit_width(model.total_cost()));
        if (style == IndicatorStyle::General) ++n_c; // sign bit
        for (int i = 0; i < n_c; ++i) lay.cost_reg.push_back(q++);
    }
    if (style != IndicatorStyle::None) lay.indicator = q++;
    if (opts.with_phase) lay.phase = q++;
    lay.n_qubits = q;
    return lay;
}

// Scenario-preparation gates over the item/ancilla qubits. The gate sequence
// is a pure function of the model's probabilities with fixed structure, so
// modified variants line up gate-for-gate with the base sequence.
std::vector<Gate> emit_prep(const RiskModel& model, const RegisterLayout& layout) {
    std::vector<Gate> out;
    std::vector<int> free_anc(layout.ancilla.rbegin(), layout.ancilla.rend());
    std::vector<bool> group_done(model.xor_groups.size(), false);
    for (int id : model.topological_order()) {
        const int g = model.xor_group_of(id);
        if (g >= 0) {
            if (group_done[g]) continue;
            group_done[g] = true;
            std::vector<double> probs;
            std::vector<int> qubits;
            for (int mem : model.xor_groups[g].members) {
                if (!model.incoming(mem).empty())
                    throw ModelError("unsupported", "transitions into XOR members are not compilable");
                probs.push_back(model.find_item(mem)->intrinsic_p);
                qubits.push_back(layout.item_qubit.at(mem));
            }
            for (Gate& gg : compile_xor_chain(probs, qubits)) out.push_back(std::move(gg));
            continue;
        }
        const int q = layout.item_qubit.at(id);
        const double p_int = model.find_item(id)->intrinsic_p;
        const auto in = model.incoming(id);
        if (in.empty()) {
            out.push_back(u3(angle_for_probability(p_int), q));
            continue;
        }
        int src;
        double t;
        if (in.size() == 1) {
            src = layout.item_qubit.at(in[0].from);
            t = in[0].p;
        } else {
            std::vector<std::pair<int, double>> nodes;
            for (const auto& tr : in) nodes.emplace_back(layout.item_qubit.at(tr.from), tr.p);
            std::tie(src, t) = compile_transition_tree(std::move(nodes), free_anc, out);
        }
        out.push_back(u3(angle_for_probability(p_int), q, {{src, false}}));
        out.push_back(u3(angle_for_probability(t + (1.0 - t) * p_int), q, {{src, true}}));
    }
    return out;
}

std::vector<Control> mod_pattern(const RegisterLayout& layout, int index) {
    std::vector<Control> ctl;
    for (std::size_t b = 0; b < layout.mod_reg.size(); ++b)
        ctl.push_back({layout.mod_reg[b], ((index >> b) & 1) != 0});
    return ctl;
}

} // namespace

void append_cost_accumulator(Circuit& circuit, const RiskModel& model, const RegisterLayout& layout) {
    if (layout.cost_reg.empty()) return;
    if ((1LL << layout.cost_reg.size()) <= model.total_cost())
        throw ModelError("register-too-narrow", "cost register overflow");
    for (int id : model.topological_order()) {
        const long long c = model.find_item(id)->cost;
        for (int b = 0; b < 63; ++b)
            if ((c >> b) & 1)
                circuit.add(increment(1LL << b, layout.cost_reg, {{layout.item_qubit.at(id), true}}));
    }
}

void append_threshold_indicator(Circuit& circuit, const RiskModel& model, const RegisterLayout& layout,
                                IndicatorStyle style) {
    if (style == IndicatorStyle::None) return;
    const long long A = model.threshold;
    if (A == 0) {
        circuit.add(x(layout.indicator));
        return;
    }
    if (A > model.total_cost()) return; // can never fire
    switch (style) {
    case IndicatorStyle::Masked: {
        if (!masked_indicator_valid(A, model.total_cost()))
            throw ModelError("indicator-style", "masked indicator is not exact for this threshold");
        std::vector<Control> ctl;
        for (std::size_t b = 0; b < layout.cost_reg.size(); ++b)
            if ((A >> b) & 1) ctl.push_back({layout.cost_reg[b], true});
        circuit.add(x(layout.indicator, std::move(ctl)));
        break;
    }
    case IndicatorStyle::General: {
        // cost - A is non-negative exactly when the sign bit stays clear.
        circuit.add(increment(-A, layout.cost_reg));
        circuit.add(x(layout.indicator, {{layout.cost_reg.back(), false}}));
        circuit.add(increment(A, layout.cost_reg));
        break;
    }
    case IndicatorStyle::Conjunction: {
        std::vector<Control> ctl;
        for (int q : layout.item_qubits) ctl.push_back({q, true});
        circuit.add(x(layout.indicator, std::move(ctl)));
        break;
    }
    default:
        break;
    }
}

Compiled compile_model(const RiskModel& model, const CompileOptions& opts) {
    validate(model);
    const IndicatorStyle style = resolve_style(model, opts);
    Compiled c;
    c.layout = build_layout(model, opts, style);
    c.circuit.n_qubits = c.layout.n_qubits;
    if (!c.layout.mod_reg.empty()) c.circuit.registers.emplace_back("mod", c.layout.mod_reg);
    c.circuit.registers.emplace_back("items", c.layout.item_qubits);
    if (!c.layout.ancilla.empty()) c.circuit.registers.emplace_back("ancilla", c.layout.ancilla);
    if (!c.layout.cost_reg.empty()) c.circuit.registers.emplace_back("cost", c.layout.cost_reg);
    if (c.layout.indicator >= 0) c.circuit.registers.emplace_back("indicator", std::vector<int>{c.layout.indicator});
    if (c.layout.phase >= 0) c.circuit.registers.emplace_back("phase", std::vector<int>{c.layout.phase});

    const std::vector<Gate> base = emit_prep(model, c.layout);
    std::vector<std::pair<int, std::vector<Gate>>> variants;
    if (!c.layout.mod_reg.empty()) {
        for (int k = 1; k <= model.max_modification_index(); ++k) {
            std::vector<Gate> v = emit_prep(apply_modification(model, k), c.layout);
            if (v.size() != base.size()) throw std::logic_error("modification changed circuit structure");
            variants.emplace_back(k, std::move(v));
        }
    }
    for (std::size_t i = 0; i < base.size(); ++i) {
        c.circuit.add(base[i]);
        for (const auto& [k, v] : variants) {
            if (v[i].kind != GateKind::U3 || std::abs(v[i].theta - base[i].theta) < 1e-14) continue;
            Gate delta = u3(v[i].theta - base[i].theta, v[i].targets[0], v[i].controls);
            for (const Control& mc : mod_pattern(c.layout, k)) delta.controls.push_back(mc);
            c.circuit.add(std::move(delta));
        }
    }
    if (style == IndicatorStyle::Masked || style == IndicatorStyle::General)
        append_cost_accumulator(c.circuit, model, c.layout);
    append_threshold_indicator(c.circuit, model, c.layout, style);
    c.circuit.validate();
    return c;
}

} // namespace qrisk

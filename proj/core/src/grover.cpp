#include "qrisk/grover.hpp"
#include "qrisk/rng.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qrisk {

SearchTarget target_from_probability(double p, int n_ae, int widen) {
    const std::uint64_t grid = 1ULL << n_ae;
    const double a_star = std::asin(std::sqrt(p)) / M_PI * static_cast<double>(grid);
    const long long cell = std::llround(a_star);
    SearchTarget t;
    for (long long c = cell - widen; c <= cell + widen; ++c) {
        if (c < 0 || c > static_cast<long long>(grid) / 2) continue;
        t.outcomes.push_back(static_cast<std::uint64_t>(c));
        const std::uint64_t mirror = (grid - static_cast<std::uint64_t>(c)) % grid;
        if (mirror != static_cast<std::uint64_t>(c)) t.outcomes.push_back(mirror);
    }
    if (t.outcomes.empty()) throw std::invalid_argument("empty search target");
    return t;
}

double optimal_steps_raw(double n_states, double m_solutions, double effective_factor) {
    const double m_hat = m_solutions * effective_factor;
    if (m_hat <= 0.0 || n_states < m_hat) throw std::invalid_argument("need N >= M_hat >= 1");
    return M_PI / 4.0 * std::sqrt(n_states / m_hat);
}

int optimal_steps(double n_states, double m_solutions, double effective_factor) {
    return std::max(1, static_cast<int>(std::floor(optimal_steps_raw(n_states, m_solutions, effective_factor))));
}

Circuit build_oracle(const QaeCircuit& body, const SearchTarget& target, int grover_phase) {
    Circuit c;
    c.n_qubits = grover_phase + 1;
    const Circuit fwd = body.circuit.shifted(0, c.n_qubits);
    const Circuit bwd = fwd.inverse();
    c.gates.insert(c.gates.end(), fwd.gates.begin(), fwd.gates.end());
    for (std::uint64_t outcome : target.outcomes) {
        std::vector<Control> ctl;
        for (int b = 0; b < body.n_ae; ++b) ctl.push_back({body.ae_reg[b], ((outcome >> b) & 1) != 0});
        c.add(z(grover_phase, std::move(ctl)));
    }
    c.gates.insert(c.gates.end(), bwd.gates.begin(), bwd.gates.end());
    return c;
}

Circuit diffusion(const std::vector<int>& reg, int n_qubits) {
    Circuit c;
    c.n_qubits = n_qubits;
    for (int q : reg) c.add(h(q));
    for (int q : reg) c.add(x(q));
    std::vector<Control> ctl;
    for (std::size_t i = 0; i + 1 < reg.size(); ++i) ctl.push_back({reg[i], true});
    c.add(z(reg.back(), std::move(ctl)));
    for (int q : reg) c.add(x(q));
    for (int q : reg) c.add(h(q));
    return c;
}

std::uint64_t search_model_calls(int steps, int n_ae) {
    // One QAE applies RM once plus 2^n_ae - 1 QRMs of two RM applications
    // each; the oracle runs the QAE forwards and backwards.
    const std::uint64_t per_qae = (1ULL << (n_ae + 1)) - 1;
    return 2ULL * static_cast<std::uint64_t>(steps) * per_qae;
}

SearchResult run_search(const RiskModel& model, const SearchTarget& target, const SearchConfig& config,
                        int n_ae, CompileOptions opts) {
    if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
    opts.with_modifications = true;
    const QaeCircuit body = build_qae_body(model, n_ae, opts);
    if (body.layout.mod_reg.empty()) throw ModelError("no-modifications", "search needs a modification register");
    const int grover_phase = body.circuit.n_qubits;
    const int n = grover_phase + 1;
    if (n > kMaxSimQubits)
        throw BudgetError("search needs " + std::to_string(n) + " qubits (max " + std::to_string(kMaxSimQubits) + ")");

    Circuit c;
    c.n_qubits = n;
    for (int q : body.layout.mod_reg) c.add(h(q));
    c.add(x(body.layout.phase));
    c.add(x(grover_phase));
    const Circuit oracle = build_oracle(body, target, grover_phase);
    const Circuit diff = diffusion(body.layout.mod_reg, n);
    for (int s = 0; s < config.steps; ++s) {
        c.gates.insert(c.gates.end(), oracle.gates.begin(), oracle.gates.end());
        c.gates.insert(c.gates.end(), diff.gates.begin(), diff.gates.end());
    }

    StateVector st(n);
    apply(st, c);
    SearchResult res;
    res.steps = config.steps;
    res.model_calls = search_model_calls(config.steps, n_ae);
    res.histogram = sample(st, body.layout.mod_reg, config.shots, config.seed, "modification");
    res.marginal = res.histogram.probs;
    res.top_index = static_cast<int>(res.histogram.mode());
    res.top_probability = res.marginal[res.top_index];
    return res;
}

std::vector<ScalingRow> scaling_experiment(int min_items, int max_items, double confidence,
                                           std::uint64_t seed, int n_ae) {
    std::vector<ScalingRow> rows;
    for (int n = min_items; n <= max_items; ++n) {
        const int cell = default_planted_cell(n);
        const RiskModel model = make_chain_model(n, n_ae, cell);
        const double target_p = decode(cell, n_ae);

        ScalingRow row;
        row.n_items = n;
        row.n_params = static_cast<int>(model.modifications.size());
        const SensitivityResult cls =
            classical_sensitivity(model, target_p, 1e-9, confidence, derive_seed(seed, n));
        row.classical_evals = cls.model_evaluations;
        row.classical_shots = cls.shots_per_modification;

        const int n_s = static_cast<int>(compile_model(model, {true, false, false, IndicatorStyle::None})
                                             .layout.mod_reg.size());
        row.grover_steps = optimal_steps(std::pow(2.0, n_s), 1.0, 1.8);
        CompileOptions opts;
        opts.indicator = IndicatorStyle::Conjunction;
        SearchConfig cfg;
        cfg.steps = row.grover_steps;
        cfg.seed = derive_seed(seed, 1000 + n);
        const SearchResult search = run_search(model, target_from_probability(target_p, n_ae), cfg, n_ae, opts);
        row.quantum_model_calls = search.model_calls;
        row.planted_probability = search.marginal[1]; // planted modification index
        rows.push_back(row);
    }
    return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
    std::string out = "n_items,n_params,classical_evals,quantum_model_calls\n";
    char buf[128];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%d,%llu,%llu\n", r.n_items, r.n_params,
                      static_cast<unsigned long long>(r.classical_evals),
                      static_cast<unsigned long long>(r.quantum_model_calls));
        out += buf;
    }
    return out;
}

} // namespace qrisk

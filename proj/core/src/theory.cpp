#include "qrisk/theory.hpp"

#include <cmath>
#include <stdexcept>

#include "qrisk/grover.hpp"
#include "qrisk/simulator.hpp"

namespace qrisk {

double effective_solutions(const std::vector<double>& alpha) {
    double m = 1.0;
    for (double a : alpha) {
        const double f = std::cos(a) + std::sin(a);
        m *= f * f;
    }
    return m;
}

double predicted_steps(double n_states, double m_hat) {
    if (m_hat <= 0.0 || n_states < m_hat) throw std::invalid_argument("need N >= M_hat > 0");
    return M_PI / 4.0 * std::sqrt(n_states / m_hat);
}

double predicted_success(const std::vector<double>& alpha) {
    double p = 1.0;
    for (double a : alpha) p *= std::cos(a) * std::cos(a);
    return p;
}

namespace {

std::vector<Control> solution_controls(int n, std::uint64_t s) {
    std::vector<Control> ctl;
    for (int b = 0; b < n; ++b) ctl.push_back({b, ((s >> b) & 1) != 0});
    return ctl;
}

std::vector<int> search_reg(int n) {
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) r[i] = i;
    return r;
}

double solution_mass(const StateVector& st, int n, int m_solutions) {
    const std::vector<double> marg = marginal(st, search_reg(n));
    double p = 0.0;
    for (int s = 0; s < m_solutions; ++s) p += marg[marg.size() - 1 - s];
    return p;
}

} // namespace

double run_false_positive_grover(int n, const std::vector<double>& alpha, int steps) {
    if (static_cast<int>(alpha.size()) != n) throw std::invalid_argument("need one angle per qubit");
    const int mark = n;
    Circuit c;
    c.n_qubits = n + 1;
    for (int q = 0; q < n; ++q) c.add(h(q));
    c.add(x(mark));
    c.add(h(mark));
    Circuit oracle;
    oracle.n_qubits = c.n_qubits;
    for (int q = 0; q < n; ++q)
        if (alpha[q] != 0.0) oracle.add(u3(2.0 * alpha[q], q));
    oracle.add(x(mark, solution_controls(n, (1ULL << n) - 1)));
    for (int q = n - 1; q >= 0; --q)
        if (alpha[q] != 0.0) oracle.add(u3(-2.0 * alpha[q], q));
    const Circuit diff = diffusion(search_reg(n), c.n_qubits);
    for (int s = 0; s < steps; ++s) {
        c.gates.insert(c.gates.end(), oracle.gates.begin(), oracle.gates.end());
        c.gates.insert(c.gates.end(), diff.gates.begin(), diff.gates.end());
    }
    StateVector st(c.n_qubits);
    apply(st, c);
    return solution_mass(st, n, 1);
}

double standard_grover_success(int n, int m_solutions, int steps) {
    const int mark = n;
    Circuit c;
    c.n_qubits = n + 1;
    for (int q = 0; q < n; ++q) c.add(h(q));
    c.add(x(mark));
    c.add(h(mark));
    Circuit oracle;
    oracle.n_qubits = c.n_qubits;
    for (int s = 0; s < m_solutions; ++s)
        oracle.add(x(mark, solution_controls(n, (1ULL << n) - 1 - s)));
    const Circuit diff = diffusion(search_reg(n), c.n_qubits);
    for (int s = 0; s < steps; ++s) {
        c.gates.insert(c.gates.end(), oracle.gates.begin(), oracle.gates.end());
        c.gates.insert(c.gates.end(), diff.gates.begin(), diff.gates.end());
    }
    StateVector st(c.n_qubits);
    apply(st, c);
    return solution_mass(st, n, m_solutions);
}

std::vector<std::string> first_patterns(int k, int a) {
    if (a < 0 || a > (1 << k)) throw std::invalid_argument("need 0 <= a <= 2^k");
    std::vector<std::string> out;
    for (int v = 0; v < a; ++v) {
        std::string p(k, '+');
        for (int j = 0; j < k; ++j)
            if ((v >> j) & 1) p[j] = '-';
        out.push_back(p);
    }
    return out;
}

Circuit build_root_oracle(int n, std::uint64_t solution, int k, const std::vector<std::string>& patterns,
                          double ancilla_alpha) {
    const int mark = n, indicator = n + 1, anc0 = n + 2;
    Circuit c;
    c.n_qubits = n + 2 + k;
    c.add(x(indicator));
    for (int j = 0; j < k; ++j)
        c.add(j == 0 && ancilla_alpha != 0.0 ? u3(2.0 * ancilla_alpha, anc0) : h(anc0 + j));
    for (const std::string& p : patterns) {
        if (static_cast<int>(p.size()) != k) throw std::invalid_argument("pattern width mismatch");
        std::vector<Control> ctl = solution_controls(n, solution);
        ctl.push_back({indicator, true});
        for (int j = 0; j < k; ++j) ctl.push_back({anc0 + j, p[j] == '-'});
        c.add(x(mark, std::move(ctl)));
    }
    for (int j = k - 1; j >= 0; --j)
        c.add(j == 0 && ancilla_alpha != 0.0 ? u3(-2.0 * ancilla_alpha, anc0) : h(anc0 + j));
    c.add(x(indicator));
    return c;
}

double root_grover_success(int n, int m_solutions, int k, int a, int steps, double ancilla_alpha) {
    const auto patterns = first_patterns(k, a);
    Circuit c;
    c.n_qubits = n + 2 + k;
    for (int q = 0; q < n; ++q) c.add(h(q));
    c.add(x(n));
    c.add(h(n));
    Circuit oracle;
    oracle.n_qubits = c.n_qubits;
    for (int s = 0; s < m_solutions; ++s) {
        const Circuit one = build_root_oracle(n, (1ULL << n) - 1 - s, k, patterns, ancilla_alpha);
        oracle.gates.insert(oracle.gates.end(), one.gates.begin(), one.gates.end());
    }
    const Circuit diff = diffusion(search_reg(n), c.n_qubits);
    for (int s = 0; s < steps; ++s) {
        c.gates.insert(c.gates.end(), oracle.gates.begin(), oracle.gates.end());
        c.gates.insert(c.gates.end(), diff.gates.begin(), diff.gates.end());
    }
    StateVector st(c.n_qubits);
    apply(st, c);
    return solution_mass(st, n, m_solutions);
}

RootDelta root_grover_delta(int n, int m_solutions, int k, int a, int steps) {
    RootDelta d;
    const double p_std_prev = steps > 1 ? standard_grover_success(n, m_solutions, steps - 1)
                                        : static_cast<double>(m_solutions) / std::pow(2.0, n);
    const double p_root_prev = steps > 1 ? root_grover_success(n, m_solutions, k, a, steps - 1)
                                         : static_cast<double>(m_solutions) / std::pow(2.0, n);
    d.delta_std = standard_grover_success(n, m_solutions, steps) - p_std_prev;
    d.delta_root = root_grover_success(n, m_solutions, k, a, steps) - p_root_prev;
    d.ratio = d.delta_root / d.delta_std;
    return d;
}

double unequal_activation_ratio(double alpha, int k, int n, int max_steps) {
    double min_ratio = 1e300;
    for (int s = 1; s <= max_steps; ++s) {
        const double p_std = standard_grover_success(n, 1, s);
        const double p_root = root_grover_success(n, 1, k, 1, s, alpha);
        min_ratio = std::min(min_ratio, p_root / p_std);
    }
    return min_ratio;
}

} // namespace qrisk

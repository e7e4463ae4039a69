#include "qrisk/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "qrisk/rng.hpp"

namespace qrisk {

namespace {

constexpr std::uint64_t kChunk = 1ULL << 14; // fixed reduction granularity

struct BitScatter {
    // Positions (ascending) at which zero bits get inserted into a packed
    // free-bit index; used to enumerate the subspace fixed by controls/targets.
    std::vector<int> positions;
    std::uint64_t expand(std::uint64_t packed) const {
        std::uint64_t idx = packed;
        for (int p : positions) {
            std::uint64_t low = idx & ((1ULL << p) - 1);
            idx = ((idx >> p) << (p + 1)) | low;
        }
        return idx;
    }
};

BitScatter make_scatter(const Gate& g) {
    BitScatter s;
    for (int t : g.targets) s.positions.push_back(t);
    for (const Control& c : g.controls) s.positions.push_back(c.qubit);
    std::sort(s.positions.begin(), s.positions.end());
    return s;
}

std::uint64_t control_mask(const Gate& g) {
    std::uint64_t m = 0;
    for (const Control& c : g.controls)
        if (c.positive) m |= 1ULL << c.qubit;
    return m;
}

void apply_2x2(StateVector& st, const Gate& g, std::complex<double> m00,
               std::complex<double> m01, std::complex<double> m10, std::complex<double> m11) {
    const int t = g.targets[0];
    const BitScatter sc = make_scatter(g);
    const std::uint64_t cmask = control_mask(g);
    const std::uint64_t tbit = 1ULL << t;
    const int free_bits = st.n_qubits - static_cast<int>(sc.positions.size());
    const std::int64_t n_free = 1LL << free_bits;
    const bool diagonal = (m01 == std::complex<double>(0.0) && m10 == std::complex<double>(0.0));
    auto* a = st.amps.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n_free; ++i) {
        const std::uint64_t base = sc.expand(static_cast<std::uint64_t>(i)) | cmask;
        const std::uint64_t i1 = base | tbit;
        if (diagonal) {
            a[base] *= m00;
            a[i1] *= m11;
        } else {
            const std::complex<double> a0 = a[base];
            const std::complex<double> a1 = a[i1];
            a[base] = m00 * a0 + m01 * a1;
            a[i1] = m10 * a0 + m11 * a1;
        }
    }
}

void apply_increment(StateVector& st, const Gate& g) {
    const int w = static_cast<int>(g.targets.size());
    const std::uint64_t span = 1ULL << w;
    const std::uint64_t amount =
        static_cast<std::uint64_t>(((g.amount % (1LL << w)) + (1LL << w)) % (1LL << w));
    if (amount == 0) return;
    std::vector<std::uint64_t> spread(span);
    for (std::uint64_t v = 0; v < span; ++v) {
        std::uint64_t s = 0;
        for (int j = 0; j < w; ++j)
            if ((v >> j) & 1) s |= 1ULL << g.targets[j];
        spread[v] = s;
    }
    const BitScatter sc = make_scatter(g);
    const std::uint64_t cmask = control_mask(g);
    const int free_bits = st.n_qubits - static_cast<int>(sc.positions.size());
    const std::int64_t n_free = 1LL << free_bits;
    auto* a = st.amps.data();
#pragma omp parallel
    {
        std::vector<std::complex<double>> tmp(span);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n_free; ++i) {
            const std::uint64_t base = sc.expand(static_cast<std::uint64_t>(i)) | cmask;
            for (std::uint64_t v = 0; v < span; ++v) tmp[(v + amount) & (span - 1)] = a[base | spread[v]];
            for (std::uint64_t v = 0; v < span; ++v) a[base | spread[v]] = tmp[v];
        }
    }
}

} // namespace

StateVector::StateVector(int n) : n_qubits(n) {
    if (n < 1 || n > kMaxSimQubits)
        throw BudgetError("statevector budget exceeded: " + std::to_string(n) + " qubits (max " +
                          std::to_string(kMaxSimQubits) + ")");
    amps.assign(1ULL << n, {0.0, 0.0});
    amps[0] = 1.0;
}

double StateVector::norm() const {
    const std::uint64_t n = amps.size();
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        double s = 0.0;
        const std::uint64_t hi = std::min<std::uint64_t>(n, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < hi; ++i) s += std::norm(amps[i]);
        partial[c] = s;
    }
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

void apply_gate(StateVector& st, const Gate& g) {
    const std::complex<double> I(0.0, 1.0);
    switch (g.kind) {
    case GateKind::U3: {
        const double c = std::cos(g.theta / 2), s = std::sin(g.theta / 2);
        apply_2x2(st, g, c, -std::exp(I * g.lambda) * s, std::exp(I * g.phi) * s,
                  std::exp(I * (g.phi + g.lambda)) * c);
        break;
    }
    case GateKind::X:
        apply_2x2(st, g, 0.0, 1.0, 1.0, 0.0);
        break;
    case GateKind::Z:
        apply_2x2(st, g, 1.0, 0.0, 0.0, -1.0);
        break;
    case GateKind::H: {
        const double r = 1.0 / std::sqrt(2.0);
        apply_2x2(st, g, r, r, r, -r);
        break;
    }
    case GateKind::Phase:
        apply_2x2(st, g, 1.0, 0.0, 0.0, std::exp(I * g.theta));
        break;
    case GateKind::Increment:
        apply_increment(st, g);
        break;
    }
}

void apply(StateVector& st, const Circuit& circuit) {
    if (circuit.n_qubits != st.n_qubits)
        throw std::invalid_argument("circuit/state qubit count mismatch");
    for (const Gate& g : circuit.gates) apply_gate(st, g);
    const double n = st.norm();
    if (std::abs(n - 1.0) > 1e-9)
        throw std::runtime_error("norm drift after circuit: " + std::to_string(n));
}

std::vector<double> marginal(const StateVector& st, const std::vector<int>& reg) {
    const int w = static_cast<int>(reg.size());
    const std::uint64_t outcomes = 1ULL << w;
    const std::uint64_t n = st.amps.size();
    const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::vector<double>> partial(chunks, std::vector<double>(outcomes, 0.0));
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        auto& tab = partial[c];
        const std::uint64_t hi = std::min<std::uint64_t>(n, (c + 1) * kChunk);
        for (std::uint64_t i = c * kChunk; i < hi; ++i) {
            std::uint64_t o = 0;
            for (int j = 0; j < w; ++j) o |= ((i >> reg[j]) & 1) << j;
            tab[o] += std::norm(st.amps[i]);
        }
    }
    std::vector<double> out(outcomes, 0.0);
    for (const auto& tab : partial)
        for (std::uint64_t o = 0; o < outcomes; ++o) out[o] += tab[o];
    return out;
}

std::string bits_lsb_first(std::uint64_t value, int width) {
    std::string s(width, '0');
    for (int i = 0; i < width; ++i)
        if ((value >> i) & 1) s[i] = '1';
    return s;
}

std::string Histogram::to_csv() const {
    std::string out = "outcome,count,probability\n";
    char buf[64];
    for (std::uint64_t o = 0; o < probs.size(); ++o) {
        std::snprintf(buf, sizeof(buf), ",%llu,%.12g\n",
                      static_cast<unsigned long long>(counts.empty() ? 0 : counts[o]), probs[o]);
        out += bits_lsb_first(o, width) + buf;
    }
    return out;
}

std::uint64_t Histogram::mode() const {
    std::uint64_t best = 0;
    for (std::uint64_t o = 1; o < probs.size(); ++o)
        if (probs[o] > probs[best]) best = o;
    return best;
}

Histogram sample(const StateVector& st, const std::vector<int>& reg, std::uint64_t shots,
                 std::uint64_t seed, const std::string& label) {
    Histogram h;
    h.width = static_cast<int>(reg.size());
    h.shots = shots;
    h.label = label;
    h.probs = marginal(st, reg);
    h.counts.assign(h.probs.size(), 0);
    std::vector<double> cdf(h.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < h.probs.size(); ++i) {
        acc += h.probs[i];
        cdf[i] = acc;
    }
    Rng rng(seed);
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        h.counts[std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1)]++;
    }
    return h;
}

} // namespace qrisk

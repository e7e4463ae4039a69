#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrisk/compiler.hpp"
#include "qrisk/rng.hpp"
#include "qrisk/simulator.hpp"

using namespace qrisk;

static RiskModel fig1() { return load_model(std::string(QRISK_MODEL_DIR) + "/fig1.json"); }

TEST_CASE("rotation angles reproduce the published values") {
    CHECK(angle_for_probability(0.80) == doctest::Approx(2.214).epsilon(1e-3));
    CHECK(angle_for_probability(0.10) == doctest::Approx(0.643).epsilon(2e-3));
    CHECK(angle_for_probability(0.55) == doctest::Approx(1.671).epsilon(1e-3));
    CHECK(angle_for_probability(0.05) == doctest::Approx(0.451).epsilon(2e-3));
    CHECK(angle_for_probability(0.43) == doctest::Approx(1.430).epsilon(1e-3));
    CHECK(angle_for_probability(0.0) == 0.0);
    CHECK(angle_for_probability(1.0) == doctest::Approx(M_PI));
    CHECK_THROWS_AS(angle_for_probability(1.2), std::out_of_range);
}

TEST_CASE("scenario preparation compiles to the published 4-qubit circuit") {
    RiskModel m = fig1();
    m.modifications.clear();
    CompileOptions opts;
    opts.with_cost = false;
    const Compiled c = compile_model(m, opts);
    CHECK(c.layout.n_qubits == 4);
    REQUIRE(c.circuit.gates.size() == 6);
    const auto& g = c.circuit.gates;
    CHECK(g[0].kind == GateKind::U3);
    CHECK(g[0].theta == doctest::Approx(2.214).epsilon(1e-3));
    CHECK(g[0].targets[0] == 0);
    CHECK(g[1].kind == GateKind::X); // XOR complement onto RI2
    CHECK(g[1].targets[0] == 1);
    CHECK(!g[1].controls[0].positive);
    CHECK(g[2].theta == doctest::Approx(0.643).epsilon(2e-3)); // RI3, source off
    CHECK(g[3].theta == doctest::Approx(1.671).epsilon(1e-3)); // RI3, source on
    CHECK(g[4].theta == doctest::Approx(0.451).epsilon(2e-3)); // RI4, source off
    CHECK(g[5].theta == doctest::Approx(1.430).epsilon(1e-3)); // RI4, source on

    const std::string text = c.circuit.to_text();
    CHECK(text.find("GATE U3(") == 0);
    CHECK(text.find("[-1]") != std::string::npos);
    CHECK(text.find("[+1]") != std::string::npos);
}

TEST_CASE("single p=0 item compiles to the identity") {
    RiskModel m;
    m.items.push_back({1, "a", 0.0, 1});
    m.threshold = 1;
    CompileOptions opts;
    opts.with_cost = false;
    const Compiled c = compile_model(m, opts);
    StateVector st(c.circuit.n_qubits);
    apply(st, c.circuit);
    CHECK(std::abs(st.amps[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
}

TEST_CASE("xor chains carry conditional probabilities") {
    SUBCASE("triple (0.5, 0.25, 0.25)") {
        const auto gates = compile_xor_chain({0.5, 0.25, 0.25}, {0, 1, 2});
        REQUIRE(gates.size() == 3);
        CHECK(gates[0].theta == doctest::Approx(angle_for_probability(0.5)));
        CHECK(gates[1].theta == doctest::Approx(angle_for_probability(0.5)));
        CHECK(gates[2].theta == doctest::Approx(angle_for_probability(1.0)));
        CHECK(gates[2].controls.size() == 2);
    }
    SUBCASE("degenerate (1, 0) never fires the second member") {
        const auto gates = compile_xor_chain({1.0, 0.0}, {0, 1});
        Circuit c;
        c.n_qubits = 2;
        for (const auto& g : gates) c.add(g);
        StateVector st(2);
        apply(st, c);
        CHECK(marginal(st, {0})[1] == doctest::Approx(1.0));
        CHECK(marginal(st, {1})[1] == doctest::Approx(0.0));
    }
    SUBCASE("exactly-one semantics, exhaustively") {
        const std::vector<double> probs{0.3, 0.45, 0.25};
        const auto gates = compile_xor_chain(probs, {0, 1, 2});
        Circuit c;
        c.n_qubits = 3;
        for (const auto& g : gates) c.add(g);
        StateVector st(3);
        apply(st, c);
        const auto marg = marginal(st, {0, 1, 2});
        CHECK(marg[0b001] == doctest::Approx(0.3));
        CHECK(marg[0b010] == doctest::Approx(0.45));
        CHECK(marg[0b100] == doctest::Approx(0.25));
        CHECK(marg[0] + marg[3] + marg[5] + marg[6] + marg[7] == doctest::Approx(0.0));
    }
}

TEST_CASE("multi-source transitions go through the OR tree") {
    RiskModel m;
    m.items.push_back({1, "a", 0.6, 0});
    m.items.push_back({2, "b", 0.3, 0});
    m.items.push_back({3, "c", 0.2, 1});
    m.transitions.push_back({1, 3, 0.5});
    m.transitions.push_back({2, 3, 0.25});
    m.threshold = 1;
    CompileOptions opts;
    opts.with_cost = false;
    const Compiled c = compile_model(m, opts);
    CHECK(c.layout.ancilla.size() == 1);
    StateVector st(c.circuit.n_qubits);
    apply(st, c.circuit);
    const double p3 = marginal(st, {c.layout.item_qubit.at(3)})[1];
    CHECK(p3 == doctest::Approx(exact_exceedance(m)).epsilon(1e-12));

    SUBCASE("four zero-probability transitions leave the intrinsic value") {
        RiskModel z;
        for (int i = 1; i <= 5; ++i) z.items.push_back({i, "x", i == 5 ? 0.35 : 0.5, i == 5 ? 1 : 0});
        for (int i = 1; i <= 4; ++i) z.transitions.push_back({i, 5, 0.0});
        z.threshold = 1;
        const Compiled cz = compile_model(z, opts);
        CHECK(cz.layout.ancilla.size() == 3);
        StateVector sz(cz.circuit.n_qubits);
        apply(sz, cz.circuit);
        CHECK(marginal(sz, {cz.layout.item_qubit.at(5)})[1] == doctest::Approx(0.35).epsilon(1e-12));
    }
}

TEST_CASE("cost accumulator counts losses") {
    SUBCASE("fig1 increments are 1, 4 and 8") {
        RiskModel m = fig1();
        m.modifications.clear();
        const Compiled c = compile_model(m); // masked indicator, 4 cost bits
        CHECK(c.layout.cost_reg.size() == 4);
        std::vector<long long> amounts;
        for (const auto& g : c.circuit.gates)
            if (g.kind == GateKind::Increment) amounts.push_back(g.amount);
        CHECK(amounts == std::vector<long long>{1, 4, 8});
    }
    SUBCASE("deterministic items sum their costs") {
        RiskModel m;
        m.items.push_back({1, "a", 1.0, 3});
        m.items.push_back({2, "b", 1.0, 5});
        m.threshold = 8;
        const Compiled c = compile_model(m);
        StateVector st(c.circuit.n_qubits);
        apply(st, c.circuit);
        const auto marg = marginal(st, c.layout.cost_reg);
        CHECK(marg[8] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(marginal(st, {c.layout.indicator})[1] == doctest::Approx(1.0));
    }
    SUBCASE("cost-0 items add no increments") {
        RiskModel m;
        m.items.push_back({1, "a", 0.5, 0});
        m.threshold = 0;
        const Compiled c = compile_model(m);
        int incs = 0;
        for (const auto& g : c.circuit.gates) incs += g.kind == GateKind::Increment;
        CHECK(incs == 0);
    }
}

TEST_CASE("threshold indicator marginal equals the classical exceedance") {
    SUBCASE("fig1 masked indicator fires on 12 and 13") {
        RiskModel m = fig1();
        m.modifications.clear();
        const Compiled c = compile_model(m);
        StateVector st(c.circuit.n_qubits);
        apply(st, c.circuit);
        CHECK(marginal(st, {c.layout.indicator})[1] == doctest::Approx(0.0513).epsilon(1e-10));
        CHECK(masked_indicator_valid(12, 13));
        CHECK(!masked_indicator_valid(5, 13));
    }
    SUBCASE("random models, general comparator, every threshold") {
        Rng rng(2024);
        for (int trial = 0; trial < 8; ++trial) {
            RiskModel m;
            const int n = 3 + trial % 3;
            for (int i = 1; i <= n; ++i)
                m.items.push_back({i, "x", 0.1 + 0.8 * rng.uniform(), 1 + static_cast<long long>(rng.uniform() * 4)});
            for (int i = 1; i < n; ++i)
                if (rng.uniform() < 0.6) m.transitions.push_back({i, i + 1, rng.uniform()});
            for (long long a = 0; a <= m.total_cost() + 1; ++a) {
                m.threshold = a;
                CompileOptions opts;
                opts.indicator = IndicatorStyle::General;
                const Compiled c = compile_model(m, opts);
                StateVector st(c.circuit.n_qubits);
                apply(st, c.circuit);
                CHECK(marginal(st, {c.layout.indicator})[1] ==
                      doctest::Approx(exact_exceedance(m)).epsilon(1e-12));
            }
        }
    }
    SUBCASE("threshold 0 always fires") {
        RiskModel m = fig1();
        m.modifications.clear();
        m.threshold = 0;
        const Compiled c = compile_model(m);
        StateVector st(c.circuit.n_qubits);
        apply(st, c.circuit);
        CHECK(marginal(st, {c.layout.indicator})[1] == doctest::Approx(1.0));
    }
}

TEST_CASE("modification blocks reproduce modified marginals") {
    const RiskModel m = fig1();
    CompileOptions opts;
    opts.with_modifications = true;
    const Compiled c = compile_model(m, opts);
    CHECK(c.layout.mod_reg.size() == 3);
    for (int k = 0; k <= 7; ++k) {
        Circuit prep;
        prep.n_qubits = c.circuit.n_qubits;
        for (std::size_t b = 0; b < c.layout.mod_reg.size(); ++b)
            if ((k >> b) & 1) prep.add(x(c.layout.mod_reg[b]));
        for (const auto& g : c.circuit.gates) prep.add(g);
        StateVector st(prep.n_qubits);
        apply(st, prep);
        CHECK(marginal(st, {c.layout.indicator})[1] ==
              doctest::Approx(exact_exceedance(m, k)).epsilon(1e-10));
    }
}

TEST_CASE("compiled circuits invert to the identity") {
    const RiskModel m = fig1();
    CompileOptions opts;
    opts.with_modifications = true;
    const Compiled c = compile_model(m, opts);
    Circuit round_trip = c.circuit;
    const Circuit inv = c.circuit.inverse();
    round_trip.gates.insert(round_trip.gates.end(), inv.gates.begin(), inv.gates.end());
    StateVector st(round_trip.n_qubits);
    apply(st, round_trip);
    CHECK(std::abs(st.amps[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
    for (std::size_t i = 1; i < st.amps.size(); ++i) CHECK(std::abs(st.amps[i]) < 1e-12);
}

TEST_CASE("lowered increments match the permutation form and the figure's ripple") {
    Circuit c;
    c.n_qubits = 5;
    c.add(h(4));
    c.add(increment(4, {0, 1, 2, 3}, {{4, true}}));
    c.add(increment(3, {0, 1, 2, 3}));
    const Circuit low = c.lowered();
    for (const auto& g : low.gates) CHECK(g.kind != GateKind::Increment);
    StateVector a(5), b(5);
    apply(a, c);
    apply(b, low);
    for (std::size_t i = 0; i < a.amps.size(); ++i) CHECK(std::abs(a.amps[i] - b.amps[i]) < 1e-12);

    // a power-of-two increment by 4 on 4 bits is a 2-gate ripple from the top
    Circuit one;
    one.n_qubits = 4;
    one.add(increment(4, {0, 1, 2, 3}));
    CHECK(one.lowered().gates.size() == 2);
    CHECK(one.lowered().gates[0].targets[0] == 3);
    CHECK(one.lowered().gates[0].controls.size() == 1);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrisk/simulator.hpp"
#include "qrisk/theory.hpp"

using namespace qrisk;

TEST_CASE("closed forms of the imperfect-oracle theory") {
    CHECK(effective_solutions({0.0, 0.0, 0.0}) == doctest::Approx(1.0));
    CHECK(effective_solutions({0.45}) == doctest::Approx(1.783).epsilon(5e-4));
    CHECK(effective_solutions({M_PI / 4, M_PI / 4}) == doctest::Approx(4.0));
    CHECK(predicted_steps(8, 1.8) == doctest::Approx(1.66).epsilon(1e-2));
    CHECK(predicted_steps(8, 8) == doctest::Approx(M_PI / 4));
    CHECK(predicted_steps(64, 1) == doctest::Approx(6.283).epsilon(1e-3));
    CHECK(predicted_success({}) == 1.0);
    CHECK(predicted_success({0.45}) == doctest::Approx(std::pow(std::cos(0.45), 2.0)).epsilon(1e-12));
    CHECK(predicted_success({0.45, 0.45}) == doctest::Approx(0.6568).epsilon(1e-3));
}

TEST_CASE("false-positive Grover behaves like the predictions") {
    SUBCASE("perfect oracle recovers standard Grover") {
        const int steps3 = 2; // N=8
        CHECK(run_false_positive_grover(3, {0, 0, 0}, steps3) == doctest::Approx(0.9453).epsilon(1e-3));
        const int steps6 = static_cast<int>(std::llround(M_PI / 4 * std::sqrt(64.0)));
        CHECK(run_false_positive_grover(6, {0, 0, 0, 0, 0, 0}, steps6) >= 0.99);
        for (int s = 1; s <= steps6; ++s)
            CHECK(run_false_positive_grover(6, std::vector<double>(6, 0.0), s) ==
                  doctest::Approx(standard_grover_success(6, 1, s)).epsilon(1e-10));
    }
    SUBCASE("single mixing angle 0.45 at N=64") {
        const double p_hat = predicted_success({0.45});
        const double s_hat = predicted_steps(64, effective_solutions({0.45}));
        std::vector<double> alpha(6, 0.0);
        alpha[0] = 0.45;
        const double p = run_false_positive_grover(6, alpha, static_cast<int>(std::llround(s_hat)));
        CHECK(p >= 0.9 * p_hat);
        CHECK(p <= p_hat + 1e-9);
        // peak over the step sweep stays within 2% of the prediction
        double peak = 0.0;
        for (int s = 1; s <= 10; ++s) peak = std::max(peak, run_false_positive_grover(6, alpha, s));
        CHECK(peak == doctest::Approx(p_hat).epsilon(0.02));
    }
}

TEST_CASE("root oracles") {
    SUBCASE("k=0 and the full pattern set act as the perfect oracle") {
        for (int s = 1; s <= 3; ++s) {
            CHECK(root_grover_success(4, 1, 0, 1, s) ==
                  doctest::Approx(standard_grover_success(4, 1, s)).epsilon(1e-12));
            CHECK(root_grover_success(4, 1, 1, 2, s) ==
                  doctest::Approx(standard_grover_success(4, 1, s)).epsilon(1e-12));
            CHECK(root_grover_success(4, 1, 2, 4, s) ==
                  doctest::Approx(standard_grover_success(4, 1, s)).epsilon(1e-12));
        }
    }
    SUBCASE("product over all patterns equals the perfect oracle") {
        const int n = 3, k = 2;
        Circuit prod;
        prod.n_qubits = n + 2 + k;
        for (int q = 0; q < n; ++q) prod.add(h(q));
        prod.add(x(n));
        prod.add(h(n));
        for (const auto& p : first_patterns(k, 1 << k)) {
            const Circuit o = build_root_oracle(n, (1ULL << n) - 1, k, {p});
            prod.gates.insert(prod.gates.end(), o.gates.begin(), o.gates.end());
        }
        Circuit perfect;
        perfect.n_qubits = prod.n_qubits;
        for (int q = 0; q < n; ++q) perfect.add(h(q));
        perfect.add(x(n));
        perfect.add(h(n));
        std::vector<Control> ctl;
        for (int q = 0; q < n; ++q) ctl.push_back({q, true});
        perfect.add(x(n, ctl));
        StateVector a(prod.n_qubits), b(prod.n_qubits);
        apply(a, prod);
        apply(b, perfect);
        for (std::size_t i = 0; i < a.amps.size(); ++i) CHECK(std::abs(a.amps[i] - b.amps[i]) < 1e-12);
    }
    SUBCASE("half-marking oracle, N=4") {
        const auto d = root_grover_delta(2, 1, 1, 1, 1);
        CHECK(d.delta_std == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(d.delta_root == doctest::Approx(0.375).epsilon(1e-9));
        CHECK(d.ratio == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("ratio law a/2^k at N=16, k=2") {
        for (int s = 1; s <= 3; ++s) {
            const auto d = root_grover_delta(4, 1, 2, 1, s);
            CHECK(d.ratio == doctest::Approx(0.25).epsilon(1e-9));
        }
    }
    SUBCASE("argmax step invariance") {
        for (int n : {3, 4, 5}) {
            const int optimum = static_cast<int>(std::llround(predicted_steps(std::pow(2.0, n), 1.0)));
            for (int k : {1, 2}) {
                for (int a = 1; a <= (1 << k); ++a) {
                    int best_std = 1, best_root = 1;
                    for (int s = 1; s <= optimum + 2; ++s) {
                        if (standard_grover_success(n, 1, s) > standard_grover_success(n, 1, best_std))
                            best_std = s;
                        if (root_grover_success(n, 1, k, a, s) > root_grover_success(n, 1, k, a, best_root))
                            best_root = s;
                    }
                    CHECK(best_std == best_root);
                }
            }
        }
    }
}

TEST_CASE("unequal activation bound") {
    SUBCASE("alpha 0 reduces to the plain root oracle") {
        for (int s = 1; s <= 3; ++s)
            CHECK(root_grover_success(4, 1, 1, 1, s, 0.0) ==
                  doctest::Approx(root_grover_success(4, 1, 1, 1, s)).epsilon(1e-12));
    }
    SUBCASE("alpha pi/2 never marks") {
        for (int s = 1; s <= 3; ++s)
            CHECK(root_grover_success(4, 1, 1, 1, s, M_PI / 2) - 1.0 / 16.0 <= 1e-9);
    }
    SUBCASE("alpha 0.45, k=1, N=16") {
        const double bound = std::pow(std::cos(0.45), 2.0) / 2.0;
        CHECK(unequal_activation_ratio(0.45, 1, 4, 3) >= bound - 1e-9);
        CHECK(unequal_activation_ratio(0.0, 1, 4, 3) >= 0.5 - 1e-9);
    }
}

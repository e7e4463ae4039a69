#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrisk/model.hpp"
#include "qrisk/rng.hpp"

using namespace qrisk;

static RiskModel fig1() { return load_model(std::string(QRISK_MODEL_DIR) + "/fig1.json"); }

TEST_CASE("fig1 parses with the documented probabilities") {
    const RiskModel m = fig1();
    CHECK(m.items.size() == 4);
    CHECK(m.find_item(2)->intrinsic_p == doctest::Approx(0.2));
    CHECK(m.find_item(2)->cost == 1);
    CHECK(m.transitions.size() == 2);
    CHECK(m.transitions[0].p == doctest::Approx(0.5));
    CHECK(m.transitions[1].p == doctest::Approx(0.4));
    CHECK(m.threshold == 12);
    CHECK(m.xor_groups.size() == 1);
    CHECK(m.max_modification_index() == 5);
}

TEST_CASE("validation rejects bad models") {
    CHECK_THROWS_WITH_AS(parse_model(R"({"items":[{"id":1,"name":"a","p":0.5,"cost":1},
        {"id":2,"name":"b","p":0.5,"cost":1}],
        "transitions":[{"from":1,"to":2,"p":0.5},{"from":2,"to":1,"p":0.5}],"threshold":1})"),
                         doctest::Contains("cycle"), ModelError);
    CHECK_THROWS_WITH_AS(parse_model(R"({"items":[{"id":1,"p":0.5,"cost":1},{"id":2,"p":0.4,"cost":1}],
        "xor_groups":[[1,2]],"threshold":1})"),
                         doctest::Contains("xor-sum"), ModelError);
    CHECK_THROWS_AS(parse_model("{not json"), ModelError);
    CHECK_THROWS_WITH_AS(parse_model(R"({"items":[{"id":1,"p":1.5,"cost":1}],"threshold":1})"),
                         doctest::Contains("prob-range"), ModelError);
    CHECK_THROWS_WITH_AS(parse_model(R"({"items":[{"id":1,"p":0.5,"cost":1}],
        "transitions":[{"from":1,"to":9,"p":0.5}],"threshold":1})"),
                         doctest::Contains("dangling-id"), ModelError);
}

TEST_CASE("propagate reproduces the worked scenario") {
    const RiskModel m = fig1();
    ScenarioDraw d;
    d.xor_selection[0] = 2; // RI2 fired via the XOR draw
    d.intrinsic_fired[3] = false;
    d.intrinsic_fired[4] = false;
    d.transition_fired[{2, 3}] = false;
    d.transition_fired[{2, 4}] = true;
    const auto r = propagate(m, d);
    CHECK(r.triggered == std::vector<int>{2, 4});
    CHECK(r.loss == 9);

    SUBCASE("all draws fired gives the total cost") {
        d.transition_fired[{2, 3}] = true;
        d.intrinsic_fired[3] = true;
        d.intrinsic_fired[4] = true;
        CHECK(propagate(m, d).loss == 13);
    }
    SUBCASE("nothing fired beyond the forced XOR member") {
        d.xor_selection[0] = 1;
        d.transition_fired[{2, 4}] = false;
        CHECK(propagate(m, d).loss == 0);
    }
}

TEST_CASE("exact exceedance matches the closed form") {
    const RiskModel m = fig1();
    const double expect = 0.2 * 0.55 * 0.43 + 0.8 * 0.1 * 0.05;
    CHECK(exact_exceedance(m) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(exact_exceedance_conditioning(m) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(exact_exceedance(m) == doctest::Approx(0.0513).epsilon(1e-12));

    SUBCASE("crisis modification lands on 0.07445") {
        const double crisis = 0.3 * 0.55 * 0.43 + 0.7 * 0.1 * 0.05;
        CHECK(exact_exceedance(m, 1) == doctest::Approx(crisis).epsilon(1e-12));
        CHECK(exact_exceedance_conditioning(m, 1) == doctest::Approx(0.07445).epsilon(1e-12));
    }
    SUBCASE("threshold zero always exceeds") {
        RiskModel z = m;
        z.threshold = 0;
        CHECK(exact_exceedance(z) == doctest::Approx(1.0));
    }
    SUBCASE("both evaluators agree on every modification") {
        for (int k = 0; k <= 7; ++k)
            CHECK(exact_exceedance(m, k) == doctest::Approx(exact_exceedance_conditioning(m, k)).epsilon(1e-12));
    }
}

TEST_CASE("loss distribution sums to one and weights threshold tail") {
    const RiskModel m = fig1();
    const auto dist = exact_loss_distribution(m);
    double total = 0.0, tail = 0.0;
    for (const auto& [loss, p] : dist) {
        total += p;
        if (loss >= m.threshold) tail += p;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tail == doctest::Approx(exact_exceedance(m)).epsilon(1e-12));
}

TEST_CASE("monte carlo is deterministic and converges") {
    const RiskModel m = fig1();
    const auto a = monte_carlo(m, 0, 100000, 7);
    const auto b = monte_carlo(m, 0, 100000, 7);
    CHECK(a.estimate == b.estimate);
    const auto one = monte_carlo(m, 0, 1, 99);
    CHECK((one.estimate == 0.0 || one.estimate == 1.0));

    const double exact = exact_exceedance(m);
    int inside = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto r = monte_carlo(m, 0, 40000, seed);
        if (std::abs(r.estimate - exact) <= 4.0 * r.stderr_) ++inside;
    }
    CHECK(inside >= 59); // >= 99% of seeded runs inside 4 sigma
}

TEST_CASE("monotonicity of exceedance in probabilities") {
    RiskModel m = fig1();
    const double base = exact_exceedance(m);
    for (auto& t : m.transitions) {
        RiskModel up = m;
        for (auto& tt : up.transitions)
            if (tt.from == t.from && tt.to == t.to) tt.p = std::min(1.0, tt.p + 0.2);
        CHECK(exact_exceedance(up) >= base - 1e-15);
    }
    RiskModel up = m;
    up.items[2].intrinsic_p += 0.3; // RI3, not in the XOR group
    CHECK(exact_exceedance(up) >= base - 1e-15);
}

TEST_CASE("classical sensitivity finds the crisis modification") {
    const RiskModel m = fig1();
    const auto r = classical_sensitivity(m, 0.0775, 0.005, 0.70, 42);
    REQUIRE(r.found_index.has_value());
    CHECK(*r.found_index == 1);
    CHECK(r.model_evaluations == r.shots_per_modification * 5);

    const auto none = classical_sensitivity(m, 0.9, 0.01, 0.70, 42);
    CHECK(!none.found_index.has_value());
}

TEST_CASE("chain models plant a grid-exact parameter") {
    for (int n = 2; n <= 7; ++n) {
        const int cell = default_planted_cell(n);
        const RiskModel m = make_chain_model(n, 6, cell);
        CHECK(static_cast<int>(m.items.size()) == n);
        for (const auto& it : m.items) CHECK(it.cost == 1);
        CHECK(m.threshold == n);
        const double target = std::pow(std::sin(M_PI * cell / 64.0), 2.0);
        CHECK(exact_exceedance_conditioning(m, 1) == doctest::Approx(target).epsilon(1e-10));
        // planted parameter is the unique qualifier
        for (int k = 2; k <= m.max_modification_index(); ++k)
            CHECK(std::abs(exact_exceedance_conditioning(m, k) - target) > 1e-4);
    }
}

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrisk/grover.hpp"
#include "qrisk/qae.hpp"
#include "qrisk/resources.hpp"
#include "qrisk/theory.hpp"

namespace {

constexpr const char* kVersion = "qrisk 1.0.0";

struct GlobalArgs {
    std::string model_path;
    std::uint64_t seed = 12345;
    std::uint64_t shots = 0;
    std::string out_dir = ".";
    std::string format = "csv";
};

void add_globals(CLI::App* cmd, GlobalArgs& g, bool needs_model) {
    auto* m = cmd->add_option("--model", g.model_path, "model JSON file");
    if (needs_model) m->required();
    cmd->add_option("--seed", g.seed, "PRNG seed");
    cmd->add_option("--shots", g.shots, "sample shots (0: exact only)");
    cmd->add_option("--out", g.out_dir, "output directory");
    cmd->add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void write_file(const GlobalArgs& g, const std::string& name, const std::string& content,
                nlohmann::json& manifest) {
    std::filesystem::create_directories(g.out_dir);
    const std::string path = g.out_dir + "/" + name;
    std::ofstream(path) << content;
    manifest["outputs"].push_back(path);
}

nlohmann::json make_manifest(const std::string& command, const GlobalArgs& g, nlohmann::json params) {
    nlohmann::json m;
    m["command"] = command;
    m["model"] = g.model_path;
    m["seed"] = g.seed;
    m["shots"] = g.shots;
    m["format"] = g.format;
    m["version"] = kVersion;
    m["parameters"] = std::move(params);
    m["outputs"] = nlohmann::json::array();
    return m;
}

void finish(const GlobalArgs& g, nlohmann::json& manifest) {
    std::filesystem::create_directories(g.out_dir);
    std::ofstream(g.out_dir + "/manifest.json") << manifest.dump(2) << "\n";
}

std::string histogram_json(const qrisk::Histogram& h) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::uint64_t o = 0; o < h.probs.size(); ++o)
        rows.push_back({{"outcome", qrisk::bits_lsb_first(o, h.width)},
                        {"count", h.counts.empty() ? 0 : h.counts[o]},
                        {"probability", h.probs[o]}});
    return rows.dump(2) + "\n";
}

void emit_histogram(const GlobalArgs& g, const std::string& stem, const qrisk::Histogram& h,
                    nlohmann::json& manifest) {
    if (g.format == "json")
        write_file(g, stem + ".json", histogram_json(h), manifest);
    else
        write_file(g, stem + ".csv", h.to_csv(), manifest);
}

int cmd_classical(const GlobalArgs& g, const std::string& mode, int mod) {
    const qrisk::RiskModel model = qrisk::load_model(g.model_path);
    nlohmann::json manifest = make_manifest("classical", g, {{"mode", mode}, {"mod", mod}});
    std::string table = "loss,probability\n";
    for (const auto& [loss, p] : qrisk::exact_loss_distribution(model, mod)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%lld,%.12g\n", loss, p);
        table += buf;
    }
    if (mode == "exact") {
        const double p = qrisk::exact_exceedance(model, mod);
        const double p2 = qrisk::exact_exceedance_conditioning(model, mod);
        std::printf("exceedance (enumeration)  = %.12g\n", p);
        std::printf("exceedance (conditioning) = %.12g\n", p2);
    } else {
        const std::uint64_t shots = g.shots ? g.shots : 1000000;
        const auto mc = qrisk::monte_carlo(model, mod, shots, g.seed);
        std::printf("exceedance (monte carlo, %llu shots) = %.12g +- %.3g\n",
                    static_cast<unsigned long long>(mc.shots), mc.estimate, mc.stderr_);
    }
    write_file(g, "loss_distribution.csv", table, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_qae(const GlobalArgs& g, int n_ae, int mod) {
    const qrisk::RiskModel model = qrisk::load_model(g.model_path);
    nlohmann::json manifest = make_manifest("qae", g, {{"n_ae", n_ae}, {"mod", mod}});
    qrisk::CompileOptions opts;
    opts.with_modifications = !model.modifications.empty();
    const qrisk::QaeResult res = qrisk::run_qae(model, n_ae, mod, g.shots, g.seed, opts);
    const std::uint64_t grid = 1ULL << n_ae;
    const std::uint64_t mirror = (grid - res.mode) % grid;
    std::printf("modes: %llu and %llu  decoded P = %.6g  modal mass = %.6g\n",
                static_cast<unsigned long long>(std::min(res.mode, mirror)),
                static_cast<unsigned long long>(std::max(res.mode, mirror)),
                qrisk::decode(res.mode, n_ae), res.modal_mass);
    emit_histogram(g, "qae_histogram", res.histogram, manifest);
    std::string decoded = "outcome,a,P(a)\n";
    for (const auto& [a, p] : res.decoded) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s,%llu,%.12g\n",
                      qrisk::bits_lsb_first(a, n_ae).c_str(), static_cast<unsigned long long>(a), p);
        decoded += buf;
    }
    write_file(g, "qae_decoded.csv", decoded, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_sensitivity(const GlobalArgs& g, double target_p, std::vector<std::uint64_t> outcomes,
                    int steps, int widen, int n_ae) {
    const qrisk::RiskModel model = qrisk::load_model(g.model_path);
    nlohmann::json manifest = make_manifest(
        "sensitivity", g, {{"target_p", target_p}, {"steps", steps}, {"widen", widen}, {"n_ae", n_ae}});
    qrisk::SearchTarget target;
    if (!outcomes.empty())
        target.outcomes = std::move(outcomes);
    else
        target = qrisk::target_from_probability(target_p, n_ae, widen);
    qrisk::SearchConfig cfg;
    const int n_s = qrisk::compile_model(model, {true, false, false, qrisk::IndicatorStyle::None})
                        .layout.mod_reg.size();
    cfg.steps = steps > 0 ? steps : qrisk::optimal_steps(std::pow(2.0, n_s), 1.0);
    cfg.shots = g.shots;
    cfg.seed = g.seed;
    const qrisk::SearchResult res = qrisk::run_search(model, target, cfg, n_ae);
    std::printf("steps = %d  top modification = %s (index %d)  exact probability = %.6g\n", res.steps,
                qrisk::bits_lsb_first(res.top_index, res.histogram.width).c_str(), res.top_index,
                res.top_probability);
    std::printf("model calls = %llu\n", static_cast<unsigned long long>(res.model_calls));
    const double uniform = 1.0 / static_cast<double>(res.marginal.size());
    if (res.top_probability < 2.0 * uniform)
        std::printf("warning: output close to uniform; target may be unreachable\n");
    emit_histogram(g, "sensitivity_histogram", res.histogram, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_scaling(const GlobalArgs& g, int min_items, int max_items, double confidence, int n_ae) {
    nlohmann::json manifest = make_manifest("scaling", g,
                                            {{"min_items", min_items},
                                             {"max_items", max_items},
                                             {"confidence", confidence},
                                             {"n_ae", n_ae}});
    const auto rows = qrisk::scaling_experiment(min_items, max_items, confidence, g.seed, n_ae);
    for (const auto& r : rows)
        std::printf("n=%d params=%d classical=%llu quantum=%llu steps=%d planted P=%.3f\n", r.n_items,
                    r.n_params, static_cast<unsigned long long>(r.classical_evals),
                    static_cast<unsigned long long>(r.quantum_model_calls), r.grover_steps,
                    r.planted_probability);
    write_file(g, "scaling.csv", qrisk::scaling_csv(rows), manifest);
    finish(g, manifest);
    return 0;
}

int cmd_theory_fp(const GlobalArgs& g, int n, std::vector<double> alphas, int max_steps) {
    nlohmann::json manifest = make_manifest("theory false-positive", g, {{"n", n}, {"max_steps", max_steps}});
    std::string csv = "alpha,m_hat,predicted_steps,predicted_success,steps,measured_success\n";
    for (double a : alphas) {
        std::vector<double> vec(n, 0.0);
        vec[0] = a;
        const double m_hat = qrisk::effective_solutions({a});
        const double s_hat = qrisk::predicted_steps(std::pow(2.0, n), m_hat);
        const int steps = max_steps > 0 ? max_steps : std::max(1, static_cast<int>(std::llround(s_hat)));
        const double p = qrisk::run_false_positive_grover(n, vec, steps);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%d,%.6g\n", a, m_hat, s_hat,
                      qrisk::predicted_success({a}), steps, p);
        csv += buf;
        std::printf("%s", buf);
    }
    write_file(g, "theory_false_positive.csv", csv, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_theory_root(const GlobalArgs& g, int n, int k, int max_steps) {
    nlohmann::json manifest = make_manifest("theory root", g, {{"n", n}, {"k", k}});
    std::string csv = "n_search,k,a,step,delta_root,delta_std,ratio\n";
    for (int a = 1; a <= (1 << k); ++a) {
        const int optimum =
            static_cast<int>(std::llround(qrisk::predicted_steps(std::pow(2.0, n), 1.0)));
        for (int s = 1; s <= (max_steps > 0 ? max_steps : optimum); ++s) {
            const auto d = qrisk::root_grover_delta(n, 1, k, a, s);
            char buf[160];
            std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.9g,%.9g,%.9g\n", n, k, a, s, d.delta_root,
                          d.delta_std, d.ratio);
            csv += buf;
            std::printf("%s", buf);
        }
    }
    write_file(g, "theory_root.csv", csv, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_theory_unequal(const GlobalArgs& g, std::vector<double> alphas, int k, int n, int max_steps) {
    nlohmann::json manifest = make_manifest("theory unequal", g, {{"k", k}, {"n", n}});
    std::string csv = "alpha,k,bound,min_measured_ratio\n";
    for (double a : alphas) {
        const double ratio = qrisk::unequal_activation_ratio(a, k, n, max_steps);
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%.6g,%d,%.9g,%.9g\n", a, k,
                      std::cos(a) * std::cos(a) / std::pow(2.0, k), ratio);
        csv += buf;
        std::printf("%s", buf);
    }
    write_file(g, "theory_unequal.csv", csv, manifest);
    finish(g, manifest);
    return 0;
}

int cmd_resources(const GlobalArgs& g, int n_r, int n_t, int n_c, int n_ae, int n_params, double factor) {
    nlohmann::json manifest = make_manifest("resources", g,
                                            {{"n_r", n_r},
                                             {"n_t", n_t},
                                             {"n_c", n_c},
                                             {"n_ae", n_ae},
                                             {"n_params", n_params},
                                             {"factor", factor}});
    const auto q = qrisk::estimate_qubits(n_r, n_t, n_c, n_ae);
    const auto gg = qrisk::estimate_gates(n_r, n_t, n_c, n_ae, n_params, factor);
    const std::string report = qrisk::resource_report(q, gg);
    std::printf("%s", report.c_str());
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "items,modification,tree_ancilla,qae,cost,headline,total,model_gates,qae_gates,"
                  "grover_steps,grover_total\n%d,%d,%d,%d,%d,%d,%d,%.6g,%.6g,%d,%.6g\n",
                  q.items, q.modification, q.tree_ancilla, q.qae, q.cost, q.headline, q.total,
                  gg.model_gates, gg.qae_gates, gg.grover_steps, gg.grover_total);
    write_file(g, "resources.csv", buf, manifest);
    finish(g, manifest);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-model quantum search toolkit"};
    app.require_subcommand(1);

    GlobalArgs g;
    std::string mode = "exact";
    int mod = 0, n_ae = 8, steps = 0, widen = 0;
    double target_p = -1.0;
    std::vector<std::uint64_t> outcomes;
    int min_items = 2, max_items = 7, scaling_n_ae = 6;
    double confidence = 0.70;
    int fp_n = 6, root_n = 4, root_k = 1, max_steps = 0, uneq_k = 1, uneq_n = 4, uneq_steps = 3;
    std::vector<double> alphas{0.45};
    int n_r = 150, n_t = 250, n_c = 10, res_ae = 10, n_params = 400;
    double factor = 1.0;

    auto* classical = app.add_subcommand("classical", "exact / Monte-Carlo exceedance");
    add_globals(classical, g, true);
    classical->add_option("--mode", mode)->check(CLI::IsMember({"exact", "mc"}));
    classical->add_option("--mod", mod, "modification index");

    auto* qae = app.add_subcommand("qae", "amplitude-estimation histogram");
    add_globals(qae, g, true);
    qae->add_option("--n-ae", n_ae);
    qae->add_option("--mod", mod);

    auto* sens = app.add_subcommand("sensitivity", "Grover search over modifications");
    add_globals(sens, g, true);
    sens->add_option("--target-p", target_p);
    sens->add_option("--target-outcomes", outcomes);
    sens->add_option("--steps", steps, "Grover steps (0: auto)");
    sens->add_option("--widen", widen);
    sens->add_option("--n-ae", n_ae);

    auto* scal = app.add_subcommand("scaling", "classical vs quantum cost table");
    add_globals(scal, g, false);
    scal->add_option("--min-items", min_items);
    scal->add_option("--max-items", max_items);
    scal->add_option("--confidence", confidence);
    scal->add_option("--n-ae", scaling_n_ae);

    auto* theory = app.add_subcommand("theory", "imperfect-oracle sweeps");
    theory->require_subcommand(1);
    auto* fp = theory->add_subcommand("false-positive");
    add_globals(fp, g, false);
    fp->add_option("--n", fp_n);
    fp->add_option("--alpha", alphas);
    fp->add_option("--steps", max_steps, "steps (0: predicted optimum)");
    auto* root = theory->add_subcommand("root");
    add_globals(root, g, false);
    root->add_option("--n", root_n);
    root->add_option("--k", root_k);
    root->add_option("--steps", max_steps, "max steps (0: optimum)");
    auto* uneq = theory->add_subcommand("unequal");
    add_globals(uneq, g, false);
    uneq->add_option("--alpha", alphas);
    uneq->add_option("--k", uneq_k);
    uneq->add_option("--n", uneq_n);
    uneq->add_option("--max-steps", uneq_steps);

    auto* res = app.add_subcommand("resources", "analytical qubit and gate estimates");
    add_globals(res, g, false);
    res->add_option("--n-r", n_r);
    res->add_option("--n-t", n_t);
    res->add_option("--n-c", n_c);
    res->add_option("--n-ae", res_ae);
    res->add_option("--n-params", n_params);
    res->add_option("--factor", factor);

    try {
        app.parse(argc, argv);
        if (classical->parsed()) return cmd_classical(g, mode, mod);
        if (qae->parsed()) return cmd_qae(g, n_ae, mod);
        if (sens->parsed()) {
            if (target_p < 0.0 && outcomes.empty())
                throw CLI::ValidationError("sensitivity needs --target-p or --target-outcomes");
            return cmd_sensitivity(g, target_p, outcomes, steps, widen, n_ae);
        }
        if (scal->parsed()) return cmd_scaling(g, min_items, max_items, confidence, scaling_n_ae);
        if (fp->parsed()) return cmd_theory_fp(g, fp_n, alphas, max_steps);
        if (root->parsed()) return cmd_theory_root(g, root_n, root_k, max_steps);
        if (uneq->parsed()) return cmd_theory_unequal(g, alphas, uneq_k, uneq_n, uneq_steps);
        if (res->parsed()) return cmd_resources(g, n_r, n_t, n_c, res_ae, n_params, factor);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const qrisk::BudgetError& e) {
        std::fprintf(stderr, "budget error: %s\n", e.what());
        return 3;
    } catch (const qrisk::ModelError& e) {
        std::fprintf(stderr, "model error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

#include "qrisk/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qrisk/rng.hpp"

namespace qrisk {

const RiskItem* RiskModel::find_item(int id) const {
    for (const auto& it : items)
        if (it.id == id) return &it;
    return nullptr;
}

std::vector<int> RiskModel::topological_order() const {
    std::map<int, int> indeg;
    for (const auto& it : items) indeg[it.id] = 0;
    for (const auto& t : transitions) indeg[t.to]++;
    std::vector<int> order;
    std::set<int> ready;
    for (const auto& [id, d] : indeg)
        if (d == 0) ready.insert(id);
    while (!ready.empty()) {
        const int id = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(id);
        for (const auto& t : transitions)
            if (t.from == id && --indeg[t.to] == 0) ready.insert(t.to);
    }
    if (order.size() != items.size()) throw ModelError("cycle", "transition graph has a cycle");
    return order;
}

int RiskModel::xor_group_of(int id) const {
    for (std::size_t g = 0; g < xor_groups.size(); ++g)
        for (int m : xor_groups[g].members)
            if (m == id) return static_cast<int>(g);
    return -1;
}

std::vector<Transition> RiskModel::incoming(int id) const {
    std::vector<Transition> in;
    for (const auto& t : transitions)
        if (t.to == id) in.push_back(t);
    std::sort(in.begin(), in.end(), [](const Transition& a, const Transition& b) { return a.from < b.from; });
    return in;
}

long long RiskModel::total_cost() const {
    long long c = 0;
    for (const auto& it : items) c += it.cost;
    return c;
}

int RiskModel::max_modification_index() const {
    int m = 0;
    for (const auto& mod : modifications) m = std::max(m, mod.index);
    return m;
}

void validate(const RiskModel& model) {
    std::set<int> ids;
    for (const auto& it : model.items) {
        if (!ids.insert(it.id).second)
            throw ModelError("duplicate-id", "item id " + std::to_string(it.id));
        if (it.intrinsic_p < 0.0 || it.intrinsic_p > 1.0)
            throw ModelError("prob-range", "item " + std::to_string(it.id));
        if (it.cost < 0) throw ModelError("cost-range", "item " + std::to_string(it.id));
    }
    for (const auto& t : model.transitions) {
        if (t.from == t.to) throw ModelError("self-transition", std::to_string(t.from));
        if (!ids.count(t.from) || !ids.count(t.to))
            throw ModelError("dangling-id", "transition " + std::to_string(t.from) + "->" + std::to_string(t.to));
        if (t.p < 0.0 || t.p > 1.0)
            throw ModelError("prob-range", "transition " + std::to_string(t.from) + "->" + std::to_string(t.to));
    }
    std::set<int> grouped;
    for (const auto& g : model.xor_groups) {
        if (g.members.size() < 2) throw ModelError("xor-size", "group needs >= 2 members");
        double sum = 0.0;
        for (int m : g.members) {
            if (!ids.count(m)) throw ModelError("dangling-id", "xor member " + std::to_string(m));
            if (!grouped.insert(m).second)
                throw ModelError("xor-overlap", "item " + std::to_string(m) + " in two groups");
            sum += model.find_item(m)->intrinsic_p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ModelError("xor-sum", "group probabilities sum to " + std::to_string(sum));
    }
    std::set<int> mod_indices;
    for (const auto& m : model.modifications) {
        if (m.index <= 0) throw ModelError("mod-index", "index 0 is reserved for no modification");
        if (!mod_indices.insert(m.index).second)
            throw ModelError("mod-index", "duplicate index " + std::to_string(m.index));
        if (m.target.is_item) {
            if (!ids.count(m.target.item_id))
                throw ModelError("dangling-id", "modification item " + std::to_string(m.target.item_id));
        } else {
            bool found = false;
            for (const auto& t : model.transitions)
                found |= (t.from == m.target.from && t.to == m.target.to);
            if (!found) throw ModelError("dangling-id", "modification transition");
        }
    }
    if (model.threshold < 0) throw ModelError("threshold-range", "threshold must be >= 0");
    model.topological_order(); // throws on cycles
    for (int k = 1; k <= model.max_modification_index(); ++k) {
        const RiskModel mod = apply_modification(model, k);
        for (const auto& it : mod.items)
            if (it.intrinsic_p < -1e-12 || it.intrinsic_p > 1.0 + 1e-12)
                throw ModelError("prob-range", "modification " + std::to_string(k) + " leaves item " +
                                                   std::to_string(it.id) + " out of range");
        for (const auto& t : mod.transitions)
            if (t.p < -1e-12 || t.p > 1.0 + 1e-12)
                throw ModelError("prob-range", "modification " + std::to_string(k) +
                                                   " leaves a transition out of range");
    }
}

RiskModel apply_modification(const RiskModel& model, int index) {
    RiskModel out = model;
    if (index == 0) return out;
    for (const auto& m : model.modifications) {
        if (m.index != index) continue;
        if (m.target.is_item) {
            for (auto& it : out.items)
                if (it.id == m.target.item_id) it.intrinsic_p += m.delta;
            const int g = model.xor_group_of(m.target.item_id);
            if (g >= 0) {
                // Shift mass within the group so it still sums to 1.
                double other = 0.0;
                for (int mem : model.xor_groups[g].members)
                    if (mem != m.target.item_id) other += model.find_item(mem)->intrinsic_p;
                for (auto& it : out.items) {
                    if (it.id == m.target.item_id) continue;
                    for (int mem : model.xor_groups[g].members)
                        if (mem == it.id && other > 0.0)
                            it.intrinsic_p -= m.delta * (model.find_item(mem)->intrinsic_p / other);
                }
            }
        } else {
            for (auto& t : out.transitions)
                if (t.from == m.target.from && t.to == m.target.to) t.p += m.delta;
        }
    }
    return out;
}

PropagationResult propagate(const RiskModel& model, const ScenarioDraw& draw) {
    std::set<int> triggered;
    for (int id : model.topological_order()) {
        bool fired = false;
        const int g = model.xor_group_of(id);
        if (g >= 0) {
            const auto it = draw.xor_selection.find(g);
            fired = (it != draw.xor_selection.end() && it->second == id);
        } else {
            const auto it = draw.intrinsic_fired.find(id);
            fired = (it != draw.intrinsic_fired.end() && it->second);
        }
        if (!fired) {
            for (const auto& t : model.incoming(id)) {
                if (!triggered.count(t.from)) continue;
                const auto it = draw.transition_fired.find({t.from, t.to});
                if (it != draw.transition_fired.end() && it->second) {
                    fired = true;
                    break;
                }
            }
        }
        if (fired) triggered.insert(id);
    }
    PropagationResult res;
    res.triggered.assign(triggered.begin(), triggered.end());
    for (int id : res.triggered) res.loss += model.find_item(id)->cost;
    return res;
}

namespace {

// Enumeration coordinates: one slot per XOR group, per non-XOR item, per
// transition, in a deterministic order.
struct DrawSpace {
    const RiskModel& model;
    std::vector<int> free_items;                 // non-XOR item ids, topological
    std::vector<std::pair<int, int>> trans_keys; // (from,to), model order

    explicit DrawSpace(const RiskModel& m) : model(m) {
        for (int id : m.topological_order())
            if (m.xor_group_of(id) < 0) free_items.push_back(id);
        for (const auto& t : m.transitions) trans_keys.emplace_back(t.from, t.to);
    }

    double log2_size() const {
        double s = static_cast<double>(free_items.size() + trans_keys.size());
        for (const auto& g : model.xor_groups) s += std::log2(static_cast<double>(g.members.size()));
        return s;
    }

    template <typename F> void enumerate(F&& visit) const {
        ScenarioDraw draw;
        rec(0, 0, 0, 1.0, draw, visit);
    }

  private:
    template <typename F>
    void rec(std::size_t gi, std::size_t ii, std::size_t ti, double p, ScenarioDraw& d, F&& visit) const {
        if (gi < model.xor_groups.size()) {
            for (int mem : model.xor_groups[gi].members) {
                d.xor_selection[static_cast<int>(gi)] = mem;
                rec(gi + 1, ii, ti, p * model.find_item(mem)->intrinsic_p, d, visit);
            }
            return;
        }
        if (ii < free_items.size()) {
            const double q = model.find_item(free_items[ii])->intrinsic_p;
            for (bool b : {false, true}) {
                d.intrinsic_fired[free_items[ii]] = b;
                rec(gi, ii + 1, ti, p * (b ? q : 1.0 - q), d, visit);
            }
            return;
        }
        if (ti < trans_keys.size()) {
            const double q = model.transitions[ti].p;
            for (bool b : {false, true}) {
                d.transition_fired[trans_keys[ti]] = b;
                rec(gi, ii, ti + 1, p * (b ? q : 1.0 - q), d, visit);
            }
            return;
        }
        if (p > 0.0) visit(d, p);
    }
};

} // namespace

double exact_exceedance(const RiskModel& base, int modification_index) {
    const RiskModel model = apply_modification(base, modification_index);
    const DrawSpace space(model);
    if (space.log2_size() > 26.0) throw ModelError("enumeration-too-large", "over 2^26 scenarios");
    double total = 0.0;
    space.enumerate([&](const ScenarioDraw& d, double p) {
        if (propagate(model, d).loss >= model.threshold) total += p;
    });
    return total;
}

std::map<long long, double> exact_loss_distribution(const RiskModel& base, int modification_index) {
    const RiskModel model = apply_modification(base, modification_index);
    const DrawSpace space(model);
    if (space.log2_size() > 26.0) throw ModelError("enumeration-too-large", "over 2^26 scenarios");
    std::map<long long, double> dist;
    space.enumerate([&](const ScenarioDraw& d, double p) { dist[propagate(model, d).loss] += p; });
    return dist;
}

namespace {

// Independent evaluator: condition item by item in topological order,
// marginalizing transition coins analytically.
double conditioning_rec(const RiskModel& model, const std::vector<int>& order, std::size_t pos,
                        std::map<int, bool>& triggered, std::map<int, int>& xor_pick, long long loss) {
    if (pos == order.size()) return loss >= model.threshold ? 1.0 : 0.0;
    const int id = order[pos];
    const int g = model.xor_group_of(id);
    double base_p;
    if (g >= 0) {
        auto pick = xor_pick.find(g);
        if (pick == xor_pick.end()) {
            double total = 0.0;
            for (int mem : model.xor_groups[g].members) {
                xor_pick[g] = mem;
                const double pm = model.find_item(mem)->intrinsic_p;
                if (pm > 0.0)
                    total += pm * conditioning_rec(model, order, pos, triggered, xor_pick, loss);
                xor_pick.erase(g);
            }
            return total;
        }
        base_p = (pick->second == id) ? 1.0 : 0.0;
    } else {
        base_p = model.find_item(id)->intrinsic_p;
    }
    double not_fired = 1.0 - base_p;
    for (const auto& t : model.incoming(id))
        if (triggered.at(t.from)) not_fired *= 1.0 - t.p;
    const double fired = 1.0 - not_fired;
    double total = 0.0;
    const long long cost = model.find_item(id)->cost;
    if (fired > 0.0) {
        triggered[id] = true;
        total += fired * conditioning_rec(model, order, pos + 1, triggered, xor_pick, loss + cost);
    }
    if (not_fired > 0.0) {
        triggered[id] = false;
        total += not_fired * conditioning_rec(model, order, pos + 1, triggered, xor_pick, loss);
    }
    triggered.erase(id);
    return total;
}

} // namespace

double exact_exceedance_conditioning(const RiskModel& base, int modification_index) {
    const RiskModel model = apply_modification(base, modification_index);
    const std::vector<int> order = model.topological_order();
    std::map<int, bool> triggered;
    std::map<int, int> xor_pick;
    return conditioning_rec(model, order, 0, triggered, xor_pick, 0);
}

namespace {

// One Monte Carlo scenario, drawn with one uniform per coin in a fixed order.
long long draw_loss(const RiskModel& model, const std::vector<int>& order, Rng& rng) {
    std::map<int, bool> triggered;
    std::map<int, int> xor_pick;
    long long loss = 0;
    for (int id : order) {
        const int g = model.xor_group_of(id);
        bool fired;
        if (g >= 0) {
            auto pick = xor_pick.find(g);
            if (pick == xor_pick.end()) {
                const double u = rng.uniform();
                double acc = 0.0;
                int sel = model.xor_groups[g].members.back();
                for (int mem : model.xor_groups[g].members) {
                    acc += model.find_item(mem)->intrinsic_p;
                    if (u < acc) {
                        sel = mem;
                        break;
                    }
                }
                pick = xor_pick.emplace(g, sel).first;
            }
            fired = (pick->second == id);
        } else {
            fired = rng.uniform() < model.find_item(id)->intrinsic_p;
        }
        for (const auto& t : model.incoming(id)) {
            const bool coin = rng.uniform() < t.p; // always consume the coin
            if (!fired && triggered.at(t.from) && coin) fired = true;
        }
        triggered[id] = fired;
        if (fired) loss += model.find_item(id)->cost;
    }
    return loss;
}

constexpr std::uint64_t kMcChunk = 4096;

} // namespace

MonteCarloResult monte_carlo(const RiskModel& base, int modification_index, std::uint64_t shots,
                             std::uint64_t seed) {
    const RiskModel model = apply_modification(base, modification_index);
    const std::vector<int> order = model.topological_order();
    const std::uint64_t chunks = (shots + kMcChunk - 1) / kMcChunk;
    std::vector<std::uint64_t> hits(chunks, 0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
        const std::uint64_t n = std::min<std::uint64_t>(kMcChunk, shots - c * kMcChunk);
        std::uint64_t h = 0;
        for (std::uint64_t s = 0; s < n; ++s)
            if (draw_loss(model, order, rng) >= model.threshold) ++h;
        hits[c] = h;
    }
    std::uint64_t total = 0;
    for (std::uint64_t h : hits) total += h;
    MonteCarloResult res;
    res.shots = shots;
    res.estimate = static_cast<double>(total) / static_cast<double>(shots);
    res.stderr_ = std::sqrt(std::max(res.estimate * (1.0 - res.estimate), 0.0) / static_cast<double>(shots));
    return res;
}

SensitivityResult classical_sensitivity(const RiskModel& model, double target_p, double tolerance,
                                        double confidence, std::uint64_t seed) {
    SensitivityResult res;
    const int n_mods = model.max_modification_index();
    if (n_mods < 1) throw ModelError("no-modifications", "sensitivity needs modifications");
    int qualifying = -1;
    for (int k = 1; k <= n_mods; ++k) {
        if (std::abs(exact_exceedance_conditioning(model, k) - target_p) <= tolerance) {
            qualifying = k;
            break;
        }
    }
    if (qualifying < 0) {
        res.found_index = std::nullopt;
        return res;
    }
    const int trials = 40;
    for (std::uint64_t shots = 16;; shots *= 2) {
        int successes = 0;
        for (int t = 0; t < trials; ++t) {
            int best = -1;
            double best_err = 0.0;
            for (int k = 1; k <= n_mods; ++k) {
                const std::uint64_t s = derive_seed(
                    seed, splitmix64(shots) ^ ((static_cast<std::uint64_t>(t) << 16) | static_cast<std::uint64_t>(k)));
                const double err = std::abs(monte_carlo(model, k, shots, s).estimate - target_p);
                if (best < 0 || err < best_err) {
                    best = k;
                    best_err = err;
                }
            }
            if (best == qualifying) ++successes;
        }
        if (static_cast<double>(successes) >= confidence * trials || shots >= (1ULL << 24)) {
            res.found_index = qualifying;
            res.shots_per_modification = shots;
            res.model_evaluations = shots * static_cast<std::uint64_t>(n_mods);
            return res;
        }
    }
}

namespace {

RiskModel chain_base(int n_items) {
    if (n_items < 2 || n_items > 7) throw ModelError("chain-size", "chain models cover 2..7 items");
    const double probs[7] = {0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8};
    const Transition edges[6] = {{1, 2, 0.4}, {1, 3, 0.3}, {3, 4, 0.2},
                                 {3, 5, 0.1}, {5, 6, 0.5}, {5, 7, 0.6}};
    RiskModel m;
    for (int i = 1; i <= n_items; ++i)
        m.items.push_back({i, "RI" + std::to_string(i), probs[i - 1], 1});
    for (const auto& e : edges)
        if (e.from <= n_items && e.to <= n_items) m.transitions.push_back(e);
    m.threshold = n_items;
    int idx = 1;
    for (int i = 1; i <= n_items; ++i)
        m.modifications.push_back({idx++, {true, i, 0, 0}, 0.1});
    for (const auto& t : m.transitions)
        m.modifications.push_back({idx++, {false, 0, t.from, t.to}, 0.1});
    return m;
}

} // namespace

int default_planted_cell(int n_items) {
    switch (n_items) {
    case 2: return 9;
    case 3: return 7;
    case 4: return 5;
    case 5: return 4;
    case 6: return 4;
    case 7: return 4;
    default: throw ModelError("chain-size", "chain models cover 2..7 items");
    }
}

RiskModel make_chain_model(int n_items, int n_ae, int planted_cell) {
    RiskModel m = chain_base(n_items);
    const double target = std::pow(std::sin(M_PI * planted_cell / std::pow(2.0, n_ae)), 2.0);
    // Exceedance is linear in item 1's intrinsic probability; solve for the
    // planted value directly from two evaluations.
    RiskModel probe = m;
    probe.items[0].intrinsic_p = 0.0;
    const double e0 = exact_exceedance_conditioning(probe);
    probe.items[0].intrinsic_p = 1.0;
    const double slope = exact_exceedance_conditioning(probe) - e0;
    if (std::abs(slope) < 1e-15) throw ModelError("chain-plant", "exceedance insensitive to item 1");
    const double planted_p = (target - e0) / slope;
    if (planted_p < 0.0 || planted_p > 1.0)
        throw ModelError("chain-plant", "planted cell unreachable: p=" + std::to_string(planted_p));
    m.modifications[0].delta = planted_p - m.items[0].intrinsic_p;
    validate(m);
    return m;
}

namespace {

using nlohmann::json;

ModTarget parse_target(const json& j) {
    ModTarget t;
    if (j.contains("item")) {
        t.is_item = true;
        t.item_id = j.at("item").get<int>();
    } else {
        t.is_item = false;
        t.from = j.at("from").get<int>();
        t.to = j.at("to").get<int>();
    }
    return t;
}

} // namespace

RiskModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError("syntax", e.what()); // message carries the byte position
    }
    RiskModel m;
    try {
        for (const auto& ji : j.at("items")) {
            RiskItem it;
            it.id = ji.at("id").get<int>();
            it.name = ji.value("name", "RI" + std::to_string(it.id));
            it.intrinsic_p = ji.at("p").get<double>();
            it.cost = ji.at("cost").get<long long>();
            m.items.push_back(it);
        }
        for (const auto& jt : j.value("transitions", json::array()))
            m.transitions.push_back({jt.at("from").get<int>(), jt.at("to").get<int>(), jt.at("p").get<double>()});
        for (const auto& jg : j.value("xor_groups", json::array())) {
            XorGroup g;
            for (const auto& id : jg) g.members.push_back(id.get<int>());
            m.xor_groups.push_back(g);
        }
        for (const auto& jm : j.value("modifications", json::array()))
            m.modifications.push_back(
                {jm.at("index").get<int>(), parse_target(jm.at("target")), jm.at("delta").get<double>()});
        m.threshold = j.at("threshold").get<long long>();
    } catch (const json::exception& e) {
        throw ModelError("syntax", e.what());
    }
    validate(m);
    return m;
}

RiskModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("io", "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

} // namespace qrisk

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrisk {

/// A modeled adverse event with an intrinsic trigger probability and a loss impact.
struct RiskItem {
    int id = 0;
    std::string name;
    double intrinsic_p = 0.0;
    long long cost = 0;
};

/// Directed edge: a triggered `from` item triggers `to` with probability p.
struct Transition {
    int from = 0;
    int to = 0;
    double p = 0.0;
};

/// Set of items of which exactly one is triggered per scenario.
/// Member intrinsic probabilities must sum to 1.
struct XorGroup {
    std::vector<int> members;
};

/// Target of a probability modification: either an item's intrinsic
/// probability or a transition probability.
struct ModTarget {
    bool is_item = true;
    int item_id = 0;
    int from = 0;
    int to = 0;
};

/// One setting of the modification register. Index 0 is reserved for
/// "no modification". For a member of an XOR pair, the delta shifts
/// probability mass within the group toward the target.
struct Modification {
    int index = 0;
    ModTarget target;
    double delta = 0.0;
};

struct RiskModel {
    std::vector<RiskItem> items;
    std::vector<Transition> transitions;
    std::vector<XorGroup> xor_groups;
    std::vector<Modification> modifications;
    long long threshold = 0;

    const RiskItem* find_item(int id) const;
    /// Item ids in a deterministic topological order (ascending id among ready items).
    std::vector<int> topological_order() const;
    /// Group index an item belongs to, or -1.
    int xor_group_of(int id) const;
    /// Incoming transitions of an item, ordered by source id.
    std::vector<Transition> incoming(int id) const;
    long long total_cost() const;
    /// Largest modification index in use (0 when none are defined).
    int max_modification_index() const;
};

/// Raised on malformed model files. `kind` names the violated invariant
/// ("syntax", "cycle", "xor-sum", "prob-range", "dangling-id", ...).
class ModelError : public std::runtime_error {
  public:
    ModelError(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

  private:
    std::string kind_;
};

/// One resolved scenario: every intrinsic and transition coin has an outcome.
/// For an XOR group, xor_selection picks the triggered member.
struct ScenarioDraw {
    std::map<int, bool> intrinsic_fired;                 // item id -> fired
    std::map<std::pair<int, int>, bool> transition_fired; // (from,to) -> fired
    std::map<int, int> xor_selection;                    // group index -> member id
};

struct PropagationResult {
    std::vector<int> triggered; // ascending item ids
    long long loss = 0;
};

struct MonteCarloResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::uint64_t shots = 0;
};

struct SensitivityResult {
    std::optional<int> found_index; // empty: no qualifying parameter
    std::uint64_t model_evaluations = 0;
    std::uint64_t shots_per_modification = 0;
};

/// Parse and validate a model from JSON text. Throws ModelError.
RiskModel parse_model(const std::string& text);
RiskModel load_model(const std::string& path);

/// Validate all structural invariants; throws ModelError on violation.
void validate(const RiskModel& model);

/// Return a copy of the model with modification `index` applied.
/// Unknown indices (including 0) leave the model unchanged.
RiskModel apply_modification(const RiskModel& model, int index);

/// Cascade a resolved draw through the tree.
PropagationResult propagate(const RiskModel& model, const ScenarioDraw& draw);

/// Exact P(loss >= threshold) by enumerating every scenario draw.
/// Guard: at most 2^26 scenarios. Throws ModelError("enumeration-too-large").
double exact_exceedance(const RiskModel& model, int modification_index = 0);

/// Second, independent exact evaluator: recursive conditioning over items
/// in topological order (transitions are marginalized analytically).
double exact_exceedance_conditioning(const RiskModel& model, int modification_index = 0);

/// Exact loss distribution (loss -> probability), by draw enumeration.
std::map<long long, double> exact_loss_distribution(const RiskModel& model,
                                                    int modification_index = 0);

/// Seeded Monte Carlo estimate of P(loss >= threshold). The result is a
/// pure function of (model, modification_index, shots, seed): shots are
/// split into fixed-size chunks with per-chunk derived seeds, so the
/// estimate does not depend on the worker count.
MonteCarloResult monte_carlo(const RiskModel& model, int modification_index,
                             std::uint64_t shots, std::uint64_t seed);

/// Classical sensitivity search: find the modification whose exceedance
/// probability lies within `tolerance` of `target_p`, using per-modification
/// Monte Carlo. The shot budget is grown until the qualifying index is
/// identified in at least `confidence` of seeded trials.
/// model_evaluations reports the total Monte Carlo draws consumed by one
/// identification run at the converged budget.
SensitivityResult classical_sensitivity(const RiskModel& model, double target_p,
                                        double tolerance, double confidence,
                                        std::uint64_t seed);

/// The truncated scaling-study chain model with `n_items` in [2,7]:
/// fixed tree shape, unit costs, threshold = n_items, one "+0.1"
/// modification per parameter. The planted modification (intrinsic
/// probability of the first item) gets a delta solved so that the modified
/// exceedance lands on QAE grid cell `planted_cell` of a 2^n_ae grid.
RiskModel make_chain_model(int n_items, int n_ae, int planted_cell);

/// Default planted grid cells used by the scaling experiment (n_ae = 6).
int default_planted_cell(int n_items);

} // namespace qrisk

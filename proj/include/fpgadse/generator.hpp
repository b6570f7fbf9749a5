#pragma once

#include "fpgadse/catalog.hpp"
#include "fpgadse/errors.hpp"
#include "fpgadse/estimator.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fpgadse {

/// Indices into DesignSpace::profiles.
struct LayerChoice {
    std::size_t layer_profile = 0;
    std::optional<std::size_t> activation_profile;
};

/// Catalog x clock x strategy for one model. Per-layer choice lists are
/// sorted by (layer variant id, activation variant id), which is also the
/// tie-break order.
struct DesignSpace {
    std::vector<TemplateProfile> profiles;
    std::vector<std::vector<LayerChoice>> per_layer;
    std::vector<Rational> clocks;  // ascending
    std::vector<StrategyKind> strategies;

    /// Number of layer assignments; saturates at UINT64_MAX.
    std::uint64_t assignments() const noexcept;
    /// assignments() x |clocks| x |strategies|; saturates at UINT64_MAX.
    std::uint64_t size() const noexcept;
};

struct SpaceOptions {
    Rational clock_step = Rational(25);
    std::optional<std::vector<Rational>> clocks;
    std::optional<std::vector<StrategyKind>> strategies;
};

/// Default clock grid: f_min, f_min + step, ... up to the highest clock at
/// which some assignment is within every template's f_max (and the device's).
/// Throws UncoveredLayerKind.
DesignSpace enumerate_space(const Catalog& catalog, const NetworkModel& model, const FpgaDevice& device,
                            const SpaceOptions& options = {});

struct Evaluated {
    CandidateConfig config;
    EvalReport report;
    std::optional<Rational> objective;
};

struct SearchOptions {
    std::uint64_t cap = 1'000'000;
    std::size_t top_k = 5;
    unsigned jobs = 1;  // exhaustive only; results do not depend on it
};

struct SearchOutcome {
    std::string algorithm;
    Objective objective = Objective::MinEnergyPerItem;
    std::uint64_t space_size = 0;
    std::uint64_t explored = 0;
    std::uint64_t pruned = 0;
    std::uint64_t feasible_evaluated = 0;
    std::optional<Evaluated> best;
    std::vector<Evaluated> ranked;
    std::vector<Evaluated> pareto;  // ascending energy_per_item
    std::optional<Evaluated> least_violating;
    std::map<std::string, std::uint64_t> violation_counts;
};

class NoFeasibleCandidate : public Error {
public:
    explicit NoFeasibleCandidate(SearchOutcome outcome);
    const SearchOutcome& outcome() const noexcept { return outcome_; }

private:
    SearchOutcome outcome_;
};

/// Evaluates every candidate. Throws SpaceTooLarge or NoFeasibleCandidate.
/// Candidate from "layer_id[+activation_id],..." (one entry per layer, in
/// order). Layers not listed take their first-ranked choice; the clock
/// defaults to the highest the assigned templates and device allow.
CandidateConfig candidate_from_assignment(const Catalog& catalog, const NetworkModel& model,
                                          const FpgaDevice& device, std::string_view assign,
                                          const std::optional<Rational>& clock, const StrategyKind& strategy);

SearchOutcome search_exhaustive(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device,
                                const ApplicationSpec& appspec, const SearchOptions& options = {});

/// Depth-first over layer assignments within each (clock, strategy) pair,
/// pruning with an admissible lower bound. Same optimum as the exhaustive
/// search; ranked and pareto cover only the candidates it evaluated.
SearchOutcome search_branch_and_bound(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device,
                                      const ApplicationSpec& appspec, const SearchOptions& options = {});

struct ParetoPoint {
    Rational energy_per_item;
    Rational t_inf;
    std::int64_t lut = 0;
    std::size_t id = 0;

    friend bool operator==(const ParetoPoint&, const ParetoPoint&) = default;
};

/// a <= b on every axis and < on at least one.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

/// Non-dominated subset sorted by (energy_per_item, t_inf, lut, id).
std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points);

/// Lower bound on the objective of any completion of a partial assignment.
/// `fixed[i]` holds the chosen index for the first fixed.size() layers.
/// Returns nullopt when no completion can be feasible.
std::optional<Rational> partial_lower_bound(const DesignSpace& space, const NetworkModel& model,
                                            const FpgaDevice& device, const ApplicationSpec& appspec,
                                            std::size_t clock_index, std::size_t strategy_index,
                                            const std::vector<std::size_t>& fixed);

/// Materializes a candidate from per-layer choice indices.
CandidateConfig make_candidate(const DesignSpace& space, const std::vector<std::size_t>& choices,
                               std::size_t clock_index, std::size_t strategy_index);

nlohmann::json to_json(const Evaluated& evaluated);
nlohmann::json to_json(const SearchOutcome& outcome);
std::string ranked_csv(const SearchOutcome& outcome);
std::string pareto_csv(const SearchOutcome& outcome);

}  // namespace fpgadse

#include "fpgadse/generator.hpp"

#include "fpgadse/errors.hpp"
#include "fpgadse/workload.hpp"
#include "json_util.hpp"
#include "report_util.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <thread>

namespace fpgadse {

using detail::json;

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
    if (a == 0 || b == 0) return 0;
    if (a > kSaturated / b) return kSaturated;
    return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
    return a > kSaturated - b ? kSaturated : a + b;
}

/// Choice index per layer, then clock index, then strategy index.
struct Key {
    std::vector<std::size_t> choices;
    std::size_t clock = 0;
    std::size_t strategy = 0;
};

struct Record {
    Key key;
    EvalReport report;
    std::optional<Rational> objective;
};

class Engine {
public:
    Engine(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device, const ApplicationSpec& appspec)
        : space_(space), device_(device), appspec_(appspec), ops_(ops_count(model)),
          period_(nominal_period(appspec.workload)) {
        if (space.per_layer.size() != model.layers.size()) {
            throw ValidationError("design space does not match the model's layer count");
        }
        const std::size_t layers = model.layers.size();
        costs_.resize(layers);
        for (std::size_t l = 0; l < layers; ++l) {
            if (space.per_layer[l].empty()) {
                throw UncoveredLayerKind(std::string(to_string(model.layers[l].kind)));
            }
            for (const auto& choice : space.per_layer[l]) {
                const TemplateProfile* act =
                    choice.activation_profile ? &space.profiles[*choice.activation_profile] : nullptr;
                costs_[l].push_back(layer_cost(model.layers[l], space.profiles[choice.layer_profile], act));
            }
        }
        // Suffix summaries over layers d..L-1, used by the bound.
        min_cycles_.assign(layers + 1, 0);
        max_cycles_.assign(layers + 1, 0);
        min_coeff_.assign(layers + 1, Rational(0));
        min_res_.assign(layers + 1, Resources{});
        max_fmax_.assign(layers + 1, std::nullopt);
        best_error_.assign(layers + 1, Rational(0));
        error_unknown_.assign(layers + 1, false);
        subtree_.assign(layers + 1, 1);
        for (std::size_t l = layers; l-- > 0;) {
            const auto& cs = costs_[l];
            std::int64_t lo = cs[0].cycles, hi = cs[0].cycles;
            Rational k = cs[0].dyn_coeff;
            Resources r = cs[0].resources;
            Rational fmax = cs[0].f_max;
            std::optional<Rational> err;
            bool needs_activation = cs[0].has_activation;
            for (const auto& c : cs) {
                lo = std::min(lo, c.cycles);
                hi = std::max(hi, c.cycles);
                if (c.dyn_coeff < k) k = c.dyn_coeff;
                r.lut = std::min(r.lut, c.resources.lut);
                r.ff = std::min(r.ff, c.resources.ff);
                r.dsp = std::min(r.dsp, c.resources.dsp);
                r.bram = std::min(r.bram, c.resources.bram);
                if (c.f_max > fmax) fmax = c.f_max;
                if (c.activation_error && (!err || *c.activation_error < *err)) err = c.activation_error;
            }
            min_cycles_[l] = min_cycles_[l + 1] + lo;
            max_cycles_[l] = max_cycles_[l + 1] + hi;
            min_coeff_[l] = min_coeff_[l + 1] + k;
            min_res_[l] = min_res_[l + 1] + r;
            max_fmax_[l] = max_fmax_[l + 1] && *max_fmax_[l + 1] < fmax ? max_fmax_[l + 1] : fmax;
            best_error_[l] = best_error_[l + 1];
            error_unknown_[l] = error_unknown_[l + 1];
            if (needs_activation) {
                if (!err) {
                    error_unknown_[l] = true;
                } else if (*err > best_error_[l]) {
                    best_error_[l] = *err;
                }
            }
            subtree_[l] = saturating_mul(subtree_[l + 1], cs.size());
        }
    }

    std::size_t layers() const noexcept { return costs_.size(); }
    const std::vector<LayerCost>& costs(std::size_t layer) const { return costs_[layer]; }
    std::uint64_t subtree(std::size_t depth) const { return subtree_[depth]; }
    std::int64_t ops() const noexcept { return ops_; }

    EvalReport evaluate(const Key& key) const {
        CostTotals totals;
        for (std::size_t l = 0; l < key.choices.size(); ++l) totals.add(costs_[l][key.choices[l]]);
        return assemble_report(totals, ops_, device_, space_.clocks[key.clock], space_.strategies[key.strategy],
                               appspec_);
    }

    EvalReport evaluate_totals(const CostTotals& totals, std::size_t clock, std::size_t strategy) const {
        return assemble_report(totals, ops_, device_, space_.clocks[clock], space_.strategies[strategy], appspec_);
    }

    /// Lower bound over completions of `committed` (layers 0..depth-1 fixed).
    std::optional<Rational> bound(std::size_t clock_index, std::size_t strategy_index, std::size_t depth,
                                  const CostTotals& committed) const {
        const Rational& clock = space_.clocks[clock_index];
        const StrategyKind& strategy = space_.strategies[strategy_index];
        if (clock < device_.f_min || clock > device_.f_max_device) return std::nullopt;
        if (committed.f_max_limit && *committed.f_max_limit < clock) return std::nullopt;
        if (max_fmax_[depth] && *max_fmax_[depth] < clock) return std::nullopt;
        if (!(committed.resources + min_res_[depth]).fits_within(device_.capacities)) return std::nullopt;
        if (appspec_.precision_budget) {
            const Rational& budget = *appspec_.precision_budget;
            if (committed.unknown_activation_error || error_unknown_[depth]) return std::nullopt;
            if (committed.max_activation_error && *committed.max_activation_error > budget) return std::nullopt;
            if (best_error_[depth] > budget) return std::nullopt;
        }
        const Rational c_lo(committed.cycles + min_cycles_[depth]);
        const Rational c_hi(committed.cycles + max_cycles_[depth]);
        const Rational k_lo = committed.dyn_coeff + min_coeff_[depth];

        const Rational cap = cycle_cap(strategy, clock);
        if (c_lo > cap) return std::nullopt;
        const SteadyState at_lo = steady_state(strategy, period_, c_lo, k_lo, clock, device_);
        if (appspec_.latency_deadline && at_lo.response_time > *appspec_.latency_deadline) return std::nullopt;

        switch (appspec_.objective) {
            case Objective::MinLatency:
                return at_lo.response_time;
            case Objective::MaxEnergyEfficiency:
                return inference_energy(device_, c_lo, k_lo, clock);
            case Objective::MinEnergyPerItem:
                break;
        }
        // Per-item energy is non-decreasing in the coefficient sum and piecewise
        // linear in cycles, so its minimum sits at an interval end or a kink.
        const Rational hi = c_hi < cap ? c_hi : cap;
        std::vector<Rational> points{c_lo, hi};
        auto add_kink = [&](const Rational& c) {
            if (c > c_lo && c < hi) points.push_back(c);
        };
        if (strategy.type == StrategyType::ClockAligned) {
            add_kink(device_.f_min * 1000 * period_);
        }
        if (strategy.is_learnable()) {
            add_kink((period_ - device_.t_config) * 1000 * clock);
        }
        std::optional<Rational> best;
        for (const auto& c : points) {
            auto e = steady_state(strategy, period_, c, k_lo, clock, device_).energy_per_item;
            if (e && (!best || *e < *best)) best = std::move(e);
        }
        return best;
    }

    /// Largest cycle count for which the strategy sustains the period.
    Rational cycle_cap(const StrategyKind& strategy, const Rational& clock) const {
        const Rational stay_on = period_ * 1000 * clock;
        const Rational wake = (period_ - device_.t_config) * 1000 * clock;
        switch (strategy.type) {
            case StrategyType::OnOff: return wake;
            case StrategyType::IdleWaiting:
            case StrategyType::ClockAligned: return stay_on;
            case StrategyType::Adaptive:
                if (const auto* pre = std::get_if<PredefinedThreshold>(&strategy.threshold)) {
                    return period_ <= pre->theta ? stay_on : wake;
                }
                return stay_on;
        }
        return stay_on;
    }

    /// Total tie-break order: variant ids per layer, then clock, then strategy.
    bool key_less(const Key& a, const Key& b) const {
        if (a.choices != b.choices) return a.choices < b.choices;
        if (a.clock != b.clock) return a.clock < b.clock;
        const auto ta = static_cast<int>(space_.strategies[a.strategy].type);
        const auto tb = static_cast<int>(space_.strategies[b.strategy].type);
        if (ta != tb) return ta < tb;
        return a.strategy < b.strategy;
    }

private:
    const DesignSpace& space_;
    const FpgaDevice& device_;
    const ApplicationSpec& appspec_;
    std::int64_t ops_;
    Rational period_;
    std::vector<std::vector<LayerCost>> costs_;
    std::vector<std::int64_t> min_cycles_;
    std::vector<std::int64_t> max_cycles_;
    std::vector<Rational> min_coeff_;
    std::vector<Resources> min_res_;
    std::vector<std::optional<Rational>> max_fmax_;
    std::vector<Rational> best_error_;
    std::vector<bool> error_unknown_;
    std::vector<std::uint64_t> subtree_;
};

ParetoPoint point_of(const Record& r) {
    return {*r.report.energy_per_item, r.report.t_inf, r.report.resources.lut, 0};
}

class Accumulator {
public:
    Accumulator(const Engine& engine, Objective objective, std::size_t top_k)
        : engine_(&engine), objective_(objective), top_k_(top_k) {}

    std::uint64_t explored = 0;
    std::uint64_t feasible = 0;
    std::optional<Record> best;
    std::vector<Record> ranked;
    std::vector<Record> pareto;
    std::optional<Record> least;
    std::map<std::string, std::uint64_t> violation_counts;

    void add(const Key& key, EvalReport&& report) {
        ++explored;
        if (!report.feasible) {
            for (const auto& v : report.violations) ++violation_counts[v.constraint];
            consider_least(Record{key, std::move(report), std::nullopt});
            return;
        }
        ++feasible;
        auto objective = objective_value(report, objective_);
        insert(Record{key, std::move(report), std::move(objective)});
    }

    void merge(Accumulator&& other) {
        explored += other.explored;
        feasible += other.feasible;
        for (auto& [name, count] : other.violation_counts) violation_counts[name] += count;
        if (other.least) consider_least(std::move(*other.least));
        if (other.best) consider_best(*other.best);
        for (auto& r : other.ranked) consider_ranked(r);
        for (auto& r : other.pareto) consider_pareto(r);
    }

    bool better(const Record& a, const Record& b) const {
        if (*a.objective != *b.objective) return *a.objective < *b.objective;
        return engine_->key_less(a.key, b.key);
    }

    void sort_pareto() {
        std::sort(pareto.begin(), pareto.end(), [&](const Record& a, const Record& b) {
            const ParetoPoint pa = point_of(a), pb = point_of(b);
            if (pa.energy_per_item != pb.energy_per_item) return pa.energy_per_item < pb.energy_per_item;
            if (pa.t_inf != pb.t_inf) return pa.t_inf < pb.t_inf;
            if (pa.lut != pb.lut) return pa.lut < pb.lut;
            return engine_->key_less(a.key, b.key);
        });
    }

private:
    void insert(Record&& r) {
        consider_best(r);
        consider_ranked(r);
        consider_pareto(r);
    }

    void consider_best(const Record& r) {
        if (!best || better(r, *best)) best = r;
    }

    void consider_ranked(const Record& r) {
        if (top_k_ == 0) return;
        if (ranked.size() == top_k_ && !better(r, ranked.back())) return;
        auto pos = std::upper_bound(ranked.begin(), ranked.end(), r,
                                    [&](const Record& a, const Record& b) { return better(a, b); });
        ranked.insert(pos, r);
        if (ranked.size() > top_k_) ranked.pop_back();
    }

    void consider_pareto(const Record& r) {
        const ParetoPoint p = point_of(r);
        for (const auto& existing : pareto) {
            if (dominates(point_of(existing), p)) return;
        }
        std::erase_if(pareto, [&](const Record& existing) { return dominates(p, point_of(existing)); });
        pareto.push_back(r);
    }

    static std::size_t violation_order_size(const Record& r) { return r.report.violations.size(); }

    void consider_least(Record&& r) {
        if (!least) {
            least = std::move(r);
            return;
        }
        auto total_excess = [](const Record& x) {
            Rational sum = 0;
            for (const auto& v : x.report.violations) sum += v.excess;
            return sum;
        };
        const auto na = violation_order_size(r), nb = violation_order_size(*least);
        bool take = false;
        if (na != nb) {
            take = na < nb;
        } else {
            const Rational ea = total_excess(r), eb = total_excess(*least);
            take = ea != eb ? ea < eb : engine_->key_less(r.key, least->key);
        }
        if (take) least = std::move(r);
    }

    const Engine* engine_;
    Objective objective_;
    std::size_t top_k_;
};

Evaluated materialize(const DesignSpace& space, const Record& r) {
    return {make_candidate(space, r.key.choices, r.key.clock, r.key.strategy), r.report, r.objective};
}

SearchOutcome finish(const DesignSpace& space, const ApplicationSpec& appspec, Accumulator&& acc,
                     std::string algorithm, std::uint64_t size, std::uint64_t pruned) {
    acc.sort_pareto();
    SearchOutcome out;
    out.algorithm = std::move(algorithm);
    out.objective = appspec.objective;
    out.space_size = size;
    out.explored = acc.explored;
    out.pruned = pruned;
    out.feasible_evaluated = acc.feasible;
    out.violation_counts = acc.violation_counts;
    if (acc.best) out.best = materialize(space, *acc.best);
    for (const auto& r : acc.ranked) out.ranked.push_back(materialize(space, r));
    for (const auto& r : acc.pareto) out.pareto.push_back(materialize(space, r));
    if (acc.least) out.least_violating = materialize(space, *acc.least);
    return out;
}

void check_cap(const DesignSpace& space, const SearchOptions& options) {
    if (space.size() > options.cap) {
        throw SpaceTooLarge(space.size(), options.cap);
    }
}

void enumerate_pair(const Engine& engine, std::size_t clock, std::size_t strategy, Accumulator& acc) {
    const std::size_t layers = engine.layers();
    Key key{std::vector<std::size_t>(layers, 0), clock, strategy};
    while (true) {
        acc.add(key, engine.evaluate(key));
        std::size_t l = layers;
        while (l > 0) {
            --l;
            if (++key.choices[l] < engine.costs(l).size()) break;
            key.choices[l] = 0;
            if (l == 0) return;
        }
        if (layers == 0) return;
    }
}

class BranchAndBound {
public:
    BranchAndBound(const Engine& engine, Accumulator& acc) : engine_(engine), acc_(acc) {}

    std::uint64_t pruned = 0;

    void run(std::size_t clocks, std::size_t strategies) {
        struct Root {
            std::optional<Rational> bound;
            std::size_t clock, strategy;
        };
        std::vector<Root> roots;
        for (std::size_t c = 0; c < clocks; ++c) {
            for (std::size_t s = 0; s < strategies; ++s) {
                roots.push_back({engine_.bound(c, s, 0, CostTotals{}), c, s});
            }
        }
        std::stable_sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
            if (a.bound.has_value() != b.bound.has_value()) return a.bound.has_value();
            return a.bound && *a.bound < *b.bound;
        });
        for (const auto& root : roots) {
            if (!root.bound || cannot_improve(*root.bound)) {
                pruned = saturating_add(pruned, engine_.subtree(0));
                continue;
            }
            key_ = Key{std::vector<std::size_t>(engine_.layers(), 0), root.clock, root.strategy};
            descend(0, CostTotals{});
        }
    }

private:
    bool cannot_improve(const Rational& bound) const { return incumbent_ && bound >= *incumbent_; }

    void descend(std::size_t depth, const CostTotals& committed) {
        if (depth == engine_.layers()) {
            EvalReport report = engine_.evaluate_totals(committed, key_.clock, key_.strategy);
            if (report.feasible) {
                auto obj = objective_value(report, objective_);
                if (!incumbent_ || *obj < *incumbent_) incumbent_ = *obj;
            }
            acc_.add(key_, std::move(report));
            return;
        }
        struct Child {
            std::size_t choice;
            CostTotals totals;
            std::optional<Rational> bound;
        };
        std::vector<Child> children;
        const auto& costs = engine_.costs(depth);
        children.reserve(costs.size());
        for (std::size_t c = 0; c < costs.size(); ++c) {
            CostTotals t = committed;
            t.add(costs[c]);
            auto b = engine_.bound(key_.clock, key_.strategy, depth + 1, t);
            children.push_back({c, std::move(t), std::move(b)});
        }
        std::stable_sort(children.begin(), children.end(), [](const Child& a, const Child& b) {
            if (a.bound.has_value() != b.bound.has_value()) return a.bound.has_value();
            return a.bound && *a.bound < *b.bound;
        });
        const std::uint64_t below = engine_.subtree(depth + 1);
        for (const auto& child : children) {
            if (!child.bound || cannot_improve(*child.bound)) {
                pruned = saturating_add(pruned, below);
                continue;
            }
            key_.choices[depth] = child.choice;
            descend(depth + 1, child.totals);
        }
    }

public:
    Objective objective_ = Objective::MinEnergyPerItem;

private:
    const Engine& engine_;
    Accumulator& acc_;
    Key key_;
    std::optional<Rational> incumbent_;
};

std::vector<std::string> split_fields(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) return parts;
        start = pos + 1;
    }
}

std::string candidate_label(const CandidateConfig& config) {
    std::string label;
    for (const auto& a : config.assignment) {
        if (!label.empty()) label += '|';
        label += a.layer.variant_id;
        if (a.activation) label += "+" + a.activation->variant_id;
    }
    return label;
}

}  // namespace

std::uint64_t DesignSpace::assignments() const noexcept {
    std::uint64_t n = 1;
    for (const auto& choices : per_layer) n = saturating_mul(n, choices.size());
    return n;
}

std::uint64_t DesignSpace::size() const noexcept {
    return saturating_mul(saturating_mul(assignments(), clocks.size()), strategies.size());
}

NoFeasibleCandidate::NoFeasibleCandidate(SearchOutcome outcome)
    : Error([&] {
          std::string msg = "no feasible candidate";
          if (outcome.least_violating) {
              msg += "; least-violating candidate breaks:";
              for (const auto& v : outcome.least_violating->report.violations) msg += " " + v.constraint;
          }
          return msg;
      }()),
      outcome_(std::move(outcome)) {}

DesignSpace enumerate_space(const Catalog& catalog, const NetworkModel& model, const FpgaDevice& device,
                            const SpaceOptions& options) {
    DesignSpace space;
    std::vector<std::optional<std::size_t>> pooled(catalog.profiles.size());
    auto pool = [&](std::size_t catalog_index) {
        if (!pooled[catalog_index]) {
            pooled[catalog_index] = space.profiles.size();
            space.profiles.push_back(catalog.profiles[catalog_index]);
        }
        return *pooled[catalog_index];
    };

    std::optional<Rational> clock_cap;
    for (const auto& layer : model.layers) {
        std::vector<std::size_t> layer_profiles;
        std::vector<std::size_t> activation_profiles;
        for (std::size_t i = 0; i < catalog.profiles.size(); ++i) {
            const auto& p = catalog.profiles[i];
            if (p.kind == layer.kind) layer_profiles.push_back(i);
            if (layer.activation && p.kind == TemplateKind::Activation && p.activation_fn == layer.activation) {
                activation_profiles.push_back(i);
            }
        }
        if (layer_profiles.empty()) {
            throw UncoveredLayerKind(std::string(to_string(layer.kind)));
        }
        if (layer.activation && activation_profiles.empty()) {
            throw UncoveredLayerKind("Activation/" + std::string(to_string(*layer.activation)));
        }
        auto by_id = [&](std::size_t a, std::size_t b) {
            return catalog.profiles[a].variant_id < catalog.profiles[b].variant_id;
        };
        std::sort(layer_profiles.begin(), layer_profiles.end(), by_id);
        std::sort(activation_profiles.begin(), activation_profiles.end(), by_id);

        std::vector<LayerChoice> choices;
        Rational layer_best_fmax = 0;
        for (std::size_t lp : layer_profiles) {
            if (!layer.activation) {
                choices.push_back({pool(lp), std::nullopt});
                layer_best_fmax = std::max(layer_best_fmax, catalog.profiles[lp].f_max);
                continue;
            }
            for (std::size_t ap : activation_profiles) {
                choices.push_back({pool(lp), pool(ap)});
                layer_best_fmax =
                    std::max(layer_best_fmax, std::min(catalog.profiles[lp].f_max, catalog.profiles[ap].f_max));
            }
        }
        if (!clock_cap || layer_best_fmax < *clock_cap) clock_cap = layer_best_fmax;
        space.per_layer.push_back(std::move(choices));
    }

    if (options.clocks) {
        space.clocks = *options.clocks;
        std::sort(space.clocks.begin(), space.clocks.end());
        space.clocks.erase(std::unique(space.clocks.begin(), space.clocks.end()), space.clocks.end());
    } else {
        if (options.clock_step <= 0) {
            throw ValidationError("clock step must be > 0");
        }
        Rational cap = device.f_max_device;
        if (clock_cap && *clock_cap < cap) cap = *clock_cap;
        for (Rational f = device.f_min; f <= cap; f += options.clock_step) space.clocks.push_back(f);
        if (space.clocks.empty()) {
            throw InfeasibleFrequency("no clock between f_min " + to_exact_string(device.f_min) +
                                      " MHz and the template limit " + to_exact_string(cap) + " MHz");
        }
    }
    if (options.strategies) {
        space.strategies = *options.strategies;
    } else {
        space.strategies = {StrategyKind::on_off(), StrategyKind::idle_waiting(), StrategyKind::clock_aligned(),
                            default_adaptive()};
    }
    for (const auto& s : space.strategies) validate(s);
    return space;
}

CandidateConfig make_candidate(const DesignSpace& space, const std::vector<std::size_t>& choices,
                               std::size_t clock_index, std::size_t strategy_index) {
    CandidateConfig config;
    for (std::size_t l = 0; l < choices.size(); ++l) {
        const LayerChoice& c = space.per_layer[l][choices[l]];
        LayerAssignment a{space.profiles[c.layer_profile], std::nullopt};
        if (c.activation_profile) a.activation = space.profiles[*c.activation_profile];
        config.assignment.push_back(std::move(a));
    }
    config.clock_mhz = space.clocks[clock_index];
    config.strategy = space.strategies[strategy_index];
    return config;
}

CandidateConfig candidate_from_assignment(const Catalog& catalog, const NetworkModel& model,
                                          const FpgaDevice& device, std::string_view assign_text,
                                          const std::optional<Rational>& clock, const StrategyKind& strategy) {
    const std::string assign(assign_text);
    const DesignSpace space = enumerate_space(catalog, model, device, SpaceOptions{});
    std::vector<std::size_t> first(model.layers.size(), 0);
    CandidateConfig config = make_candidate(space, first, 0, 0);
    if (!assign.empty()) {
        const auto entries = split_fields(assign, ',');
        if (entries.size() > model.layers.size()) {
            throw ValidationError("assignment lists " + std::to_string(entries.size()) + " layers, model has " +
                                  std::to_string(model.layers.size()));
        }
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto plus = entries[i].find('+');
            const std::string layer_id = entries[i].substr(0, plus);
            const TemplateProfile* lp = catalog.find(model.layers[i].kind, layer_id);
            if (!lp) {
                throw ValidationError("layer " + std::to_string(i) + ": no " +
                                      std::string(to_string(model.layers[i].kind)) + " variant '" + layer_id + "'");
            }
            LayerAssignment a{*lp, std::nullopt};
            if (plus != std::string::npos) {
                const std::string act_id = entries[i].substr(plus + 1);
                const TemplateProfile* ap = catalog.find(TemplateKind::Activation, act_id);
                if (!ap) {
                    throw ValidationError("layer " + std::to_string(i) + ": no Activation variant '" + act_id + "'");
                }
                a.activation = *ap;
            }
            config.assignment[i] = std::move(a);
        }
    }
    if (clock) {
        config.clock_mhz = *clock;
    } else {
        Rational f = device.f_max_device;
        for (const auto& a : config.assignment) {
            f = std::min(f, a.layer.f_max);
            if (a.activation) f = std::min(f, a.activation->f_max);
        }
        config.clock_mhz = f;
    }
    config.strategy = strategy;
    return config;
}

SearchOutcome search_exhaustive(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device,
                                const ApplicationSpec& appspec, const SearchOptions& options) {
    check_cap(space, options);
    const Engine engine(space, model, device, appspec);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t c = 0; c < space.clocks.size(); ++c) {
        for (std::size_t s = 0; s < space.strategies.size(); ++s) pairs.emplace_back(c, s);
    }
    const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(pairs.size())));
    std::vector<Accumulator> partial(jobs, Accumulator(engine, appspec.objective, options.top_k));
    auto work = [&](unsigned t) {
        for (std::size_t i = t; i < pairs.size(); i += jobs) {
            enumerate_pair(engine, pairs[i].first, pairs[i].second, partial[t]);
        }
    };
    if (jobs == 1) {
        work(0);
    } else {
        std::vector<std::jthread> threads;
        for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(work, t);
    }
    Accumulator acc(engine, appspec.objective, options.top_k);
    for (auto& p : partial) acc.merge(std::move(p));

    SearchOutcome out = finish(space, appspec, std::move(acc), "exhaustive", space.size(), 0);
    if (!out.best) throw NoFeasibleCandidate(std::move(out));
    return out;
}

SearchOutcome search_branch_and_bound(const DesignSpace& space, const NetworkModel& model, const FpgaDevice& device,
                                      const ApplicationSpec& appspec, const SearchOptions& options) {
    check_cap(space, options);
    const Engine engine(space, model, device, appspec);
    Accumulator acc(engine, appspec.objective, options.top_k);
    BranchAndBound bnb(engine, acc);
    bnb.objective_ = appspec.objective;
    bnb.run(space.clocks.size(), space.strategies.size());
    const std::uint64_t pruned = bnb.pruned;

    SearchOutcome out = finish(space, appspec, std::move(acc), "branch-and-bound", space.size(), pruned);
    if (!out.best) {
        // Pruning discards infeasible subtrees unseen; diagnostics come from a full pass.
        try {
            search_exhaustive(space, model, device, appspec, options);
        } catch (const NoFeasibleCandidate& e) {
            out.least_violating = e.outcome().least_violating;
            out.violation_counts = e.outcome().violation_counts;
        }
        throw NoFeasibleCandidate(std::move(out));
    }
    return out;
}

std::optional<Rational> partial_lower_bound(const DesignSpace& space, const NetworkModel& model,
                                            const FpgaDevice& device, const ApplicationSpec& appspec,
                                            std::size_t clock_index, std::size_t strategy_index,
                                            const std::vector<std::size_t>& fixed) {
    const Engine engine(space, model, device, appspec);
    CostTotals committed;
    for (std::size_t l = 0; l < fixed.size(); ++l) committed.add(engine.costs(l)[fixed[l]]);
    return engine.bound(clock_index, strategy_index, fixed.size(), committed);
}

bool dominates(const ParetoPoint& a, const ParetoPoint& b) {
    const bool no_worse = a.energy_per_item <= b.energy_per_item && a.t_inf <= b.t_inf && a.lut <= b.lut;
    const bool better = a.energy_per_item < b.energy_per_item || a.t_inf < b.t_inf || a.lut < b.lut;
    return no_worse && better;
}

std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points) {
    std::sort(points.begin(), points.end(), [](const ParetoPoint& a, const ParetoPoint& b) {
        if (a.energy_per_item != b.energy_per_item) return a.energy_per_item < b.energy_per_item;
        if (a.t_inf != b.t_inf) return a.t_inf < b.t_inf;
        if (a.lut != b.lut) return a.lut < b.lut;
        return a.id < b.id;
    });
    // After sorting, only an earlier point can dominate a later one.
    std::vector<ParetoPoint> frontier;
    for (auto& p : points) {
        bool dominated = std::any_of(frontier.begin(), frontier.end(),
                                     [&](const ParetoPoint& f) { return dominates(f, p); });
        if (!dominated) frontier.push_back(std::move(p));
    }
    return frontier;
}

json to_json(const Evaluated& e) {
    return {{"candidate", to_json(e.config)},
            {"report", to_json(e.report)},
            {"objective", detail::approx(e.objective)},
            {"objective_exact", detail::exact(e.objective)}};
}

json to_json(const SearchOutcome& o) {
    json ranked = json::array();
    for (const auto& e : o.ranked) ranked.push_back(to_json(e));
    json pareto = json::array();
    for (const auto& e : o.pareto) {
        pareto.push_back({{"energy_per_item_mj", detail::approx(e.report.energy_per_item)},
                          {"t_inf_ms", detail::approx(e.report.t_inf)},
                          {"lut", e.report.resources.lut},
                          {"candidate", to_json(e.config)}});
    }
    json binding = json::array();
    if (o.least_violating) {
        for (const auto& v : o.least_violating->report.violations) binding.push_back(v.constraint);
    }
    json j;
    j["algorithm"] = o.algorithm;
    j["objective"] = std::string(to_string(o.objective));
    j["space_size"] = o.space_size;
    j["explored"] = o.explored;
    j["pruned"] = o.pruned;
    j["feasible_evaluated"] = o.feasible_evaluated;
    j["best"] = o.best ? to_json(*o.best) : json(nullptr);
    j["ranked"] = std::move(ranked);
    j["pareto"] = std::move(pareto);
    j["least_violating"] = o.least_violating ? to_json(*o.least_violating) : json(nullptr);
    j["violation_counts"] = o.violation_counts;
    j["binding_constraints"] = std::move(binding);
    return j;
}

std::string ranked_csv(const SearchOutcome& o) {
    std::string out = "rank,objective,candidate," + eval_csv_header() + "\n";
    for (std::size_t i = 0; i < o.ranked.size(); ++i) {
        const auto& e = o.ranked[i];
        out += std::to_string(i + 1) + "," + detail::csv_number(e.objective) + ",\"" + candidate_label(e.config) +
               "\"," + eval_csv_row(e.report) + "\n";
    }
    return out;
}

std::string pareto_csv(const SearchOutcome& o) {
    std::string out = "energy_per_item_mj,t_inf_ms,lut,candidate,clock_mhz,strategy\n";
    for (const auto& e : o.pareto) {
        out += detail::csv_number(e.report.energy_per_item) + "," + detail::csv_number(e.report.t_inf) + "," +
               std::to_string(e.report.resources.lut) + ",\"" + candidate_label(e.config) + "\"," +
               detail::csv_number(e.config.clock_mhz) + ",\"" + to_string(e.config.strategy) + "\"\n";
    }
    return out;
}

}  // namespace fpgadse

#pragma once

#include "fpgadse/catalog.hpp"
#include "fpgadse/rational.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fpgadse {

struct Layer {
    TemplateKind kind = TemplateKind::FullyConnected;  // never Activation
    std::optional<ActivationFn> activation;
    std::int64_t work_units = 1;
    std::int64_t op_count = 2;  // 2 x MACs
    std::map<std::string, std::int64_t> dims;

    /// Work handed to the attached activation template: dims["activations"]
    /// when given, otherwise dims["outputs"] * dims["timesteps"] (each defaulting to 1).
    std::int64_t activation_units() const;

    friend bool operator==(const Layer&, const Layer&) = default;
};

struct NetworkModel {
    std::string name;
    std::vector<Layer> layers;

    friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// Sum of op_count over all layers.
std::int64_t ops_count(const NetworkModel& model);

/// Units: power in mW, time in ms, frequency in MHz. mW x ms = uJ.
struct FpgaDevice {
    std::string name;
    Resources capacities;
    Rational p_static;
    Rational c_idle_dyn;
    Rational f_min;
    Rational f_max_device;
    Rational t_config;
    Rational p_config;

    /// p_config x t_config in mJ.
    Rational config_energy() const { return p_config * t_config / 1000; }

    friend bool operator==(const FpgaDevice&, const FpgaDevice&) = default;
};

struct RegularWorkload {
    Rational period;  // ms
    friend bool operator==(const RegularWorkload&, const RegularWorkload&) = default;
};

struct TraceWorkload {
    std::vector<Rational> gaps;  // ms
    friend bool operator==(const TraceWorkload&, const TraceWorkload&) = default;
};

enum class GapDistribution { Exponential, BimodalUniform };

/// Exponential: params {mean}. BimodalUniform: params {p_short, short_min,
/// short_max, long_min, long_max}; a gap is drawn from the short range with
/// probability p_short and from the long range otherwise.
struct StochasticWorkload {
    GapDistribution distribution = GapDistribution::Exponential;
    std::map<std::string, Rational> params;
    std::uint64_t seed = 0;
    friend bool operator==(const StochasticWorkload&, const StochasticWorkload&) = default;
};

using Workload = std::variant<RegularWorkload, TraceWorkload, StochasticWorkload>;

/// Period used by the steady-state formulas: the period, the trace mean, or
/// the distribution mean.
Rational nominal_period(const Workload& workload);

enum class Objective { MaxEnergyEfficiency, MinEnergyPerItem, MinLatency };

std::string_view to_string(Objective objective) noexcept;
std::string_view to_string(GapDistribution distribution) noexcept;

struct ApplicationSpec {
    Workload workload = RegularWorkload{Rational(40)};
    std::optional<Rational> latency_deadline;  // ms
    std::optional<Rational> energy_budget;     // mJ
    std::optional<Rational> precision_budget;  // max abs error
    Objective objective = Objective::MinEnergyPerItem;
    std::optional<std::int64_t> requests;      // simulated request count

    friend bool operator==(const ApplicationSpec&, const ApplicationSpec&) = default;
};

void validate(const NetworkModel& model);
void validate(const FpgaDevice& device);
void validate(const ApplicationSpec& spec);

NetworkModel parse_model(const nlohmann::json& doc);
FpgaDevice parse_device(const nlohmann::json& doc);
/// Relative trace file paths resolve against `base_dir`.
ApplicationSpec parse_appspec(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

NetworkModel load_model(const std::filesystem::path& path);
FpgaDevice load_device(const std::filesystem::path& path);
ApplicationSpec load_appspec(const std::filesystem::path& path);

/// One gap in ms per line; blank lines and '#' comments are skipped.
/// Throws EmptyTrace, NonPositiveGap (with 1-based line number) or ParseError.
std::vector<Rational> parse_trace_text(std::string_view text);
std::vector<Rational> load_trace(const std::filesystem::path& path);

/// "regular:40ms", "trace:PATH", "exp:MEAN,SEED" or
/// "bimodal:P_SHORT,SHORT_MIN,SHORT_MAX,LONG_MIN,LONG_MAX,SEED". Throws
/// ParseError on malformed text; trace loading errors propagate.
Workload parse_workload_spec(std::string_view spec);

nlohmann::json to_json(const NetworkModel& model);
nlohmann::json to_json(const FpgaDevice& device);
nlohmann::json to_json(const ApplicationSpec& spec);

}  // namespace fpgadse

#include "fpgadse/activation.hpp"
#include "fpgadse/catalog.hpp"
#include "fpgadse/errors.hpp"
#include "fpgadse/estimator.hpp"
#include "fpgadse/generator.hpp"
#include "fpgadse/model.hpp"
#include "fpgadse/strategy.hpp"
#include "fpgadse/workload.hpp"

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fpgadse;
using nlohmann::json;

namespace {

std::optional<Rational> opt_rational(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    return parse_rational(*text);
}

struct Scenario {
    Catalog catalog;
    NetworkModel model;
    FpgaDevice device;
    ApplicationSpec appspec;
};

Scenario load(const std::string& catalog, const std::string& model, const std::string& device,
              const std::optional<std::string>& appspec) {
    return {load_catalog(catalog), load_model(model), load_device(device),
            appspec ? load_appspec(*appspec) : ApplicationSpec{}};
}

std::string estimate_json(const std::string& catalog, const std::string& model, const std::string& device,
                          const std::optional<std::string>& appspec, const std::string& assign,
                          const std::optional<std::string>& clock, const std::string& strategy) {
    const Scenario s = load(catalog, model, device, appspec);
    const CandidateConfig config = candidate_from_assignment(s.catalog, s.model, s.device, assign,
                                                             opt_rational(clock), parse_strategy(strategy));
    const EvalReport report = estimate(s.model, s.device, config, s.appspec);
    json doc{{"candidate", to_json(config)}, {"report", to_json(report)}};
    return doc.dump();
}

std::string simulate_json(const std::string& catalog, const std::string& model, const std::string& device,
                          const std::string& workload, std::int64_t requests, const std::string& assign,
                          const std::optional<std::string>& clock, const std::string& strategy,
                          const std::optional<std::string>& deadline) {
    const Scenario s = load(catalog, model, device, std::nullopt);
    const CandidateConfig config = candidate_from_assignment(s.catalog, s.model, s.device, assign,
                                                             opt_rational(clock), parse_strategy(strategy));
    const auto gaps = generate_gaps(parse_workload_spec(workload), requests);
    return to_json(simulate(s.model, s.device, config, gaps, opt_rational(deadline))).dump();
}

std::string explore_json(const std::string& catalog, const std::string& model, const std::string& device,
                         const std::string& appspec, const std::string& algo, std::size_t top,
                         const std::optional<std::vector<std::string>>& clocks,
                         const std::optional<std::vector<std::string>>& strategies, unsigned jobs,
                         std::uint64_t cap) {
    const Scenario s = load(catalog, model, device, appspec);
    SpaceOptions opts;
    if (clocks) {
        std::vector<Rational> list;
        for (const auto& c : *clocks) list.push_back(parse_rational(c));
        opts.clocks = std::move(list);
    }
    if (strategies) {
        std::vector<StrategyKind> list;
        for (const auto& t : *strategies) list.push_back(parse_strategy(t));
        opts.strategies = std::move(list);
    }
    const DesignSpace space = enumerate_space(s.catalog, s.model, s.device, opts);
    const SearchOptions search{cap, top, jobs};
    if (algo == "bnb") return to_json(search_branch_and_bound(space, s.model, s.device, s.appspec, search)).dump();
    if (algo == "exhaustive") return to_json(search_exhaustive(space, s.model, s.device, s.appspec, search)).dump();
    throw ValidationError("algo must be 'exhaustive' or 'bnb'");
}

py::dict sweep(const std::string& catalog, const std::string& variant, const std::string& reference) {
    const Catalog c = load_catalog(catalog);
    const TemplateProfile* p = c.find(TemplateKind::Activation, variant);
    if (!p) throw ValidationError("no activation variant '" + variant + "'");
    const ErrorStats stats = precision_error_sweep(
        *p, reference == "real" ? ErrorReference::RealValued : ErrorReference::FixedPointDefinition);
    py::dict out;
    out["max_abs_error"] = to_exact_string(stats.max_abs_error);
    out["mean_abs_error"] = to_exact_string(stats.mean_abs_error);
    out["inputs"] = stats.inputs;
    return out;
}

std::vector<std::size_t> pareto_ids(const std::vector<std::tuple<std::string, std::string, std::int64_t>>& points) {
    std::vector<ParetoPoint> pts;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [e, t, lut] = points[i];
        pts.push_back({parse_rational(e), parse_rational(t), lut, i});
    }
    std::vector<std::size_t> ids;
    for (const auto& p : pareto_frontier(std::move(pts))) ids.push_back(p.id);
    return ids;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FPGA accelerator design-space exploration core";

    auto& base = py::register_exception<Error>(m, "FpgadseError");
    py::register_exception<NoFeasibleCandidate>(m, "NoFeasibleCandidate", base.ptr());
    py::register_exception<SpaceTooLarge>(m, "SpaceTooLarge", base.ptr());

    m.attr("__version__") = "0.1.0";

    m.def("load_catalog", [](const std::string& path) { return to_json(load_catalog(path)).dump(); },
          py::arg("path"));
    m.def("estimate", &estimate_json, py::arg("catalog"), py::arg("model"), py::arg("device"),
          py::arg("appspec") = std::nullopt, py::arg("assign") = "", py::arg("clock") = std::nullopt,
          py::arg("strategy") = "idle");
    m.def("simulate", &simulate_json, py::arg("catalog"), py::arg("model"), py::arg("device"), py::arg("workload"),
          py::arg("requests") = 100, py::arg("assign") = "", py::arg("clock") = std::nullopt,
          py::arg("strategy") = "idle", py::arg("deadline") = std::nullopt);
    m.def("explore", &explore_json, py::arg("catalog"), py::arg("model"), py::arg("device"), py::arg("appspec"),
          py::arg("algo") = "exhaustive", py::arg("top") = 5, py::arg("clocks") = std::nullopt,
          py::arg("strategies") = std::nullopt, py::arg("jobs") = 1, py::arg("cap") = 1'000'000);
    m.def("precision_sweep", &sweep, py::arg("catalog"), py::arg("variant"), py::arg("reference") = "fixed");
    m.def("efficiency_ratio",
          [](const std::string& a, const std::string& b) {
              return to_exact_string(efficiency_ratio(parse_rational(a), parse_rational(b)));
          },
          py::arg("a"), py::arg("b"));
    m.def("latency_reduction_pct",
          [](const std::string& before, const std::string& after) {
              return to_exact_string(latency_reduction_pct(parse_rational(before), parse_rational(after)));
          },
          py::arg("before"), py::arg("after"));
    m.def("reference_activation",
          [](const std::string& fn, double x) { return reference_activation(parse_activation_fn(fn), x); },
          py::arg("fn"), py::arg("x"));
    m.def("pareto_frontier", &pareto_ids, py::arg("points"),
          "Indices of the non-dominated (energy, t_inf, lut) points, by ascending energy.");
}

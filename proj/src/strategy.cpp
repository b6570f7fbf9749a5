#include "fpgadse/strategy.hpp"

#include "fpgadse/errors.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace fpgadse {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.emplace_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

Rational parse_ms(const std::string& text) {
    std::string t = text;
    if (t.size() > 2 && t.ends_with("ms")) t.resize(t.size() - 2);
    return parse_rational(t);
}

}  // namespace

StrategyKind default_adaptive() {
    return StrategyKind::adaptive_learnable(Rational(10), Rational(1, 10));
}

void validate(const StrategyKind& s) {
    if (s.type != StrategyType::Adaptive) return;
    if (const auto* p = std::get_if<PredefinedThreshold>(&s.threshold)) {
        if (p->theta <= 0) throw ValidationError("strategy: theta must be > 0");
    } else {
        const auto& l = std::get<LearnableThreshold>(s.threshold);
        if (l.theta0 <= 0) throw ValidationError("strategy: theta0 must be > 0");
        if (l.eta <= 0 || l.eta > 1) throw ValidationError("strategy: eta must be in (0, 1]");
    }
}

std::string_view to_string(StrategyType type) noexcept {
    switch (type) {
        case StrategyType::OnOff: return "OnOff";
        case StrategyType::IdleWaiting: return "IdleWaiting";
        case StrategyType::ClockAligned: return "ClockAligned";
        case StrategyType::Adaptive: return "Adaptive";
    }
    return "?";
}

std::string to_string(const StrategyKind& s) {
    if (s.type != StrategyType::Adaptive) return std::string(to_string(s.type));
    if (const auto* p = std::get_if<PredefinedThreshold>(&s.threshold)) {
        return "Adaptive(Predefined,theta=" + to_exact_string(p->theta) + ")";
    }
    const auto& l = std::get<LearnableThreshold>(s.threshold);
    return "Adaptive(Learnable,theta0=" + to_exact_string(l.theta0) + ",eta=" + to_exact_string(l.eta) + ")";
}

StrategyKind parse_strategy(std::string_view text) {
    const auto parts = split(text, ':');
    const std::string head = lower(parts[0]);
    StrategyKind s;
    try {
        if (parts.size() == 1 && (head == "onoff" || head == "on-off")) {
            s = StrategyKind::on_off();
        } else if (parts.size() == 1 && (head == "idle" || head == "idlewaiting" || head == "idle-waiting")) {
            s = StrategyKind::idle_waiting();
        } else if (parts.size() == 1 && (head == "clock" || head == "clockaligned" || head == "clock-aligned")) {
            s = StrategyKind::clock_aligned();
        } else if (head == "adaptive" && parts.size() == 1) {
            s = default_adaptive();
        } else if (head == "adaptive" && parts.size() == 3 && lower(parts[1]).starts_with("pre")) {
            s = StrategyKind::adaptive_predefined(parse_ms(parts[2]));
        } else if (head == "adaptive" && (parts.size() == 3 || parts.size() == 4) && lower(parts[1]).starts_with("learn")) {
            Rational eta = parts.size() == 4 ? parse_rational(parts[3]) : Rational(1, 10);
            s = StrategyKind::adaptive_learnable(parse_ms(parts[2]), eta);
        } else {
            throw ParseError("unknown strategy '" + std::string(text) + "'");
        }
    } catch (const ParseError& e) {
        throw ParseError(std::string("strategy: ") + e.what());
    }
    validate(s);
    return s;
}

nlohmann::json to_json(const StrategyKind& s) {
    nlohmann::json j{{"kind", std::string(to_string(s.type))}};
    if (s.type == StrategyType::Adaptive) {
        if (const auto* p = std::get_if<PredefinedThreshold>(&s.threshold)) {
            j["mode"] = "Predefined";
            j["theta"] = detail::rational_to_json(p->theta);
        } else {
            const auto& l = std::get<LearnableThreshold>(s.threshold);
            j["mode"] = "Learnable";
            j["theta0"] = detail::rational_to_json(l.theta0);
            j["eta"] = detail::rational_to_json(l.eta);
        }
    }
    return j;
}

}  // namespace fpgadse

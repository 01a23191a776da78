#pragma once

#include <cmath>
#include <string>

#include <json.hpp>

#include "hardy/errors.hpp"
#include "hardy/extrapolation.hpp"
#include "hardy/inequality_verifier.hpp"
#include "hardy/lemma_oracles.hpp"
#include "hardy/numeric.hpp"
#include "hardy/weight_classes.hpp"

namespace hardy {

using json = nlohmann::json;

/// Non-finite values become null; JSON has no infinities.
inline json real(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void to_json(json& j, const Interval& i) { j = json{{"lo", real(i.lo)}, {"hi", real(i.hi)}}; }

inline void to_json(json& j, const ConstantEstimate& e) {
    j = json{{"bracket", e.bracket},
             {"verdict", std::string(to_string(e.verdict))},
             {"witness_n", e.witness_n},
             {"scanned_up_to", e.scanned_up_to},
             {"basis", e.basis}};
    if (e.limit) {
        j["limit"] = real(*e.limit);
    }
}

/// {class, beta, p, bracket, verdict, witness_n, scanned_up_to, ...}.
inline json class_report(const std::string& cls, double beta, double p, const ConstantEstimate& e) {
    json j = e;
    j["class"] = cls;
    j["beta"] = beta;
    j["p"] = p;
    return j;
}

inline void to_json(json& j, const DoublingReport& r) {
    j = json{{"holds", r.holds}, {"constant", real(r.constant)}};
    j["first_failure"] = r.first_failure ? json(*r.first_failure) : json(nullptr);
}

inline void to_json(json& j, const RatioReport& r) {
    j = json{{"lhs", real(r.lhs)},
             {"rhs", real(r.rhs)},
             {"ratio", real(r.ratio)},
             {"horizon", r.horizon},
             {"unbounded", r.unbounded}};
    j["lhs_tail"] = r.lhs_tail ? json(*r.lhs_tail) : json(nullptr);
    j["rhs_tail"] = r.rhs_tail ? json(*r.rhs_tail) : json(nullptr);
    if (!r.trace.empty()) {
        json trace = json::array();
        for (double x : r.trace) {
            trace.push_back(real(x));
        }
        j["per_n_trace"] = std::move(trace);
    }
}

inline void to_json(json& j, const UpperBound& u) {
    j = json{{"raw", real(u.raw)},
             {"absorbed", real(u.absorbed)},
             {"doubling_factor", real(u.doubling_factor)},
             {"regime", std::string(to_string(u.regime))}};
}

inline void to_json(json& j, const EpsilonResult& r) {
    j = json{{"eps_formula", real(r.eps_formula)},
             {"eps_verified", real(r.eps_verified)},
             {"original", r.original},
             {"new_class_constant", r.new_class_constant}};
}

inline void to_json(json& j, const TildePhi& t) {
    j = json{{"inf_value", real(t.inf_value)},
             {"argmin_eps", t.argmin_eps},
             {"outer_factor", real(t.outer_factor)},
             {"chosen_eps", t.chosen_eps},
             {"chosen_constant", real(t.chosen_constant)},
             {"value", real(t.value)}};
    if (t.condition) {
        j["condition"] = *t.condition;
    }
}

inline void to_json(json& j, const PanelEntry& e) {
    j = json{{"weight", e.label},
             {"weight_constant", e.weight_constant},
             {"lhs", real(e.lhs)},
             {"rhs", real(e.rhs)},
             {"ratio", real(e.ratio)},
             {"bound", real(e.bound)},
             {"margin", real(e.margin)},
             {"holds", e.holds}};
    if (e.tilde) {
        j["tilde_phi"] = *e.tilde;
    }
}

inline void to_json(json& j, const ExtrapolationReport& r) {
    j = json{{"p0", r.p0},
             {"p", r.p},
             {"beta", r.beta},
             {"hypothesis", r.hypothesis},
             {"conclusion", r.conclusion},
             {"all_hold", r.all_hold}};
}

inline void to_json(json& j, const SandwichResult& s) {
    j = json{{"lower", real(s.lower)}, {"middle", real(s.middle)}, {"upper", real(s.upper)}, {"holds", s.holds}};
    if (s.middle_bracket) {
        j["middle_bracket"] = *s.middle_bracket;
    }
}

inline void to_json(json& j, const OracleSuiteReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"check", c.check}, {"cases", c.cases}, {"failures", c.failures}});
    }
    json failures = json::array();
    for (const auto& f : r.failures) {
        failures.push_back({{"check", f.check}, {"detail", f.detail}});
    }
    j = json{{"seed", r.seed}, {"passed", r.passed()}, {"checks", checks}, {"failures", failures}};
}

inline json error_object(const Error& e) {
    json j{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
    j["index"] = e.index() ? json(*e.index()) : json(nullptr);
    return j;
}

} // namespace hardy

#pragma once

#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardy/hardy.hpp"
#include "hardy/serialize.hpp"

namespace hardy::cli {

enum class Command { CheckWeight, VerifyHardy, Epsilon, Extrapolate, OracleSuite };
enum class Format { Json, Csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInconclusive = 3;

inline constexpr Index kDefaultHorizon = 100000;
inline constexpr Index kMinHorizon = 10;

inline const char* command_name(Command c) {
    switch (c) {
    case Command::CheckWeight: return "check-weight";
    case Command::VerifyHardy: return "verify-hardy";
    case Command::Epsilon: return "epsilon";
    case Command::Extrapolate: return "extrapolate";
    case Command::OracleSuite: return "oracle-suite";
    }
    return "?";
}

/// Bad command line; `flag` names the offending option when there is one.
class UsageError : public std::runtime_error {
public:
    UsageError(std::string flag, const std::string& what) : std::runtime_error(what), flag_(std::move(flag)) {}
    [[nodiscard]] const std::string& flag() const noexcept { return flag_; }

private:
    std::string flag_;
};

/// Parameters are kept as the strings given on the command line (keyed by flag name
/// without dashes) so a config can be written back out verbatim. Repeated `--weight`
/// values are joined with ';'.
struct RunConfig {
    Command command = Command::CheckWeight;
    std::map<std::string, std::string> parameters;
    Format output_format = Format::Json;
    Index horizon = kDefaultHorizon;
    std::optional<std::int64_t> seed;

    bool operator==(const RunConfig&) const = default;

    [[nodiscard]] bool has(const std::string& key) const { return parameters.count(key) != 0; }
    [[nodiscard]] double real(const std::string& key) const { return parse_real(parameters.at(key)); }
    [[nodiscard]] std::vector<std::string> weights() const {
        std::vector<std::string> out;
        if (!has("weight")) {
            return out;
        }
        std::string_view rest = parameters.at("weight");
        while (true) {
            const auto semi = rest.find(';');
            out.emplace_back(rest.substr(0, semi));
            if (semi == std::string_view::npos) {
                break;
            }
            rest = rest.substr(semi + 1);
        }
        return out;
    }
};

/// Horizon used when --n-max is absent: HW_DEFAULT_NMAX if set, else 10^5.
inline Index default_horizon() {
    if (const char* env = std::getenv("HW_DEFAULT_NMAX"); env != nullptr && *env != '\0') {
        Index n = 0;
        const std::string_view text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
        if (ec != std::errc{} || ptr != text.data() + text.size() || n < kMinHorizon) {
            throw UsageError("HW_DEFAULT_NMAX", "HW_DEFAULT_NMAX must be an integer >= 10");
        }
        return n;
    }
    return kDefaultHorizon;
}

namespace detail {

struct CommandSpec {
    Command command;
    std::vector<std::string> required;
    std::vector<std::string> optional;
    std::map<std::string, std::string> defaults;
};

inline const std::vector<CommandSpec>& command_specs() {
    static const std::vector<CommandSpec> specs{
        {Command::CheckWeight, {"weight", "p"}, {"beta", "psi"}, {{"beta", "0"}}},
        {Command::VerifyHardy, {"weight", "p"}, {"beta", "psi"}, {{"beta", "0"}, {"psi", "power:alpha=0"}}},
        {Command::Epsilon, {"weight", "p"}, {"beta"}, {{"beta", "0"}}},
        {Command::Extrapolate,
         {"weight", "p"},
         {"beta", "p0", "phi", "eps-grid", "cases"},
         {{"beta", "0"}, {"p0", "2"}, {"phi", "id"}, {"cases", "100"}}},
        {Command::OracleSuite, {}, {"cases"}, {{"cases", "1000"}}},
    };
    return specs;
}

inline const CommandSpec& spec_for(Command c) {
    for (const auto& s : command_specs()) {
        if (s.command == c) {
            return s;
        }
    }
    throw std::logic_error("unknown command");
}

inline double checked_real(const RunConfig& cfg, const std::string& key) {
    try {
        return cfg.real(key);
    } catch (const Error&) {
        throw UsageError("--" + key, "--" + key + ": not a number: '" + cfg.parameters.at(key) + "'");
    }
}

inline void validate(RunConfig& cfg) {
    const CommandSpec& spec = spec_for(cfg.command);
    for (const auto& [key, value] : cfg.parameters) {
        bool allowed = false;
        for (const auto& k : spec.required) {
            allowed = allowed || k == key;
        }
        for (const auto& k : spec.optional) {
            allowed = allowed || k == key;
        }
        if (!allowed) {
            throw UsageError("--" + key, std::string("--") + key + " is not accepted by " + command_name(cfg.command));
        }
    }
    for (const auto& [key, value] : spec.defaults) {
        cfg.parameters.emplace(key, value);
    }
    if (cfg.has("p") && !(checked_real(cfg, "p") > 0.0)) {
        throw UsageError("--p", "--p must be positive");
    }
    if (cfg.has("beta") && !(checked_real(cfg, "beta") >= 0.0)) {
        throw UsageError("--beta", "--beta must be non-negative");
    }
    if (cfg.has("p0") && !(checked_real(cfg, "p0") > 0.0)) {
        throw UsageError("--p0", "--p0 must be positive");
    }
    if (cfg.has("eps-grid")) {
        try {
            (void)parse_real_list(cfg.parameters.at("eps-grid"));
        } catch (const Error&) {
            throw UsageError("--eps-grid", "--eps-grid must be a comma-separated list of numbers");
        }
    }
    if (cfg.has("cases")) {
        const double c = checked_real(cfg, "cases");
        if (!(c >= 0.0) || c != static_cast<double>(static_cast<std::int64_t>(c))) {
            throw UsageError("--cases", "--cases must be a non-negative integer");
        }
    }
    for (const auto& key : spec.required) {
        if (!cfg.has(key)) {
            throw UsageError("--" + key, std::string(command_name(cfg.command)) + " requires --" + key);
        }
    }
    if (cfg.weights().size() > 1 && cfg.command != Command::Extrapolate) {
        throw UsageError("--weight", "--weight may be repeated only for extrapolate");
    }
    if (cfg.horizon < kMinHorizon) {
        throw UsageError("--n-max", "--n-max must be at least 10");
    }
}

} // namespace detail

/// argv[0] is the program name, argv[1] the subcommand.
inline RunConfig parse_args(const std::vector<std::string>& argv) {
    CLI::App app{"Discrete weighted Hardy inequality toolkit", "hardyx"};
    app.require_subcommand(1);
    app.set_help_flag();

    std::vector<std::string> weights;
    std::string psi;
    std::string beta;
    std::string p;
    std::string p0;
    std::string phi;
    std::string eps_grid;
    std::string format = "json";
    std::string cases;
    std::optional<Index> n_max;
    std::optional<std::int64_t> seed;

    std::map<std::string, Command> by_name;
    for (const auto& spec : detail::command_specs()) {
        CLI::App* sub = app.add_subcommand(command_name(spec.command));
        sub->set_help_flag();
        by_name[command_name(spec.command)] = spec.command;
        sub->add_option("--weight", weights)->allow_extra_args(false);
        sub->add_option("--psi", psi);
        sub->add_option("--beta", beta);
        sub->add_option("--p", p);
        sub->add_option("--p0", p0);
        sub->add_option("--phi", phi);
        sub->add_option("--eps-grid", eps_grid);
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--n-max", n_max);
        sub->add_option("--seed", seed);
        sub->add_option("--cases", cases);
    }

    std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        throw UsageError("", e.what());
    }

    RunConfig cfg;
    for (CLI::App* sub : app.get_subcommands()) {
        cfg.command = by_name.at(sub->get_name());
        const auto set = [&](const char* flag, const std::string& value) {
            if (sub->count(std::string("--") + flag) > 0) {
                cfg.parameters[flag] = value;
            }
        };
        if (!weights.empty()) {
            std::string joined;
            for (const auto& w : weights) {
                joined += (joined.empty() ? "" : ";") + w;
            }
            cfg.parameters["weight"] = joined;
        }
        set("psi", psi);
        set("beta", beta);
        set("p", p);
        set("p0", p0);
        set("phi", phi);
        set("eps-grid", eps_grid);
        set("cases", cases);
    }
    cfg.output_format = format == "csv" ? Format::Csv : Format::Json;
    cfg.horizon = n_max ? *n_max : default_horizon();
    cfg.seed = seed;
    detail::validate(cfg);
    return cfg;
}

/// Command line that parses back to `cfg`.
inline std::vector<std::string> to_args(const RunConfig& cfg) {
    std::vector<std::string> out{"hardyx", command_name(cfg.command)};
    for (const auto& [key, value] : cfg.parameters) {
        if (key == "weight") {
            for (const auto& w : cfg.weights()) {
                out.push_back("--weight");
                out.push_back(w);
            }
            continue;
        }
        out.push_back("--" + key);
        out.push_back(value);
    }
    out.push_back("--format");
    out.push_back(cfg.output_format == Format::Csv ? "csv" : "json");
    out.push_back("--n-max");
    out.push_back(std::to_string(cfg.horizon));
    if (cfg.seed) {
        out.push_back("--seed");
        out.push_back(std::to_string(*cfg.seed));
    }
    return out;
}

inline int exit_code(Verdict v) {
    switch (v) {
    case Verdict::Member: return kExitOk;
    case Verdict::NonMemberEvidence: return kExitViolation;
    case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitInconclusive;
}

namespace detail {

inline std::string csv_real(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

inline std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    }
    return out + "\"";
}

inline int run_check_weight(const RunConfig& cfg, const TruncationPolicy& policy, std::ostream& out) {
    const WeightSequence w = parse_weight(cfg.parameters.at("weight"));
    const double beta = cfg.real("beta");
    const double p = cfg.real("p");
    ConstantEstimate est;
    std::string cls;
    if (cfg.has("psi")) {
        const PsiWeight psi(parse_weight(cfg.parameters.at("psi")));
        est = generalized_psi_condition(w, psi, beta, p, policy);
        cls = "psi_condition";
    } else if (beta == 0.0) {
        est = bp_constant(w, p, policy);
        cls = "B_p";
    } else {
        est = qb_constant(w, beta, p, policy);
        cls = "QB";
    }
    if (cfg.output_format == Format::Json) {
        json j = class_report(cls, beta, p, est);
        j["weight"] = w.label();
        out << j.dump(2) << '\n';
    } else {
        out << "class,weight,beta,p,lo,hi,verdict,witness_n,scanned_up_to\n"
            << cls << ',' << csv_field(w.label()) << ',' << csv_real(beta) << ',' << csv_real(p) << ','
            << csv_real(est.bracket.lo) << ',' << csv_real(est.bracket.hi) << ',' << to_string(est.verdict) << ','
            << est.witness_n << ',' << est.scanned_up_to << '\n';
    }
    return exit_code(est.verdict);
}

inline int run_verify_hardy(const RunConfig& cfg, const TruncationPolicy& policy, std::ostream& out) {
    const WeightSequence v = parse_weight(cfg.parameters.at("weight"));
    const PsiWeight psi(parse_weight(cfg.parameters.at("psi")), policy.horizon);
    const double beta = cfg.real("beta");
    const double p = cfg.real("p");

    std::vector<double> trace;
    const ConstantEstimate lower = lower_bound_constant(psi, v, beta, p, policy, &trace);
    const ConstantEstimate cond = generalized_psi_condition(v, psi, beta, p, policy);
    std::optional<UpperBound> upper;
    const DoublingReport doubling = check_doubling_2n(psi, policy.horizon);
    if (cond.verdict == Verdict::Member && doubling.holds) {
        upper = upper_bound_constant(doubling.constant, cond.bracket.hi, beta, p);
    }
    Verdict verdict = cond.verdict;
    if (verdict == Verdict::Inconclusive && lower.verdict == Verdict::NonMemberEvidence) {
        verdict = Verdict::NonMemberEvidence;
    }

    if (cfg.output_format == Format::Json) {
        json j{{"weight", v.label()}, {"psi", psi.sequence().label()}, {"beta", beta}, {"p", p},
               {"verdict", std::string(to_string(verdict))}};
        j["lower_bound"] = lower;
        j["psi_condition"] = cond;
        j["upper_bound"] = upper ? json(*upper) : json(nullptr);
        j["doubling"] = doubling;
        json t = json::array();
        for (double x : trace) {
            t.push_back(real(x));
        }
        j["per_n_trace"] = std::move(t);
        out << j.dump(2) << '\n';
    } else {
        out << "n,extremizer_ratio\n";
        for (std::size_t i = 0; i < trace.size(); ++i) {
            out << (i + 1) << ',' << csv_real(trace[i]) << '\n';
        }
    }
    return exit_code(verdict);
}

inline int run_epsilon(const RunConfig& cfg, const TruncationPolicy& policy, std::ostream& out) {
    const WeightSequence w = parse_weight(cfg.parameters.at("weight"));
    const double beta = cfg.real("beta");
    const double p = cfg.real("p");
    const EpsilonResult r = openended_epsilon(w, beta, p, policy);
    if (cfg.output_format == Format::Json) {
        json j = r;
        j["weight"] = w.label();
        j["beta"] = beta;
        j["p"] = p;
        out << j.dump(2) << '\n';
    } else {
        out << "weight,beta,p,eps_formula,eps_verified,original_hi,new_hi,new_verdict\n"
            << csv_field(w.label()) << ',' << csv_real(beta) << ',' << csv_real(p) << ',' << csv_real(r.eps_formula)
            << ',' << csv_real(r.eps_verified) << ',' << csv_real(r.original.bracket.hi) << ','
            << csv_real(r.new_class_constant.bracket.hi) << ',' << to_string(r.new_class_constant.verdict) << '\n';
    }
    return exit_code(r.new_class_constant.verdict);
}

inline constexpr Index kPanelLength = 32;

inline int run_extrapolate(const RunConfig& cfg, const TruncationPolicy& policy, std::ostream& out) {
    const PhiFunction phi = parse_phi(cfg.parameters.at("phi"));
    const double p0 = cfg.real("p0");
    const double p = cfg.real("p");
    const double beta = cfg.real("beta");
    std::vector<double> grid;
    if (cfg.has("eps-grid")) {
        grid = parse_real_list(cfg.parameters.at("eps-grid"));
    } else {
        for (int i = 1; i <= 8; ++i) {
            grid.push_back((p0 - 1.0) * i / 8.0);
        }
    }
    std::vector<WeightSequence> conclusion;
    for (const auto& text : cfg.weights()) {
        conclusion.push_back(parse_weight(text));
    }
    const ExtrapolationSetup setup = prepare_extrapolation(
        phi, p0, p, beta, grid, default_hypothesis_panel(p0, grid, kPanelLength), conclusion, policy);
    const auto cases = static_cast<Index>(cfg.real("cases"));
    const std::uint64_t seed = cfg.seed ? static_cast<std::uint64_t>(*cfg.seed) : 42U;
    const PairSamplingSummary summary = sample_extrapolation_pairs(setup, seed, cases);
    const bool complete = summary.accepted == summary.requested;
    const int code = summary.violations > 0 ? kExitViolation : (complete ? kExitOk : kExitInconclusive);

    if (cfg.output_format == Format::Json) {
        json weights = json::array();
        for (const auto& [w, tilde] : setup.conclusion_panel) {
            json entry = tilde;
            entry["weight"] = w.label();
            weights.push_back(std::move(entry));
        }
        json failures = json::array();
        for (const auto& r : summary.failures) {
            failures.push_back(r);
        }
        json j{{"p0", p0}, {"p", p}, {"beta", beta}, {"phi", phi.describe()}, {"eps_grid", grid}};
        j["hypothesis_panel_size"] = setup.hypothesis_panel.size();
        j["tilde_phi"] = std::move(weights);
        j["pairs"] = {{"requested", summary.requested}, {"attempts", summary.attempts},
                      {"accepted", summary.accepted}, {"violations", summary.violations},
                      {"min_margin", real(summary.min_margin)}, {"failures", std::move(failures)}};
        out << j.dump(2) << '\n';
    } else {
        out << "weight,argmin_eps,chosen_eps,outer_factor,chosen_constant,tilde_phi\n";
        for (const auto& [w, t] : setup.conclusion_panel) {
            out << csv_field(w.label()) << ',' << csv_real(t.argmin_eps) << ',' << csv_real(t.chosen_eps) << ','
                << csv_real(t.outer_factor) << ',' << csv_real(t.chosen_constant) << ',' << csv_real(t.value) << '\n';
        }
    }
    return code;
}

inline int run_oracle_suite(const RunConfig& cfg, std::ostream& out) {
    const std::uint64_t seed = cfg.seed ? static_cast<std::uint64_t>(*cfg.seed) : 42U;
    const OracleSuiteReport report = hardy::run_oracle_suite(seed, static_cast<std::int64_t>(cfg.real("cases")));
    if (cfg.output_format == Format::Json) {
        out << json(report).dump(2) << '\n';
    } else {
        out << "check,cases,failures\n";
        for (const auto& c : report.checks) {
            out << csv_field(c.check) << ',' << c.cases << ',' << c.failures << '\n';
        }
    }
    return report.passed() ? kExitOk : kExitViolation;
}

} // namespace detail

/// Runs the command, writes the report to `out` and returns the exit code.
inline int execute(const RunConfig& cfg, std::ostream& out) {
    TruncationPolicy policy;
    policy.horizon = cfg.horizon;
    try {
        switch (cfg.command) {
        case Command::CheckWeight: return detail::run_check_weight(cfg, policy, out);
        case Command::VerifyHardy: return detail::run_verify_hardy(cfg, policy, out);
        case Command::Epsilon: return detail::run_epsilon(cfg, policy, out);
        case Command::Extrapolate: return detail::run_extrapolate(cfg, policy, out);
        case Command::OracleSuite: return detail::run_oracle_suite(cfg, out);
        }
    } catch (const Error& e) {
        out << error_object(e).dump(2) << '\n';
        return e.code() == ErrorCode::NotMember ? kExitViolation : kExitInconclusive;
    }
    return kExitInconclusive;
}

/// Full entry point: parse, execute, map usage errors to exit 2.
inline int main(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        cfg = parse_args(argv);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }
    return execute(cfg, out);
}

} // namespace hardy::cli

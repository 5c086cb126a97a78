#pragma once

// Experiment configuration files.
//
// INI layout, one section per component:
//
//   [experiment]  replications, seed, strategies, output, threads
//   [workload]    lambda, alpha, scales, weights, rate_lo_mult, rate_hi_mult
//   [channel]     lo_coeff, hi_coeff, envelope_amplitude, envelope_freq,
//                 envelope_phase, envelope_mode (literal | time_varying)
//   [buffer]      mode (infinite | tcp_refill), rtt, initial_window, max_window
//   [sim]         horizon, drain_after_horizon, oracle, use_true_mean_rate
//   [strategy]    c_const, size_prefactor, pareto_alpha
//   [metrics]     log_base (e | 2 | 10 | any number > 0)
//   [sweep]       linear_alphas, simplex_step
//
// Strategy lists use top-level commas; combinators take name:weight pairs,
// e.g. `T, TK, linear(tas:1, das:0.5), probabilistic(T:0.5, tas:0.25, das:0.25)`.
// Numbers may be written as fractions (`1/3`).

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "cellsched/error.hpp"
#include "cellsched/experiment.hpp"
#include "cellsched/strategies.hpp"

namespace cellsched {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Splits on commas that are not inside parentheses.
inline std::vector<std::string_view> split_top_level(std::string_view s) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        if (s[i] == ')') --depth;
        if (depth < 0) throw ConfigError("unbalanced ')' in '" + std::string(s) + "'");
        if (s[i] == ',' && depth == 0) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) throw ConfigError("unbalanced '(' in '" + std::string(s) + "'");
    const auto last = trim(s.substr(start));
    if (!last.empty() || !parts.empty()) parts.push_back(last);
    return parts;
}

inline double parse_plain_number(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("not a number: '" + std::string(s) + "'");
    return v;
}

}  // namespace detail

/// Parses `x` or `a/b`.
inline double parse_number(std::string_view s) {
    s = detail::trim(s);
    if (const auto slash = s.find('/'); slash != std::string_view::npos) {
        const double den = detail::parse_plain_number(s.substr(slash + 1));
        if (den == 0.0) throw ConfigError("division by zero in '" + std::string(s) + "'");
        return detail::parse_plain_number(s.substr(0, slash)) / den;
    }
    return detail::parse_plain_number(s);
}

inline std::vector<double> parse_number_list(std::string_view s) {
    std::vector<double> out;
    for (auto part : detail::split_top_level(s)) out.push_back(parse_number(part));
    return out;
}

/// `start:stop:step` (inclusive) or a comma list.
inline std::vector<double> parse_grid(std::string_view s) {
    s = detail::trim(s);
    if (s.find(':') == std::string_view::npos) return parse_number_list(s);
    std::vector<double> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ':') {
            parts.push_back(parse_number(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
        throw ConfigError("grid must be start:stop:step with step > 0");
    const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    std::vector<double> g;
    for (long i = 0; i <= n; ++i) g.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return g;
}

/// Parses one strategy expression. Atomic children of combinators inherit
/// the T parameters of `base`.
inline StrategySpec parse_strategy(std::string_view text, const StrategySpec& base = StrategySpec{}) {
    text = detail::trim(text);
    const auto open = text.find('(');
    auto make_atomic = [&](std::string_view name) {
        StrategySpec s = base;
        s.children.clear();
        s.kind = parse_strategy_kind(detail::trim(name));
        if (s.is_combinator()) throw ConfigError("combinator '" + std::string(name) + "' needs children");
        return s;
    };
    if (open == std::string_view::npos) return make_atomic(text);
    if (text.back() != ')') throw ConfigError("expected ')' at end of '" + std::string(text) + "'");

    const auto kind = parse_strategy_kind(detail::trim(text.substr(0, open)));
    if (kind != StrategyKind::linear && kind != StrategyKind::probabilistic)
        throw ConfigError("only linear(...) and probabilistic(...) take arguments");
    std::vector<StrategyChild> children;
    for (auto item : detail::split_top_level(text.substr(open + 1, text.size() - open - 2))) {
        const auto colon = item.rfind(':');
        if (colon == std::string_view::npos)
            throw ConfigError("combinator child '" + std::string(item) + "' needs a ':weight'");
        const auto child_name = detail::trim(item.substr(0, colon));
        if (child_name.find('(') != std::string_view::npos) throw ConfigError("combinators nest one level deep");
        children.push_back({make_atomic(child_name), parse_number(item.substr(colon + 1))});
    }
    StrategySpec spec = kind == StrategyKind::linear ? StrategySpec::linear(std::move(children))
                                                      : StrategySpec::probabilistic(std::move(children));
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string(text) + ": " + e.what());
    }
    return spec;
}

inline std::vector<StrategySpec> parse_strategy_list(std::string_view text, const StrategySpec& base = StrategySpec{}) {
    std::vector<StrategySpec> out;
    for (auto part : detail::split_top_level(text)) {
        if (part.empty()) throw ConfigError("empty entry in strategy list");
        out.push_back(parse_strategy(part, base));
    }
    return out;
}

inline bool parse_bool(std::string_view s) {
    s = detail::trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("not a boolean: '" + std::string(s) + "'");
}

/// Reference setup: the seven atomic strategies, alpha grid 0..2 step 0.1,
/// simplex step 0.1.
inline ExperimentConfig default_experiment_config() {
    ExperimentConfig cfg;
    cfg.strategies = parse_strategy_list("T, TK, round_robin, tas, max_ci, das, pf");
    cfg.linear_grid = default_linear_grid();
    cfg.simplex_grid = simplex_grid(10);
    return cfg;
}

/// Reads an INI stream on top of the defaults. Unknown sections or keys are
/// rejected so typos fail loudly.
inline ExperimentConfig load_experiment_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
        {"experiment", {"replications", "seed", "seeds", "strategies", "output", "threads"}},
        {"workload", {"lambda", "alpha", "scales", "weights", "rate_lo_mult", "rate_hi_mult"}},
        {"channel", {"lo_coeff", "hi_coeff", "envelope_amplitude", "envelope_freq", "envelope_phase", "envelope_mode"}},
        {"buffer", {"mode", "rtt", "initial_window", "max_window"}},
        {"sim", {"horizon", "drain_after_horizon", "oracle", "use_true_mean_rate"}},
        {"strategy", {"c_const", "size_prefactor", "pareto_alpha"}},
        {"metrics", {"log_base"}},
        {"sweep", {"linear_alphas", "simplex_step"}},
    };
    for (const auto& [section, body] : tree) {
        const auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == section; });
        if (it == known.end()) throw ConfigError("unknown config section [" + section + "]");
        for (const auto& [key, _] : body)
            if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
                throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }

    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(path)) return *v;
        return std::nullopt;
    };
    auto num = [&](const std::string& path, double& dst) {
        if (auto v = get(path)) dst = parse_number(*v);
    };
    auto integer = [&](const std::string& path, auto& dst) {
        if (auto v = get(path)) {
            const double x = parse_number(*v);
            if (x < 0 || x != std::floor(x)) throw ConfigError(path + " must be a non-negative integer");
            dst = static_cast<std::remove_reference_t<decltype(dst)>>(x);
        }
    };
    auto flag = [&](const std::string& path, bool& dst) {
        if (auto v = get(path)) dst = parse_bool(*v);
    };

    ExperimentConfig cfg = default_experiment_config();
    SimConfig& sim = cfg.sim;

    num("workload.lambda", sim.workload.lambda);
    num("workload.alpha", sim.workload.size_mixture.alpha);
    num("workload.rate_lo_mult", sim.workload.rate_lo_mult);
    num("workload.rate_hi_mult", sim.workload.rate_hi_mult);
    {
        const auto scales = get("workload.scales");
        const auto weights = get("workload.weights");
        if (scales.has_value() != weights.has_value())
            throw ConfigError("workload.scales and workload.weights must be given together");
        if (scales) {
            const auto m = parse_number_list(*scales);
            const auto p = parse_number_list(*weights);
            if (m.size() != p.size()) throw ConfigError("workload.scales and workload.weights differ in length");
            sim.workload.size_mixture.components.clear();
            for (std::size_t i = 0; i < m.size(); ++i) sim.workload.size_mixture.components.push_back({p[i], m[i]});
        }
    }

    num("channel.lo_coeff", sim.channel.lo_coeff);
    num("channel.hi_coeff", sim.channel.hi_coeff);
    num("channel.envelope_amplitude", sim.channel.envelope_amplitude);
    num("channel.envelope_freq", sim.channel.envelope_freq);
    num("channel.envelope_phase", sim.channel.envelope_phase);
    if (auto v = get("channel.envelope_mode")) sim.channel.envelope_mode = parse_envelope_mode(detail::trim(*v));

    if (auto v = get("buffer.mode")) sim.buffer.mode = parse_buffer_mode(detail::trim(*v));
    integer("buffer.rtt", sim.buffer.rtt);
    num("buffer.initial_window", sim.buffer.initial_window);
    num("buffer.max_window", sim.buffer.max_window);

    integer("sim.horizon", sim.horizon);
    flag("sim.drain_after_horizon", sim.drain_after_horizon);
    flag("sim.oracle", sim.oracle);
    flag("sim.use_true_mean_rate", sim.use_true_mean_rate);
    sim.workload.horizon = sim.horizon;

    StrategySpec base;
    base.pareto_alpha = sim.workload.size_mixture.alpha;
    num("strategy.c_const", base.c_const);
    num("strategy.pareto_alpha", base.pareto_alpha);
    flag("strategy.size_prefactor", base.size_prefactor);
    cfg.index_defaults = base;

    if (auto v = get("metrics.log_base")) {
        const auto b = detail::trim(*v);
        cfg.log_base = b == "e" ? std::numbers::e : parse_number(b);
        if (!(cfg.log_base > 0.0) || cfg.log_base == 1.0) throw ConfigError("metrics.log_base must be > 0 and != 1");
    }

    integer("experiment.replications", cfg.replications);
    integer("experiment.seed", cfg.base_seed);
    integer("experiment.threads", cfg.threads);
    if (auto v = get("experiment.seeds")) {
        cfg.seeds.clear();
        for (double s : parse_number_list(*v)) {
            if (s < 0 || s != std::floor(s)) throw ConfigError("experiment.seeds must be non-negative integers");
            cfg.seeds.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (auto v = get("experiment.output")) cfg.output_dir = std::string(detail::trim(*v));
    const auto strategies = get("experiment.strategies");
    cfg.strategies = parse_strategy_list(strategies ? *strategies : "T, TK, round_robin, tas, max_ci, das, pf", base);
    sim.strategy = cfg.strategies.empty() ? base : cfg.strategies.front();

    if (auto v = get("sweep.linear_alphas")) cfg.linear_grid = parse_grid(*v);
    if (auto v = get("sweep.simplex_step")) {
        const double step = parse_number(*v);
        if (!(step > 0.0 && step <= 1.0)) throw ConfigError("sweep.simplex_step must be in (0, 1]");
        const double n = 1.0 / step;
        if (std::abs(n - std::round(n)) > 1e-9) throw ConfigError("sweep.simplex_step must divide 1");
        cfg.simplex_grid = simplex_grid(static_cast<int>(std::round(n)));
    }

    try {
        sim.workload.validate();
        sim.channel.validate();
        sim.buffer.validate();
        if (sim.horizon <= 0) throw ParameterError("sim.horizon must be > 0");
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ExperimentConfig load_experiment_config_string(const std::string& text) {
    std::istringstream in(text);
    return load_experiment_config(in);
}

}  // namespace cellsched

#include "mcprobe/experiment.hpp"

#include <chrono>
#include <cmath>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <istream>
#include <omp.h>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "mcprobe/analysis.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/locator.hpp"

namespace mcprobe {

void validate(const ExperimentConfig& cfg)
{
    if (cfg.trials < 1) throw ConfigError("trials must be at least 1");
    if (cfg.packets < 1) throw ConfigError("packets must be at least 1");
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) throw ConfigError("threshold must lie strictly between 0 and 1");
    if (cfg.route.segment_len < 1) throw ConfigError("segment length must be at least 1");
    validate(cfg.loss);
}

TrialResult run_trial(const Topology& t, const RouteTree& rt, const ExperimentConfig& cfg, int trial)
{
    // Loss placement and probe sampling get separate streams, so the same
    // seed gives the same placements whatever the route.
    const std::uint64_t base = mix_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    const LossModel lm = make_loss_model(t, cfg.loss, mix_seed(base, 0));
    const FlowStats fs = cfg.exact_counts ? expected_counts(rt, lm, cfg.packets)
                                          : simulate_probing(rt, lm, cfg.packets, mix_seed(base, 1));
    FlowStatsSource source(fs, cfg.exact_counts);
    StatsOracle oracle(rt, source);
    const LocateReport report = locate(rt, oracle, {cfg.threshold});

    TrialResult r;
    r.trial = trial;
    r.accesses = report.access_count;
    r.exact_match = exact_match(report, lm.truth);
    r.found_count = static_cast<int>(report.found.size());
    r.unresolved = static_cast<int>(report.unresolved.size());
    r.recall = recall(report, lm.truth);
    return r;
}

ExperimentAggregates aggregate(const std::vector<TrialResult>& trials)
{
    ExperimentAggregates a;
    if (trials.empty()) return a;
    const double n = static_cast<double>(trials.size());
    std::vector<bool> exact;
    for (const auto& r : trials) {
        a.mean_accesses += r.accesses;
        a.mean_recall += r.recall;
        exact.push_back(r.exact_match);
    }
    a.mean_accesses /= n;
    a.mean_recall /= n;
    double ss = 0;
    for (const auto& r : trials) ss += (r.accesses - a.mean_accesses) * (r.accesses - a.mean_accesses);
    a.stdev_accesses = trials.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    a.accuracy = accuracy(exact);
    return a;
}

namespace {

ExperimentReport prepare(const Topology& t, const ExperimentConfig& cfg, std::optional<RouteTree>& rt)
{
    validate(cfg);
    if (cfg.loss.explicit_high.empty() && cfg.loss.high_loss_count > static_cast<int>(t.directed_link_count()))
        throw ConfigError(fmt::format("{} high-loss links requested but only {} directed links exist",
                                      cfg.loss.high_loss_count, t.directed_link_count()));
    rt.emplace(build_route(t, cfg.route));
    ExperimentReport report;
    report.config = cfg;
    report.route_name = route_name(cfg.route);
    report.route = route_stats(*rt);
    report.trials.resize(static_cast<std::size_t>(cfg.trials));
    return report;
}

}  // namespace

ExperimentReport run_experiment(const Topology& t, const ExperimentConfig& cfg, int jobs)
{
    std::optional<RouteTree> rt;
    ExperimentReport report = prepare(t, cfg, rt);
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
    std::string failure;
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (int i = 0; i < cfg.trials; ++i) {
        try {
            report.trials[i] = run_trial(t, *rt, cfg, i);
        } catch (const std::exception& e) {
#pragma omp critical(mcprobe_trial_failure)
            if (failure.empty()) failure = e.what();
        }
    }
    if (!failure.empty()) throw Error(failure);
    report.aggregates = aggregate(report.trials);
    return report;
}

ExperimentReport run_experiment_serial(const Topology& t, const ExperimentConfig& cfg)
{
    std::optional<RouteTree> rt;
    ExperimentReport report = prepare(t, cfg, rt);
    for (int i = 0; i < cfg.trials; ++i) report.trials[i] = run_trial(t, *rt, cfg, i);
    report.aggregates = aggregate(report.trials);
    return report;
}

void write_report_json(std::ostream& out, const std::vector<ExperimentReport>& reports, bool with_timestamp)
{
    nlohmann::ordered_json doc;
    doc["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        const auto& c = r.config;
        nlohmann::ordered_json run;
        run["config"] = {
            {"topology", c.topology},
            {"measurement_node", c.measurement_node},
            {"scheme", std::string(to_string(c.route.scheme))},
            {"seg_len", c.route.segment_len},
            {"high_loss_count", c.loss.high_loss_count},
            {"high_loss", {c.loss.high.lo, c.loss.high.hi}},
            {"light_loss", {c.loss.light.lo, c.loss.light.hi}},
            {"packets", c.packets},
            {"threshold", c.threshold},
            {"trials", c.trials},
            {"seed", c.seed},
            {"exact_counts", c.exact_counts},
        };
        run["route"] = {
            {"name", r.route_name},       {"paths", r.route.paths},       {"avg", r.route.avg},
            {"min", r.route.min},         {"max", r.route.max},           {"segments", r.route.segments},
            {"segment_stdev", r.route.segment_stdev},
        };
        run["aggregates"] = {
            {"mean_accesses", r.aggregates.mean_accesses},
            {"stdev_accesses", r.aggregates.stdev_accesses},
            {"accuracy", r.aggregates.accuracy},
            {"mean_recall", r.aggregates.mean_recall},
        };
        doc["runs"].push_back(std::move(run));
    }
    if (with_timestamp)
        doc["metadata"] = {{"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr)))}};
    out << doc.dump(2) << '\n';
}

void write_trials_csv(std::ostream& out, const ExperimentReport& report)
{
    out << "trial,accesses,exact_match,found_count,unresolved,recall\n";
    for (const auto& r : report.trials)
        out << fmt::format("{},{},{},{},{},{}\n", r.trial, r.accesses, r.exact_match ? 1 : 0, r.found_count,
                           r.unresolved, r.recall);
}

void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports)
{
    out << "route,high_loss_count,light_lo,light_hi,packets,trials,mean_accesses,stdev_accesses,accuracy,mean_recall\n";
    for (const auto& r : reports) {
        const auto& c = r.config;
        const auto& a = r.aggregates;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.route_name, c.loss.high_loss_count, c.loss.light.lo,
                           c.loss.light.hi, c.packets, c.trials, a.mean_accesses, a.stdev_accesses, a.accuracy,
                           a.mean_recall);
    }
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    for (std::string item; std::getline(ss, item, ',');)
        if (auto x = trim(item); !x.empty()) out.push_back(x);
    if (out.empty()) throw ConfigError("empty value list");
    return out;
}

template <class T>
T number(const std::string& s)
{
    T value{};
    std::istringstream in(s);
    in >> value;
    if (in.fail() || !in.eof()) throw ConfigError(fmt::format("'{}' is not a valid number", s));
    return value;
}

bool boolean(const std::string& s)
{
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(fmt::format("'{}' is not a boolean", s));
}

}  // namespace

RateRange parse_range(const std::string& text)
{
    const auto colon = text.find(':');
    RateRange r;
    if (colon == std::string::npos) {
        r.lo = r.hi = number<double>(trim(text));
    } else {
        r.lo = number<double>(trim(text.substr(0, colon)));
        r.hi = number<double>(trim(text.substr(colon + 1)));
    }
    if (!(r.lo >= 0.0 && r.lo <= r.hi && r.hi <= 1.0))
        throw ConfigError(fmt::format("range '{}' must satisfy 0 <= lo <= hi <= 1", text));
    return r;
}

void apply_setting(SweepConfig& cfg, const std::string& key, const std::string& value)
{
    auto& b = cfg.base;
    if (key == "topology") {
        b.topology = value;
    } else if (key == "mh" || key == "measurement_node") {
        b.measurement_node = value;
    } else if (key == "trials") {
        b.trials = number<int>(value);
    } else if (key == "seed") {
        b.seed = number<std::uint64_t>(value);
    } else if (key == "threshold") {
        b.threshold = number<double>(value);
    } else if (key == "exact_counts") {
        b.exact_counts = boolean(value);
    } else if (key == "high_loss") {
        b.loss.high = parse_range(value);
    } else if (key == "scheme") {
        cfg.schemes.clear();
        for (const auto& s : split_list(value)) {
            const auto scheme = parse_scheme(s);
            if (!scheme) throw ConfigError(fmt::format("unknown scheme '{}'", s));
            cfg.schemes.push_back(*scheme);
        }
    } else if (key == "seg_len") {
        cfg.seg_lens.clear();
        for (const auto& s : split_list(value)) cfg.seg_lens.push_back(number<int>(s));
    } else if (key == "high_loss_count") {
        cfg.high_loss_counts.clear();
        for (const auto& s : split_list(value)) cfg.high_loss_counts.push_back(number<int>(s));
    } else if (key == "light_loss") {
        cfg.light_losses.clear();
        for (const auto& s : split_list(value)) cfg.light_losses.push_back(parse_range(s));
    } else if (key == "packets") {
        cfg.packets.clear();
        for (const auto& s : split_list(value)) cfg.packets.push_back(number<std::int64_t>(s));
    } else {
        throw ConfigError(fmt::format("unknown setting '{}'", key));
    }
}

SweepConfig parse_sweep(std::istream& in)
{
    SweepConfig cfg;
    int lineno = 0;
    for (std::string line; std::getline(in, line);) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", lineno));
        try {
            apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ConfigError& e) {
            throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
        }
    }
    return cfg;
}

std::vector<ExperimentConfig> expand(const SweepConfig& sweep)
{
    std::vector<ExperimentConfig> out;
    for (Scheme scheme : sweep.schemes) {
        const bool segmented = scheme == Scheme::bbt_t1 || scheme == Scheme::bbt_t2;
        const std::vector<int> lens = segmented ? sweep.seg_lens : std::vector<int>{sweep.seg_lens.front()};
        for (int len : lens)
            for (int count : sweep.high_loss_counts)
                for (const auto& light : sweep.light_losses)
                    for (auto packets : sweep.packets) {
                        ExperimentConfig c = sweep.base;
                        c.route = {scheme, len};
                        c.loss.high_loss_count = count;
                        c.loss.light = light;
                        c.packets = packets;
                        validate(c);
                        out.push_back(std::move(c));
                    }
    }
    return out;
}

}  // namespace mcprobe

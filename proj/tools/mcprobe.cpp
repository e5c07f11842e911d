// mcprobe: route construction, lossy probing and high-loss link location.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcprobe/analysis.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/experiment.hpp"
#include "mcprobe/locator.hpp"
#include "mcprobe/probesim.hpp"
#include "mcprobe/routes.hpp"

namespace fs = std::filesystem;
using namespace mcprobe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInvariant = 3;

struct Common {
    std::string topology = "ideal";
    std::string mh;
    std::string scheme = "bbt-t2";
    std::string variant;  // with --scheme bbt
    int seg_len = 8;
    std::int64_t packets = 100000;
    double threshold = 0.1;
    std::uint64_t seed = 1;
    int trials = 1000;
    std::string out;
    std::string format;
    bool trace = false;
    int jobs = 0;
};

void add_route_flags(CLI::App* cmd, Common& c)
{
    cmd->add_option("--topology", c.topology, "alias (ideal, renater) or edge-list/GraphML path");
    cmd->add_option("--mh", c.mh, "measurement node (defaults to the topology's)");
    cmd->add_option("--scheme", c.scheme, "unicursal | bbt-t1 | bbt-t2 | bbt | spt-m1 | spt-m2");
    cmd->add_option("--variant", c.variant, "t1 | t2, for --scheme bbt");
    cmd->add_option("--seg-len", c.seg_len, "BBT segment length L")->check(CLI::PositiveNumber);
}

Topology load(const Common& c)
{
    return resolve_topology(c.topology, c.mh.empty() ? std::nullopt : std::optional<std::string>(c.mh));
}

RouteParams route_params(const Common& c)
{
    RouteParams p;
    p.segment_len = c.seg_len;
    if (c.scheme == "bbt") {
        if (c.variant.empty() || c.variant == "t2" || c.variant == "T2")
            p.scheme = Scheme::bbt_t2;
        else if (c.variant == "t1" || c.variant == "T1")
            p.scheme = Scheme::bbt_t1;
        else
            throw ConfigError(fmt::format("unknown variant '{}'", c.variant));
        return p;
    }
    const auto s = parse_scheme(c.scheme);
    if (!s) throw ConfigError(fmt::format("unknown scheme '{}'", c.scheme));
    p.scheme = *s;
    return p;
}

void check_threshold(double h)
{
    if (!(h > 0.0 && h < 1.0)) throw ConfigError(fmt::format("threshold {} must lie strictly between 0 and 1", h));
}

std::ofstream open_out(const fs::path& p)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(p);
    if (!f) throw ConfigError(fmt::format("cannot write {}", p.string()));
    return f;
}

// ---------------------------------------------------------------------------

int cmd_route(const Common& c, bool dump)
{
    const Topology t = load(c);
    const auto params = route_params(c);
    const RouteTree rt = build_route(t, params);
    const auto report = validate_route(rt, t);
    if (!report.ok()) {
        for (const auto& m : report.messages) std::cerr << "invalid route: " << m << '\n';
        return kExitInvariant;
    }
    const auto s = route_stats(rt);
    if (c.format == "json") {
        nlohmann::ordered_json j = {{"route", route_name(params)}, {"paths", s.paths},   {"avg", s.avg},
                                    {"min", s.min},                {"max", s.max},       {"segments", s.segments},
                                    {"segment_stdev", s.segment_stdev}};
        std::cout << j.dump(2) << '\n';
    } else {
        if (s.paths == 1)
            std::cout << fmt::format("paths=1 len={}\n", s.max);
        else
            std::cout << fmt::format("paths={} avg={:g} min={} max={}\n", s.paths, s.avg, s.min, s.max);
        std::cout << fmt::format("segments={} stdev={:.4f}\n", s.segments, s.segment_stdev);
    }
    if (dump) write_route_report(std::cout, rt, t);
    if (!c.out.empty()) {
        auto f = open_out(c.out);
        write_route_report(f, rt, t);
    }
    return kExitOk;
}

struct LocateArgs {
    int high_loss = 0;
    std::string high_range = "0.15:0.2";
    std::string light_range = "0:0";
    std::vector<std::string> links;
    bool exact = false;
};

int cmd_locate(const Common& c, const LocateArgs& a)
{
    check_threshold(c.threshold);
    const Topology t = load(c);
    const auto params = route_params(c);
    const RouteTree rt = build_route(t, params);

    LossSpec spec;
    spec.high_loss_count = a.high_loss;
    spec.high = parse_range(a.high_range);
    spec.light = parse_range(a.light_range);
    for (const auto& l : a.links) spec.explicit_high.push_back(parse_directed_link(t, l));
    const auto lm = make_loss_model(t, spec, mix_seed(c.seed, 0));
    const auto stats = a.exact ? expected_counts(rt, lm, c.packets) : simulate_probing(rt, lm, c.packets, mix_seed(c.seed, 1));
    FlowStatsSource source(stats, a.exact);
    StatsOracle oracle(rt, source);
    const auto report = locate(rt, oracle, {c.threshold});

    nlohmann::ordered_json j;
    j["route"] = route_name(params);
    j["packets"] = c.packets;
    j["threshold"] = c.threshold;
    j["truth"] = nlohmann::ordered_json::array();
    for (const auto& d : lm.truth) j["truth"].push_back({{"link", t.label(d)}, {"index", d.index()}, {"rate", lm[d]}});
    j["found"] = nlohmann::ordered_json::array();
    for (const auto& f : report.found)
        j["found"].push_back({{"link", t.label(f.link)}, {"index", f.link.index()}, {"rate", f.rate}});
    j["unresolved"] = nlohmann::ordered_json::array();
    for (const auto& r : report.unresolved) {
        std::vector<std::string> links;
        for (const auto& d : r.links) links.push_back(t.label(d));
        j["unresolved"].push_back(links);
    }
    j["access_count"] = report.access_count;
    j["exact_match"] = exact_match(report, lm.truth);
    j["warnings"] = report.warnings;
    if (report.aborted) j["error"] = report.error;
    if (c.trace) {
        j["trace"] = nlohmann::ordered_json::array();
        for (const auto& rec : report.trace) {
            const PortId port = rec.position < 0 ? PortId::root() : rt.port(rec.position);
            j["trace"].push_back({{"step", rec.step},
                                  {"port", t.port_label(port)},
                                  {"reason", std::string(to_string(rec.reason))},
                                  {"count", rec.count},
                                  {"access_total", rec.access_total}});
        }
    }
    std::cout << j.dump(2) << '\n';
    if (c.trace) std::cerr << access_order_trace(report, rt, t);
    return report.aborted ? kExitInvariant : kExitOk;
}

struct ExperimentArgs {
    std::string config;
    std::vector<std::string> overrides;  // key=value
    bool exact = false;
    bool no_timestamp = false;
};

int cmd_experiment(const Common& c, const ExperimentArgs& a, const CLI::App& cmd)
{
    SweepConfig sweep;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw ConfigError(fmt::format("config not found: {}", a.config));
        sweep = parse_sweep(in);
    }
    // Flags win over the file.
    auto set = [&](const char* flag, const std::string& key, const std::string& value) {
        if (cmd.count(flag) > 0) apply_setting(sweep, key, value);
    };
    set("--topology", "topology", c.topology);
    set("--mh", "mh", c.mh);
    set("--scheme", "scheme", c.scheme);
    set("--seg-len", "seg_len", std::to_string(c.seg_len));
    set("--packets", "packets", std::to_string(c.packets));
    set("--threshold", "threshold", fmt::format("{}", c.threshold));
    set("--seed", "seed", std::to_string(c.seed));
    set("--trials", "trials", std::to_string(c.trials));
    if (a.exact) apply_setting(sweep, "exact_counts", "true");
    for (const auto& o : a.overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", o));
        apply_setting(sweep, o.substr(0, eq), o.substr(eq + 1));
    }

    const auto runs = expand(sweep);
    const auto& base = sweep.base;
    const Topology t = resolve_topology(
        base.topology, base.measurement_node.empty() ? std::nullopt : std::optional<std::string>(base.measurement_node));

    std::vector<ExperimentReport> reports;
    for (const auto& cfg : runs) {
        reports.push_back(run_experiment(t, cfg, c.jobs));
        const auto& r = reports.back();
        std::cout << fmt::format("{} high={} light={}:{} N={} trials={} mean_accesses={:.4f} stdev={:.4f} accuracy={:.4f}\n",
                                 r.route_name, cfg.loss.high_loss_count, cfg.loss.light.lo, cfg.loss.light.hi,
                                 cfg.packets, cfg.trials, r.aggregates.mean_accesses, r.aggregates.stdev_accesses,
                                 r.aggregates.accuracy);
    }

    if (!c.out.empty()) {
        const fs::path dir(c.out);
        fs::create_directories(dir);
        const bool json = c.format.empty() || c.format == "json";
        const bool csv = c.format.empty() || c.format == "csv";
        if (json) {
            auto f = open_out(dir / "experiment.json");
            write_report_json(f, reports, !a.no_timestamp);
        }
        if (csv) {
            auto f = open_out(dir / "summary.csv");
            write_summary_csv(f, reports);
            for (std::size_t i = 0; i < reports.size(); ++i) {
                auto g = open_out(dir / fmt::format("trials_{:02}_{}.csv", i, reports[i].route_name));
                write_trials_csv(g, reports[i]);
            }
        }
    }
    return kExitOk;
}

int cmd_study(int n, const std::vector<int>& segment_counts, const std::string& out)
{
    std::ofstream file;
    std::ostream* csv = &std::cout;
    if (!out.empty()) {
        file = open_out(out);
        csv = &file;
    }
    *csv << "segments,stdev,expected_accesses,parts\n";
    for (int S : segment_counts) {
        const auto points = segment_access_study(n, S);
        const StudyPoint* best = nullptr;
        for (const auto& p : points) {
            std::string parts;
            for (int s : p.parts) parts += (parts.empty() ? "" : " ") + std::to_string(s);
            *csv << fmt::format("{},{:.6f},{:.6f},{}\n", S, p.stdev, p.expected, parts);
            if (best == nullptr || p.expected < best->expected) best = &p;
        }
        if (!out.empty() && best != nullptr)
            std::cout << fmt::format("S={} points={} min_expected={:.4f} at stdev={:.4f}\n", S, points.size(),
                                     best->expected, best->stdev);
    }
    return kExitOk;
}

int cmd_eq_check(const Common& c, const std::vector<int>& seg_lens, double tolerance)
{
    check_threshold(c.threshold);
    const Topology t = load(c);
    bool ok = true;
    for (int L : seg_lens) {
        const RouteTree rt = build_bbt(t, BbtVariant::t1, L);
        const auto sweep = single_placement_sweep(t, rt, 0.2, c.threshold);
        double sum = 0;
        for (const auto& o : sweep) sum += o.accesses;
        const double empirical = sum / static_cast<double>(sweep.size());
        const double analytic = f_t1(segment_profile(rt), static_cast<int>(t.directed_link_count()));
        const bool pass = std::abs(analytic - empirical) <= tolerance;
        ok = ok && pass;
        std::cout << fmt::format("T1_seg{} f_t1={:.4f} empirical={:.4f} diff={:+.4f} {}\n", L, analytic, empirical,
                                 analytic - empirical, pass ? "ok" : "MISMATCH");
    }
    return ok ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multicast probe routing and high-loss link location"};
    app.require_subcommand(1);
    Common c;

    bool dump = false;
    auto* route = app.add_subcommand("route", "build a probe route and print its statistics");
    add_route_flags(route, c);
    route->add_flag("--dump", dump, "print every terminal path and segment");
    route->add_option("--out", c.out, "write the full route report to this file");
    route->add_option("--format", c.format, "text | json")->check(CLI::IsMember({"text", "json"}));

    LocateArgs la;
    auto* loc = app.add_subcommand("locate", "simulate one probing round and locate lossy links");
    add_route_flags(loc, c);
    loc->add_option("--packets", c.packets, "probe packets N")->check(CLI::PositiveNumber);
    loc->add_option("--threshold", c.threshold, "loss threshold h");
    loc->add_option("--seed", c.seed, "random seed");
    loc->add_option("--high-loss", la.high_loss, "number of randomly placed high-loss links")->check(CLI::NonNegativeNumber);
    loc->add_option("--high-loss-range", la.high_range, "lo:hi loss rate of high-loss links");
    loc->add_option("--light-loss", la.light_range, "lo:hi background loss rate");
    loc->add_option("--high-loss-links", la.links, "explicit high-loss links: index, u->v or u->v#id")->delimiter(',');
    loc->add_flag("--exact-counts", la.exact, "use noise-free expected counts");
    loc->add_flag("--trace", c.trace, "include the access-order trace");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "run a batch of trials (optionally a sweep file)");
    exp->add_option("config", ea.config, "sweep file of key = value lines");
    add_route_flags(exp, c);
    exp->add_option("--packets", c.packets, "probe packets N")->check(CLI::PositiveNumber);
    exp->add_option("--threshold", c.threshold, "loss threshold h");
    exp->add_option("--seed", c.seed, "master seed");
    exp->add_option("--trials", c.trials, "number of trials");
    exp->add_option("--out", c.out, "output directory");
    exp->add_option("--format", c.format, "json | csv (default both)")->check(CLI::IsMember({"json", "csv"}));
    exp->add_option("--jobs", c.jobs, "worker threads (results do not depend on it)")->check(CLI::NonNegativeNumber);
    exp->add_option("--set", ea.overrides, "extra key=value setting, as in the sweep file");
    exp->add_flag("--exact-counts", ea.exact, "use noise-free expected counts");
    exp->add_flag("--no-timestamp", ea.no_timestamp, "omit the metadata timestamp");

    int study_n = 56;
    std::vector<int> study_s{5, 6, 7};
    std::string study_out;
    auto* study = app.add_subcommand("study-segments", "expected accesses against segment-length spread");
    study->add_option("--links", study_n, "total links n")->check(CLI::PositiveNumber);
    study->add_option("--segments", study_s, "segment counts S")->delimiter(',');
    study->add_option("--out", study_out, "CSV file (default stdout)");

    std::vector<int> eq_lens{8, 4};
    double eq_tol = 1.0;
    auto* eq = app.add_subcommand("eq-check", "compare the single-backbone access formula with exhaustive location");
    eq->add_option("--topology", c.topology, "alias or path");
    eq->add_option("--mh", c.mh, "measurement node");
    eq->add_option("--seg-len", eq_lens, "segment lengths")->delimiter(',');
    eq->add_option("--threshold", c.threshold, "loss threshold h");
    eq->add_option("--tolerance", eq_tol, "allowed |formula - empirical|");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*route) return cmd_route(c, dump);
        if (*loc) return cmd_locate(c, la);
        if (*exp) return cmd_experiment(c, ea, *exp);
        if (*study) return cmd_study(study_n, study_s, study_out);
        if (*eq) return cmd_eq_check(c, eq_lens, eq_tol);
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvariant;
    }
    return kExitUsage;
}

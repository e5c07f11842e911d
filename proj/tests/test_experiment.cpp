#include <sstream>

#include "doctest.h"
#include "mcprobe/analysis.hpp"
#include "mcprobe/errors.hpp"
#include "mcprobe/experiment.hpp"

using namespace mcprobe;

namespace {

std::string json_of(const ExperimentReport& r)
{
    std::ostringstream out;
    write_report_json(out, {r}, false);
    return out.str();
}

}  // namespace

TEST_CASE("zero loss costs root plus leaves every trial")
{
    ExperimentConfig cfg;
    cfg.route = {Scheme::bbt_t2, 8};
    cfg.loss.high_loss_count = 0;
    cfg.trials = 200;
    const auto r = run_experiment(ideal_topology(), cfg);
    for (const auto& row : r.trials) CHECK(row.accesses == 5);
    CHECK(r.aggregates.accuracy == 1.0);
    CHECK(r.route.paths == 4);
}

TEST_CASE("simulated mean matches exhaustive enumeration")
{
    const auto t = ideal_topology();
    ExperimentConfig cfg;
    cfg.route = {Scheme::unicursal, 8};
    cfg.trials = 1000;
    const auto r = run_experiment(t, cfg);
    double sum = 0;
    for (const auto& o : single_placement_sweep(t, build_unicursal(t), 0.2, 0.1)) sum += o.accesses;
    CHECK(std::abs(r.aggregates.mean_accesses - sum / 56.0) <= 0.5);
}

TEST_CASE("parallel and serial runs agree")
{
    const auto t = resolve_topology("renater");
    ExperimentConfig cfg;
    cfg.route = {Scheme::bbt_t2, 8};
    cfg.loss.high_loss_count = 3;
    cfg.loss.light = {0.0, 0.02};
    cfg.trials = 300;
    const auto serial = run_experiment_serial(t, cfg);
    for (int jobs : {1, 2, 4}) {
        const auto par = run_experiment(t, cfg, jobs);
        CHECK(json_of(par) == json_of(serial));
        for (std::size_t i = 0; i < serial.trials.size(); ++i) {
            CHECK(par.trials[i].accesses == serial.trials[i].accesses);
            CHECK(par.trials[i].exact_match == serial.trials[i].exact_match);
        }
    }
    const auto again = aggregate(serial.trials);
    CHECK(again.mean_accesses == serial.aggregates.mean_accesses);
    CHECK(again.accuracy == serial.aggregates.accuracy);
}

TEST_CASE("reports are byte-identical across runs")
{
    ExperimentConfig cfg;
    cfg.trials = 100;
    cfg.seed = 77;
    const auto t = ideal_topology();
    CHECK(json_of(run_experiment(t, cfg)) == json_of(run_experiment(t, cfg)));
    std::ostringstream a;
    std::ostringstream b;
    write_trials_csv(a, run_experiment(t, cfg));
    write_trials_csv(b, run_experiment(t, cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("trial,accesses,exact_match,found_count,unresolved,recall\n", 0) == 0);

    std::ostringstream stamped;
    write_report_json(stamped, {run_experiment(t, cfg)}, true);
    CHECK(stamped.str().find("\"timestamp\"") != std::string::npos);
}

TEST_CASE("config validation")
{
    ExperimentConfig cfg;
    cfg.trials = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.trials = 1;
    cfg.packets = 0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
    cfg.packets = 1;
    cfg.threshold = 1.5;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("sweep files")
{
    std::istringstream in(R"(# comment
topology = ideal
scheme = unicursal, bbt-t1, spt-m2
seg_len = 8, 4
high_loss_count = 1, 2   # trailing comment
light_loss = 0:0, 0:0.02
packets = 1000
trials = 10
seed = 3
)");
    const auto sweep = parse_sweep(in);
    const auto runs = expand(sweep);
    // unicursal and spt-m2 ignore seg_len: (1 + 2 + 1) x 2 x 2.
    CHECK(runs.size() == 16);
    CHECK(runs.front().route.scheme == Scheme::unicursal);
    CHECK(runs.front().trials == 10);
    CHECK(runs.back().loss.light.hi == 0.02);

    std::istringstream bad("scheme = nope\n");
    CHECK_THROWS_WITH_AS((void)parse_sweep(bad), doctest::Contains("line 1"), ConfigError);
    std::istringstream zero("trials = 0\n");
    CHECK_THROWS_AS((void)expand(parse_sweep(zero)), ConfigError);
    std::istringstream junk("just words\n");
    CHECK_THROWS_AS((void)parse_sweep(junk), ConfigError);
    CHECK(parse_range("0.15:0.2").hi == 0.2);
    CHECK_THROWS_AS((void)parse_range("0.3:0.2"), ConfigError);
}

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "morasim/engine.hpp"
#include "morasim/experiment.hpp"
#include "morasim/io.hpp"
#include "morasim/schedtest.hpp"
#include "morasim/svg.hpp"
#include "morasim/workload.hpp"

using namespace morasim;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct UsageError : Error {
    using Error::Error;
};

std::vector<Rational> parse_list(const std::string& text) {
    std::vector<Rational> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(Rational::parse(item));
    return out;
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

struct ModelChoice {
    ProcessorModel model;
    std::string origin;
};

ModelChoice resolve_model(const std::string& path) {
    if (!path.empty()) return {load_model(path), path};
    if (const char* env = std::getenv("MORASIM_MODEL"); env && *env) return {load_model(env), std::string(env) + " (MORASIM_MODEL)"};
    return {ProcessorModel::xscale(), "built-in xscale"};
}

std::string job_label(const JobId& id) { return "tau" + std::to_string(id.task) + "," + std::to_string(id.index); }

void header(const std::string& command, const std::vector<std::pair<std::string, std::string>>& fields) {
    std::cout << "# morasim " << command << '\n';
    for (const auto& [k, v] : fields) std::cout << "#   " << k << " = " << v << '\n';
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string taskset;
    std::string actual;
    std::string model;
    std::string policy = "mora";
    std::string priority = "edf";
    std::string rem_model = "actual";
    std::string horizon;
    std::size_t m = 0;
    std::string trace_json;
    std::string trace_csv;
    std::string energy_json;
    std::string gantt;
    bool no_invariants = false;
    bool keep_going = false;
    bool no_reference = false;
    std::size_t show = 200;
};

int cmd_simulate(const SimulateArgs& a) {
    const ModelChoice mc = resolve_model(a.model);
    const TaskSet tasks = load_taskset(a.taskset);
    SimConfig config;
    config.policy = parse_policy(a.policy);
    config.priority = parse_priority_order(a.priority);
    config.remaining = parse_remaining_model(a.rem_model);
    config.check_invariants = !a.no_invariants;
    config.fail_fast = !a.keep_going;

    std::string sizing = "given";
    if (a.m > 0) {
        config.processors = a.m;
    } else {
        const SizingResult s = size_platform(tasks);
        config.processors = s.m;
        sizing = s.test_used;
    }
    const Time horizon = a.horizon.empty() ? hyperperiod(tasks) * 100 : Rational::parse(a.horizon);
    if (horizon.sign() <= 0) throw UsageError("--horizon must be positive");
    config.horizon = horizon;
    const auto releases = a.actual.empty() ? wcet_releases(tasks, horizon) : load_actual_times(a.actual, tasks, horizon);

    header("simulate", {{"taskset", a.taskset},
                        {"actual", a.actual.empty() ? "WCET for every job" : a.actual},
                        {"model", mc.origin},
                        {"policy", config.policy.label()},
                        {"priority", to_string(config.priority)},
                        {"rem-model", to_string(config.remaining)},
                        {"processors", std::to_string(config.processors) + " (" + sizing + ")"},
                        {"horizon", horizon.str()},
                        {"jobs", std::to_string(releases.size())}});

    if (config.policy.kind() != PolicyKind::Max) {
        const bool ok = validate_offline_speeds(tasks, config.policy.task_speeds(tasks), config.processors, mc.model);
        if (!ok)
            std::cout << "warning: the offline speeds do not pass the density test on " << config.processors
                      << " processor(s); deadlines are not guaranteed\n";
    }

    SimResult result;
    try {
        result = simulate(tasks, releases, config, mc.model);
    } catch (const DeadlineMissError& e) {
        std::cerr << "deadline miss: " << e.what() << '\n';
        return kFailed;
    } catch (const InvariantViolationError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return kFailed;
    }

    if (!a.no_reference && config.policy.kind() != PolicyKind::Max) {
        SimConfig ref = config;
        ref.policy = Policy::max();
        ref.record_events = false;
        ref.check_invariants = false;
        ref.fail_fast = false;
        const SimResult max_run = simulate(tasks, releases, ref, mc.model);
        result.energy.normalized_pct = normalized_pct(result.energy, max_run.energy);
    }

    for (const auto& w : result.trace.warnings) std::cout << "warning: " << w << '\n';

    const auto merged = merge_intervals(result.trace.intervals);
    std::cout << "schedule (" << merged.size() << " intervals):\n";
    std::size_t shown = 0;
    for (const auto& iv : merged) {
        if (shown++ == a.show) {
            std::cout << "  ... (use --trace-json for the full schedule)\n";
            break;
        }
        std::cout << "  P" << iv.proc + 1 << "  " << job_label(iv.job) << "  [" << iv.start << ", " << iv.end
                  << "]  @" << iv.speed.decimal(2) << '\n';
    }
    std::size_t met = 0;
    std::size_t pending = 0;
    for (const auto& j : result.trace.jobs) {
        if (!j.completion) ++pending;
        else if (*j.completion <= j.deadline) ++met;
    }
    std::cout << "jobs: " << result.trace.jobs.size() << " released, " << met << " met their deadline, " << pending
              << " still running at the horizon\n";
    const EnergyReport& e = result.energy;
    std::cout << "energy (uJ): total " << e.total << " = " << e.total.decimal(6) << "  (busy " << e.busy.decimal(6)
              << ", idle " << e.idle.decimal(6) << ")\n";
    if (e.normalized_pct)
        std::cout << "normalized vs MAX: " << e.normalized_pct->decimal(6) << "% (" << *e.normalized_pct << ")\n";

    if (!a.trace_json.empty()) write_file(a.trace_json, trace_to_json(result.trace, &result.energy));
    if (!a.trace_csv.empty()) write_file(a.trace_csv, trace_to_csv(result.trace));
    if (!a.energy_json.empty()) write_file(a.energy_json, energy_to_json(result.energy));
    if (!a.gantt.empty()) write_file(a.gantt, gantt_svg(result.trace));

    if (!result.trace.violations.empty()) {
        std::cout << result.trace.violations.size() << " violation(s):\n";
        for (const auto& v : result.trace.violations)
            std::cout << "  " << to_string(v.kind) << " " << job_label(v.job) << " at " << v.time << ": " << v.detail
                      << '\n';
        return kFailed;
    }
    return kOk;
}

// -------------------------------------------------------------- experiment

struct ExperimentArgs {
    std::string dmax = "0.1,0.4,0.7,1";
    std::string policies = "mora";
    std::string max_density = "3";
    std::string band_width = "0.05";
    std::string periods = "10,20,40,50,80,100";
    std::string model;
    std::string priority = "edf";
    std::size_t sets = 20;
    std::int64_t hyperperiods = 5;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out_dir = "results";
    bool svg = false;
    bool check_invariants = false;
    bool progress = false;
};

int cmd_experiment(const ExperimentArgs& a) {
    const ModelChoice mc = resolve_model(a.model);
    ExperimentConfig config;
    config.d_max = parse_list(a.dmax);
    config.policies = split(a.policies);
    config.max_density = Rational::parse(a.max_density);
    config.band_width = Rational::parse(a.band_width);
    config.period_pool = parse_list(a.periods);
    config.priority = parse_priority_order(a.priority);
    config.sets_per_band = a.sets;
    config.hyperperiods = a.hyperperiods;
    config.seed = a.seed;
    config.threads = a.threads;
    config.check_invariants = a.check_invariants;
    try {
        validate_config(config);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const auto bands = density_bands(config);
    header("experiment", {{"dmax", a.dmax},
                          {"policies", a.policies},
                          {"bands", std::to_string(bands.size()) + " x width " + a.band_width + " up to " + a.max_density},
                          {"sets-per-band", std::to_string(a.sets)},
                          {"hyperperiods", std::to_string(a.hyperperiods)},
                          {"periods", a.periods},
                          {"model", mc.origin},
                          {"priority", a.priority},
                          {"seed", std::to_string(a.seed)},
                          {"threads", std::to_string(a.threads)},
                          {"out-dir", a.out_dir}});

    ProgressFn progress;
    if (a.progress)
        progress = [](std::size_t done, std::size_t total) {
            if (done % 50 == 0 || done == total) std::cerr << "\r" << done << "/" << total << std::flush;
            if (done == total) std::cerr << '\n';
        };
    const ExperimentResult result = run_experiment(config, mc.model, progress);

    const fs::path dir(a.out_dir);
    write_file(dir / "consumption.csv", consumption_csv(config, result));
    write_file(dir / "ratio.csv", ratio_csv(result));
    write_file(dir / "runs.csv", runs_csv(config, result));
    if (a.svg) {
        write_file(dir / "consumption.svg", consumption_svg(config, result));
        write_file(dir / "ratio.svg", ratio_svg(result));
    }

    std::cout << consumption_csv(config, result) << '\n' << ratio_csv(result);
    if (result.failures > 0) {
        std::cout << result.failures << " of " << result.runs.size() << " run(s) failed:\n";
        std::size_t shown = 0;
        for (const auto& r : result.runs) {
            if (r.error.empty()) continue;
            if (shown++ == 10) {
                std::cout << "  ... see runs.csv\n";
                break;
            }
            std::cout << "  Dmax " << r.d_max.decimal(2) << " band " << r.band_low.decimal(2) << " set " << r.set
                      << " seed " << r.seed << ": " << r.error << '\n';
        }
        return kFailed;
    }
    return kOk;
}

// ------------------------------------------------------------------- gantt

int cmd_gantt(const std::string& trace_path, const std::string& out) {
    const SimTrace trace = load_trace(trace_path);
    header("gantt", {{"trace", trace_path}, {"out", out}});
    write_file(out, gantt_svg(trace));
    std::cout << "wrote " << 2 * trace.processors << " lanes (" << trace.offline_intervals.size() << " offline, "
              << trace.intervals.size() << " actual intervals) to " << out << '\n';
    return kOk;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
    std::string taskset;
    std::string model;
    std::string policy = "mora";
    std::string priority = "edf";
    std::string rem_model = "actual";
    std::size_t runs = 200;
    std::uint64_t seed = 1;
    std::size_t max_tasks = 8;
    std::size_t max_processors = 4;
    std::int64_t hyperperiods = 2;
    std::size_t m = 0;
    std::vector<std::string> faults;
};

int cmd_validate(const ValidateArgs& a) {
    const ModelChoice mc = resolve_model(a.model);
    SimConfig base;
    base.policy = parse_policy(a.policy);
    base.priority = parse_priority_order(a.priority);
    base.remaining = parse_remaining_model(a.rem_model);
    base.fail_fast = false;
    base.record_events = false;
    for (const auto& f : a.faults) {
        if (f == "skip-rule1-preemption") base.faults.skip_rule1_preemption = true;
        else throw UsageError("unknown fault '" + f + "'");
    }
    std::optional<TaskSet> fixed;
    if (!a.taskset.empty()) fixed = load_taskset(a.taskset);

    header("validate", {{"taskset", fixed ? a.taskset : "random (n <= " + std::to_string(a.max_tasks) + ", m <= " +
                                                            std::to_string(a.max_processors) + ")"},
                        {"model", mc.origin},
                        {"policy", base.policy.label()},
                        {"priority", to_string(base.priority)},
                        {"rem-model", to_string(base.remaining)},
                        {"runs", std::to_string(a.runs)},
                        {"seed", std::to_string(a.seed)},
                        {"hyperperiods", std::to_string(a.hyperperiods)},
                        {"faults", a.faults.empty() ? "none" : a.faults.front()}});

    std::map<InvariantKind, std::size_t> counts;
    for (auto k : {InvariantKind::RemainingWithinOffline, InvariantKind::OfflineRunningActualWaiting,
                   InvariantKind::Rule2WhileOfflineRunning, InvariantKind::ProgressConservation,
                   InvariantKind::DeadlineMiss})
        counts[k] = 0;
    std::vector<std::uint64_t> bad_seeds;
    std::size_t errors = 0;
    for (std::size_t i = 0; i < a.runs; ++i) {
        const std::uint64_t seed = a.seed + i;
        TaskSet tasks;
        std::vector<JobRelease> releases;
        SimConfig config = base;
        if (fixed) {
            tasks = *fixed;
            config.processors = a.m > 0 ? a.m : size_platform(tasks).m;
            config.horizon = hyperperiod(tasks) * a.hyperperiods;
            releases = generate_actual_times(tasks, *config.horizon, seed);
        } else {
            RandomInstance inst = random_instance(seed, a.max_tasks, a.max_processors, a.hyperperiods);
            tasks = std::move(inst.tasks);
            releases = std::move(inst.releases);
            config.processors = inst.processors;
            config.horizon = inst.horizon;
        }
        try {
            const SimResult r = simulate(tasks, releases, config, mc.model);
            for (const auto& v : r.trace.violations) ++counts[v.kind];
            if (!r.trace.violations.empty()) bad_seeds.push_back(seed);
        } catch (const std::exception& e) {
            ++errors;
            bad_seeds.push_back(seed);
            std::cout << "seed " << seed << ": " << e.what() << '\n';
        }
    }
    std::cout << "runs: " << a.runs << '\n';
    for (const auto& [k, n] : counts) std::cout << "  " << to_string(k) << ": " << n << '\n';
    if (errors) std::cout << "  errors: " << errors << '\n';
    if (bad_seeds.empty()) {
        std::cout << "no violations\n";
        return kOk;
    }
    std::cout << bad_seeds.size() << " failing run(s); reproduce with --runs 1 --seed <seed>:";
    for (std::size_t i = 0; i < bad_seeds.size() && i < 20; ++i) std::cout << ' ' << bad_seeds[i];
    std::cout << (bad_seeds.size() > 20 ? " ...\n" : "\n");
    return kFailed;
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
    std::string band = "1";
    std::string dmax = "0.4";
    std::string periods = "10,20,40,50,80,100";
    std::uint64_t seed = 1;
    std::string out;
    std::string actual_out;
    std::int64_t hyperperiods = 1;
    bool reject = false;
};

int cmd_generate(const GenerateArgs& a) {
    GenSpec spec;
    spec.band_low = Rational::parse(a.band);
    spec.d_max = Rational::parse(a.dmax);
    spec.period_pool = parse_list(a.periods);
    spec.seed = a.seed;
    spec.overshoot = a.reject ? OvershootPolicy::Reject : OvershootPolicy::Clamp;
    try {
        validate_spec(spec);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
    const TaskSet tasks = generate_taskset(spec);
    const std::string json = taskset_to_json(tasks);
    if (a.out.empty()) std::cout << json;
    else write_file(a.out, json);
    if (!a.actual_out.empty()) {
        const auto releases = generate_actual_times(tasks, hyperperiod(tasks) * a.hyperperiods, a.seed);
        write_file(a.actual_out, actual_times_to_json(releases));
    }
    const DensityStats stats = density_stats(tasks);
    std::cerr << tasks.size() << " tasks, density sum " << stats.sum.decimal(3) << ", hyperperiod "
              << hyperperiod(tasks) << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for slack-reclaiming DVFS on global multiprocessor schedules"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run one simulation and report schedule and energy");
    s->add_option("--taskset", sim.taskset, "Task-set JSON")->required();
    s->add_option("--actual", sim.actual, "Actual execution times JSON (default: every job at its WCET)");
    s->add_option("--model", sim.model, "Processor model JSON (default: $MORASIM_MODEL or built-in xscale)");
    s->add_option("--policy", sim.policy, "max | mora | mora:<s_off> | const:<s>");
    s->add_option("--m", sim.m, "Processor count (default: smallest passing the density test, at most n)");
    s->add_option("--priority", sim.priority, "edf | dm");
    s->add_option("--horizon", sim.horizon, "Simulated time (default: 100 hyperperiods)");
    s->add_option("--rem-model", sim.rem_model, "Remaining time seen by the rules: actual | wcet");
    s->add_option("--trace-json", sim.trace_json, "Write the full trace as JSON");
    s->add_option("--trace-csv", sim.trace_csv, "Write the actual intervals as CSV");
    s->add_option("--energy-json", sim.energy_json, "Write the energy report as JSON");
    s->add_option("--gantt", sim.gantt, "Write a Gantt chart SVG");
    s->add_option("--show", sim.show, "Maximum number of intervals printed");
    s->add_flag("--no-invariants", sim.no_invariants, "Skip the per-event invariant checks");
    s->add_flag("--keep-going", sim.keep_going, "Record misses and violations instead of stopping");
    s->add_flag("--no-reference", sim.no_reference, "Skip the MAX reference run");

    ExperimentArgs ex;
    auto* e = app.add_subcommand("experiment", "Sweep D_max and density bands, MAX vs the listed policies");
    e->add_option("--dmax", ex.dmax, "Comma-separated D_max values");
    e->add_option("--policies", ex.policies, "Comma-separated policies compared with MAX");
    e->add_option("--max-density", ex.max_density, "Upper end of the last density band");
    e->add_option("--band-width", ex.band_width, "Width of each density band");
    e->add_option("--periods", ex.periods, "Comma-separated period pool");
    e->add_option("--sets-per-band", ex.sets, "Task sets per band");
    e->add_option("--hyperperiods", ex.hyperperiods, "Hyperperiods simulated per set");
    e->add_option("--model", ex.model, "Processor model JSON");
    e->add_option("--priority", ex.priority, "edf | dm");
    e->add_option("--seed", ex.seed, "Master seed");
    e->add_option("--threads", ex.threads, "Worker threads");
    e->add_option("--out-dir", ex.out_dir, "Directory for the CSV (and SVG) outputs");
    e->add_flag("--svg", ex.svg, "Also write line charts");
    e->add_flag("--check-invariants", ex.check_invariants, "Run the invariant checks in every simulation");
    e->add_flag("--progress", ex.progress, "Print progress to stderr");

    std::string trace_path;
    std::string gantt_out;
    auto* g = app.add_subcommand("gantt", "Render a trace JSON as an SVG Gantt chart");
    g->add_option("--trace", trace_path, "Trace JSON written by simulate --trace-json")->required();
    g->add_option("--out", gantt_out, "Output SVG")->required();

    ValidateArgs va;
    auto* v = app.add_subcommand("validate", "Fuzz random instances with the invariant checks on");
    v->add_option("--taskset", va.taskset, "Fuzz actual times of this task set instead of random task sets");
    v->add_option("--model", va.model, "Processor model JSON");
    v->add_option("--policy", va.policy, "mora | mora:<s_off>");
    v->add_option("--priority", va.priority, "edf | dm");
    v->add_option("--rem-model", va.rem_model, "actual | wcet");
    v->add_option("--runs", va.runs, "Number of instances");
    v->add_option("--seed", va.seed, "Seed of the first instance (run i uses seed + i)");
    v->add_option("--max-tasks", va.max_tasks, "Largest random task count");
    v->add_option("--max-processors", va.max_processors, "Largest processor count");
    v->add_option("--hyperperiods", va.hyperperiods, "Hyperperiods per instance");
    v->add_option("--m", va.m, "Processor count for --taskset (default: density sizing)");
    v->add_option("--fault", va.faults, "Inject a fault: skip-rule1-preemption");

    GenerateArgs ga;
    auto* gen = app.add_subcommand("generate", "Generate a random task set");
    gen->add_option("--band", ga.band, "Lower end d of the density band [d, d+0.05]");
    gen->add_option("--dmax", ga.dmax, "Per-task density cap");
    gen->add_option("--periods", ga.periods, "Comma-separated period pool");
    gen->add_option("--seed", ga.seed, "Seed");
    gen->add_option("--out", ga.out, "Output task-set JSON (default: stdout)");
    gen->add_option("--actual-out", ga.actual_out, "Also write random actual times");
    gen->add_option("--hyperperiods", ga.hyperperiods, "Hyperperiods covered by --actual-out");
    gen->add_flag("--reject", ga.reject, "Reject overshooting sets instead of clamping the last draw");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForAllHelp& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return kUsage;
    }

    try {
        if (s->parsed()) return cmd_simulate(sim);
        if (e->parsed()) return cmd_experiment(ex);
        if (g->parsed()) return cmd_gantt(trace_path, gantt_out);
        if (v->parsed()) return cmd_validate(va);
        if (gen->parsed()) return cmd_generate(ga);
    } catch (const DeadlineMissError& err) {
        std::cerr << "deadline miss: " << err.what() << '\n';
        return kFailed;
    } catch (const InvariantViolationError& err) {
        std::cerr << "invariant violation: " << err.what() << '\n';
        return kFailed;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

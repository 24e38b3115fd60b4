#include "morasim/experiment.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "morasim/schedtest.hpp"
#include "morasim/svg.hpp"
#include "morasim/workload.hpp"

namespace morasim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string trim_decimal(const Rational& r) {
    std::string s = r.decimal(6);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string fixed(double v) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << v;
    return out.str();
}

}  // namespace

Policy parse_policy(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    if (colon == std::string::npos) {
        if (head == "max") return Policy::max();
        if (head == "mora") return Policy::mora();
        if (head == "const") throw Error("policy 'const' needs a speed, e.g. const:0.6");
    } else {
        const Speed s = Rational::parse(text.substr(colon + 1));
        if (head == "const") return Policy::constant(s);
        if (head == "mora") return Policy::mora(s);
    }
    throw Error("unknown policy '" + text + "' (expected max, mora, mora:<s_off> or const:<s>)");
}

void validate_config(const ExperimentConfig& config) {
    if (config.sets_per_band < 1) throw Error("sets per band must be at least 1");
    if (config.hyperperiods < 1) throw Error("hyperperiods must be at least 1");
    if (config.d_max.empty()) throw Error("no D_max values");
    for (std::size_t i = 0; i < config.d_max.size(); ++i) {
        if (config.d_max[i] < Rational(1, 100) || Rational(1) < config.d_max[i])
            throw Error("D_max " + config.d_max[i].str() + " outside [0.01, 1]");
        if (i > 0 && !(config.d_max[i - 1] < config.d_max[i])) throw Error("D_max values must be increasing");
    }
    if (config.band_width.sign() <= 0) throw Error("band width must be positive");
    if (config.max_density < config.band_width) throw Error("max density is below one band");
    if (config.period_pool.empty()) throw Error("empty period pool");
    for (const auto& p : config.policies) {
        if (parse_policy(p).kind() == PolicyKind::Max) throw Error("MAX is the reference; do not list it as a policy");
    }
}

std::vector<Rational> density_bands(const ExperimentConfig& config) {
    std::vector<Rational> bands;
    for (Rational d = 0; !(config.max_density < d + config.band_width); d += config.band_width) bands.push_back(d);
    return bands;
}

std::uint64_t cell_seed(std::uint64_t master, std::size_t dmax_index, std::size_t band_index, std::size_t set_index) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ dmax_index);
    h = splitmix64(h ^ band_index);
    return splitmix64(h ^ set_index);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ProcessorModel& model,
                                const ProgressFn& progress) {
    validate_config(config);
    const std::vector<Rational> bands = density_bands(config);
    std::vector<Policy> policies;
    for (const auto& p : config.policies) policies.push_back(parse_policy(p));

    struct Cell {
        std::size_t dmax;
        std::size_t band;
        std::size_t set;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < config.d_max.size(); ++i)
        for (std::size_t b = 0; b < bands.size(); ++b)
            for (std::size_t s = 0; s < config.sets_per_band; ++s) cells.push_back({i, b, s});

    ExperimentResult result;
    result.runs.resize(cells.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto work = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++) {
            const Cell& c = cells[k];
            RunRecord& rec = result.runs[k];
            rec.d_max = config.d_max[c.dmax];
            rec.band_low = bands[c.band];
            rec.set = c.set;
            rec.seed = cell_seed(config.seed, c.dmax, c.band, c.set);
            try {
                GenSpec spec;
                spec.band_low = rec.band_low;
                spec.band_width = config.band_width;
                spec.d_max = rec.d_max;
                spec.period_pool = config.period_pool;
                spec.seed = rec.seed;
                const TaskSet tasks = generate_taskset(spec);
                const SizingResult sizing = size_platform(tasks);
                rec.tasks = tasks.size();
                rec.processors = sizing.m;
                rec.sizing_test = sizing.test_used;
                const Time horizon = hyperperiod(tasks) * config.hyperperiods;
                const auto releases = generate_actual_times(tasks, horizon, rec.seed);

                SimConfig sc;
                sc.priority = config.priority;
                sc.processors = sizing.m;
                sc.horizon = horizon;
                sc.record_events = false;
                sc.check_invariants = config.check_invariants;
                sc.policy = Policy::max();
                const SimResult ref = simulate(tasks, releases, sc, model);
                rec.max_energy = ref.energy.total;
                for (const auto& policy : policies) {
                    sc.policy = policy;
                    const SimResult r = simulate(tasks, releases, sc, model);
                    rec.pct.push_back(normalized_pct(r.energy, ref.energy));
                }
            } catch (const std::exception& e) {
                rec.error = e.what();
                rec.pct.clear();
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(d, cells.size());
            }
        }
    };

    const unsigned threads = std::max(1u, config.threads);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < config.d_max.size(); ++i) {
        DmaxSummary s;
        s.d_max = config.d_max[i];
        std::vector<std::vector<double>> pcts(policies.size());
        double ratio_sum = 0;
        for (const auto& rec : result.runs) {
            if (rec.d_max != s.d_max) continue;
            if (!rec.error.empty()) continue;
            ++s.n_sets;
            ratio_sum += static_cast<double>(rec.processors) / static_cast<double>(rec.tasks);
            for (std::size_t p = 0; p < policies.size(); ++p) pcts[p].push_back(rec.pct[p].to_double());
        }
        s.mean_m_over_n = s.n_sets ? ratio_sum / static_cast<double>(s.n_sets) : 0.0;
        for (std::size_t p = 0; p < policies.size(); ++p) {
            PolicySummary ps;
            ps.policy = config.policies[p];
            ps.n_sets = pcts[p].size();
            double sum = 0;
            for (double v : pcts[p]) sum += v;
            ps.mean_pct = ps.n_sets ? sum / static_cast<double>(ps.n_sets) : 0.0;
            double sq = 0;
            for (double v : pcts[p]) sq += (v - ps.mean_pct) * (v - ps.mean_pct);
            ps.stddev_pct = ps.n_sets > 1 ? std::sqrt(sq / static_cast<double>(ps.n_sets - 1)) : 0.0;
            s.policies.push_back(std::move(ps));
        }
        result.summary.push_back(std::move(s));
    }
    for (const auto& rec : result.runs)
        if (!rec.error.empty()) ++result.failures;
    return result;
}

std::string consumption_csv(const ExperimentConfig& config, const ExperimentResult& result) {
    std::ostringstream out;
    out << "Dmax,policy,mean_pct,stddev_pct,n_sets\n";
    for (const auto& s : result.summary) {
        out << trim_decimal(s.d_max) << ",max,100,0," << s.n_sets << '\n';
        for (std::size_t p = 0; p < s.policies.size(); ++p) {
            const auto& ps = s.policies[p];
            out << trim_decimal(s.d_max) << ',' << config.policies[p] << ',' << fixed(ps.mean_pct) << ','
                << fixed(ps.stddev_pct) << ',' << ps.n_sets << '\n';
        }
    }
    return out.str();
}

std::string ratio_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "Dmax,mean_m_over_n\n";
    for (const auto& s : result.summary) out << trim_decimal(s.d_max) << ',' << fixed(s.mean_m_over_n) << '\n';
    return out.str();
}

std::string runs_csv(const ExperimentConfig& config, const ExperimentResult& result) {
    std::ostringstream out;
    out << "Dmax,band_low,set,seed,n,m,sizing,max_energy";
    for (const auto& p : config.policies) out << ",pct_" << p;
    out << ",error\n";
    for (const auto& r : result.runs) {
        out << trim_decimal(r.d_max) << ',' << trim_decimal(r.band_low) << ',' << r.set << ',' << r.seed << ','
            << r.tasks << ',' << r.processors << ',' << r.sizing_test << ',' << r.max_energy.decimal(3);
        for (std::size_t p = 0; p < config.policies.size(); ++p)
            out << ',' << (p < r.pct.size() ? r.pct[p].decimal(6) : std::string());
        std::string err = r.error;
        for (char& ch : err)
            if (ch == ',' || ch == '\n') ch = ';';
        out << ',' << err << '\n';
    }
    return out.str();
}

std::string consumption_svg(const ExperimentConfig& config, const ExperimentResult& result) {
    std::vector<ChartSeries> series;
    ChartSeries max{"max", {}};
    for (const auto& s : result.summary) max.points.emplace_back(s.d_max.to_double(), 100.0);
    series.push_back(std::move(max));
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        ChartSeries cs{config.policies[p], {}};
        for (const auto& s : result.summary) cs.points.emplace_back(s.d_max.to_double(), s.policies[p].mean_pct);
        series.push_back(std::move(cs));
    }
    return line_chart_svg("Average normalized consumption", "D_max", "energy (% of MAX)", series);
}

std::string ratio_svg(const ExperimentResult& result) {
    ChartSeries cs{"m/n", {}};
    for (const auto& s : result.summary) cs.points.emplace_back(s.d_max.to_double(), s.mean_m_over_n);
    return line_chart_svg("Processors per task", "D_max", "mean m/n", {cs});
}

}  // namespace morasim

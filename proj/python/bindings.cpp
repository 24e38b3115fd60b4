#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "morasim/engine.hpp"
#include "morasim/experiment.hpp"
#include "morasim/io.hpp"
#include "morasim/mirror.hpp"
#include "morasim/schedtest.hpp"
#include "morasim/svg.hpp"
#include "morasim/workload.hpp"

namespace py = pybind11;
using namespace morasim;

// Rational <-> fractions.Fraction. Python ints and decimal strings are
// accepted on the way in; floats are refused so nothing inexact sneaks in.
namespace pybind11::detail {
template <>
struct type_caster<Rational> {
    PYBIND11_TYPE_CASTER(Rational, const_name("fractions.Fraction"));

    bool load(handle src, bool) {
        if (!src || PyFloat_Check(src.ptr())) return false;
        try {
            if (PyLong_Check(src.ptr())) {
                value = Rational::parse(py::str(src).cast<std::string>());
                return true;
            }
            if (PyUnicode_Check(src.ptr())) {
                value = Rational::parse(src.cast<std::string>());
                return true;
            }
            py::object fraction = py::module_::import("fractions").attr("Fraction");
            if (py::isinstance(src, fraction)) {
                const std::string num = py::str(src.attr("numerator")).cast<std::string>();
                const std::string den = py::str(src.attr("denominator")).cast<std::string>();
                value = Rational::parse(num + "/" + den);
                return true;
            }
        } catch (const std::exception&) {
            return false;
        }
        return false;
    }

    static handle cast(const Rational& r, return_value_policy, handle) {
        py::object fraction = py::module_::import("fractions").attr("Fraction");
        std::ostringstream num;
        std::ostringstream den;
        num << r.numerator();
        den << r.denominator();
        py::object n = py::reinterpret_steal<py::object>(PyLong_FromString(num.str().c_str(), nullptr, 10));
        py::object d = py::reinterpret_steal<py::object>(PyLong_FromString(den.str().c_str(), nullptr, 10));
        return fraction(n, d).release();
    }
};
}  // namespace pybind11::detail

namespace {

py::dict interval_dict(const Interval& iv) {
    py::dict d;
    d["proc"] = iv.proc + 1;
    d["task"] = iv.job.task;
    d["job"] = iv.job.index;
    d["speed"] = iv.speed;
    d["start"] = iv.start;
    d["end"] = iv.end;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Exact discrete-event simulator for slack-reclaiming DVFS on global multiprocessor schedules";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<InvariantViolationError>(m, "InvariantViolationError", base.ptr());
    py::register_exception<DeadlineMissError>(m, "DeadlineMissError", base.ptr());

    py::class_<SpeedLevel>(m, "SpeedLevel")
        .def_readonly("frequency_mhz", &SpeedLevel::frequency_mhz)
        .def_readonly("speed", &SpeedLevel::speed)
        .def_readonly("power_mw", &SpeedLevel::power_mw);

    py::class_<ProcessorModel>(m, "ProcessorModel")
        .def_static("xscale", &ProcessorModel::xscale)
        .def_static("load", [](const std::string& path) { return load_model(path); })
        .def_static("from_json", [](const std::string& text) { return parse_model(text); })
        .def_property_readonly("name", &ProcessorModel::name)
        .def_property_readonly("idle_power", &ProcessorModel::idle_power)
        .def_property_readonly("levels",
                               [](const ProcessorModel& pm) {
                                   return std::vector<SpeedLevel>(pm.levels().begin(), pm.levels().end());
                               })
        .def("power", &ProcessorModel::power)
        .def("to_json", &model_to_json);

    py::class_<Task>(m, "Task")
        .def(py::init([](TaskId id, Rational c, Rational d, Rational t, Rational e) {
                 Task task{id, c, d, t, e};
                 validate_task(task);
                 return task;
             }),
             py::arg("id"), py::arg("C"), py::arg("D"), py::arg("T"), py::arg("e") = Rational(1))
        .def_readonly("id", &Task::id)
        .def_readonly("C", &Task::wcet)
        .def_readonly("D", &Task::deadline)
        .def_readonly("T", &Task::period)
        .def_readonly("e", &Task::energy_factor)
        .def("__repr__", [](const Task& t) {
            return "Task(id=" + std::to_string(t.id) + ", C=" + t.wcet.str() + ", D=" + t.deadline.str() +
                   ", T=" + t.period.str() + ", e=" + t.energy_factor.str() + ")";
        });

    py::class_<JobRelease>(m, "JobRelease")
        .def(py::init([](TaskId task, std::int64_t job, Rational arrival, Rational actual) {
                 return JobRelease{{task, job}, arrival, actual};
             }),
             py::arg("task"), py::arg("job"), py::arg("arrival"), py::arg("actual"))
        .def_property_readonly("task", [](const JobRelease& r) { return r.id.task; })
        .def_property_readonly("job", [](const JobRelease& r) { return r.id.index; })
        .def_readonly("arrival", &JobRelease::arrival)
        .def_readonly("actual", &JobRelease::actual_exec);

    m.def("quantize_speed", &quantize_speed, py::arg("s"), py::arg("model") = ProcessorModel::xscale());
    m.def("energy", &energy, py::arg("e"), py::arg("duration"), py::arg("speed"),
          py::arg("model") = ProcessorModel::xscale());
    m.def("load_taskset", [](const std::string& path) { return load_taskset(path); });
    m.def("parse_taskset", [](const std::string& text) { return parse_taskset(text); });
    m.def("taskset_to_json", [](const TaskSet& tasks) { return taskset_to_json(tasks); });
    m.def("load_actual_times", [](const std::string& path, const TaskSet& tasks, const Rational& horizon) {
        return load_actual_times(path, tasks, horizon);
    });
    m.def("wcet_releases", [](const TaskSet& tasks, const Rational& horizon) { return wcet_releases(tasks, horizon); });

    m.def("hyperperiod", [](const TaskSet& tasks) { return hyperperiod(tasks); });
    m.def("density_test", [](const TaskSet& tasks, std::size_t procs, const Rational& speed) {
        return density_test(tasks, procs, speed);
    }, py::arg("tasks"), py::arg("m"), py::arg("speed") = Rational(1));
    m.def("min_processors", [](const TaskSet& tasks) { return min_processors(tasks).m; });
    m.def("size_platform", [](const TaskSet& tasks) { return size_platform(tasks).m; });

    m.def(
        "generate_taskset",
        [](const Rational& band, const Rational& d_max, std::uint64_t seed, std::vector<Rational> periods) {
            GenSpec spec;
            spec.band_low = band;
            spec.d_max = d_max;
            spec.seed = seed;
            if (!periods.empty()) spec.period_pool = std::move(periods);
            return generate_taskset(spec);
        },
        py::arg("band"), py::arg("d_max"), py::arg("seed"), py::arg("periods") = std::vector<Rational>{});
    m.def("generate_actual_times", [](const TaskSet& tasks, const Rational& horizon, std::uint64_t seed) {
        return generate_actual_times(tasks, horizon, seed);
    });

    m.def(
        "simulate",
        [](const TaskSet& tasks, std::optional<std::vector<JobRelease>> releases, std::size_t processors,
           const std::string& policy, const std::string& priority, std::optional<Rational> horizon,
           const std::string& rem_model, bool fail_fast, const std::optional<ProcessorModel>& model) {
            SimConfig config;
            config.processors = processors;
            config.policy = parse_policy(policy);
            config.priority = parse_priority_order(priority);
            config.horizon = horizon;
            config.remaining = parse_remaining_model(rem_model);
            config.fail_fast = fail_fast;
            const ProcessorModel pm = model ? *model : ProcessorModel::xscale();
            const Time h = horizon ? *horizon : hyperperiod(tasks) * 100;
            const std::vector<JobRelease> rel = releases ? *releases : wcet_releases(tasks, h);
            SimResult r;
            {
                py::gil_scoped_release release;
                r = simulate(tasks, rel, config, pm);
            }
            py::dict out;
            py::list intervals;
            for (const auto& iv : r.trace.intervals) intervals.append(interval_dict(iv));
            py::list offline;
            for (const auto& iv : r.trace.offline_intervals) offline.append(interval_dict(iv));
            py::dict completions;
            for (const auto& j : r.trace.jobs)
                completions[py::make_tuple(j.id.task, j.id.index)] =
                    j.completion ? py::cast(*j.completion) : py::none();
            py::list violations;
            for (const auto& v : r.trace.violations)
                violations.append(py::make_tuple(to_string(v.kind), v.time, v.job.task, v.job.index, v.detail));
            out["intervals"] = intervals;
            out["offline_intervals"] = offline;
            out["completions"] = completions;
            out["violations"] = violations;
            out["warnings"] = r.trace.warnings;
            out["energy"] = r.energy.total;
            out["busy_energy"] = r.energy.busy;
            out["idle_energy"] = r.energy.idle;
            out["trace_json"] = trace_to_json(r.trace, &r.energy);
            out["gantt_svg"] = gantt_svg(r.trace);
            return out;
        },
        py::arg("tasks"), py::arg("releases") = py::none(), py::arg("m") = 1, py::arg("policy") = "mora",
        py::arg("priority") = "edf", py::arg("horizon") = py::none(), py::arg("rem_model") = "actual",
        py::arg("fail_fast") = true, py::arg("model") = py::none());
}

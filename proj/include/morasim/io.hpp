#ifndef MORASIM_IO_HPP
#define MORASIM_IO_HPP

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morasim/model.hpp"
#include "morasim/trace.hpp"

namespace morasim {

// Malformed input. The message starts with "<source>:" and names the line
// (syntax errors) or the JSON path of the offending field.
class InputError : public Error {
public:
    using Error::Error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// {"name", "f_max", "levels": [{"freq", "speed", "power_mw"}], "idle_power_mw"}
// Numbers may be JSON numbers or decimal/fraction strings ("0.15", "3/20").
ProcessorModel parse_model(const std::string& text, const std::string& source = "<model>");
ProcessorModel load_model(const std::filesystem::path& path);
std::string model_to_json(const ProcessorModel& model);

// [{"id", "C", "D", "T", "e"}]; "e" defaults to 1.
TaskSet parse_taskset(const std::string& text, const std::string& source = "<taskset>");
TaskSet load_taskset(const std::filesystem::path& path);
std::string taskset_to_json(std::span<const Task> tasks);

// {"jobs": [{"task", "job", "actual", "arrival"?}]}
//
// Releases are periodic (k*T, job k+1) below the horizon at their WCET unless
// an entry overrides them. An entry with "arrival" moves that job (or adds it
// when it lies beyond the periodic ones), which is how sporadic patterns are
// written down.
std::vector<JobRelease> parse_actual_times(const std::string& text, std::span<const Task> tasks, const Time& horizon,
                                           const std::string& source = "<actual>");
std::vector<JobRelease> load_actual_times(const std::filesystem::path& path, std::span<const Task> tasks,
                                          const Time& horizon);
std::string actual_times_to_json(std::span<const JobRelease> releases);

// Processors are numbered from 1 in every file format.
std::string trace_to_json(const SimTrace& trace, const EnergyReport* energy = nullptr);
SimTrace parse_trace(const std::string& text, const std::string& source = "<trace>");
SimTrace load_trace(const std::filesystem::path& path);

// proc,task,job,speed_num,speed_den,start,end with one row per actual interval.
std::string trace_to_csv(const SimTrace& trace);

std::string energy_to_json(const EnergyReport& report);

}  // namespace morasim

#endif  // MORASIM_IO_HPP

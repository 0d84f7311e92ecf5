#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toda {

inline constexpr const char* kVersion = "0.1.0";

enum class Task { AlgebraInfo, Seiberg, Correlate, CovarianceTest, WeylTest, GmcStats, Verify };

Task task_from_name(const std::string& name);
std::string task_name(Task task);

struct PhiSpec {
  std::string type = "constant";  // "constant" or "bump"
  double value = 0;
};

// Reproducibility contract: every numeric output outside the "timing"
// sub-object is a pure function of this struct (minus workers/out paths).
struct JobConfig {
  Task task = Task::AlgebraInfo;
  std::string algebra = "A1";
  double gamma = 0.5;
  std::vector<double> mu;  // one entry broadcasts across the rank

  struct InsertionSpec {
    double re = 0, im = 0;
    std::string basis = "root";  // "root" or "weight"
    std::vector<double> coords;
  };
  std::vector<InsertionSpec> insertions;

  int grid_n = 1024;
  std::optional<double> epsilon;
  long replicas = 10000;
  std::uint64_t seed = 1;
  int workers = 0;

  std::optional<std::string> mobius;  // "a,b,c,d"
  std::optional<PhiSpec> phi;
  std::optional<std::string> trace_csv;
  std::optional<std::string> out;

  void validate() const;

  static JobConfig from_json_text(const std::string& text);
  static JobConfig from_file(const std::string& path);
  std::string to_json_text() const;  // canonical echo, no workers/paths
};

// Executes the job and returns the process exit code: 0 success, 2 analytic
// Seiberg rejection (a valid outcome), 1 input or runtime error. The result
// JSON goes to config.out when set, else stdout; json_capture, when given,
// receives a copy.
int run_job(const JobConfig& config, std::string* json_capture = nullptr);

}  // namespace toda

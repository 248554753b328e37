#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

namespace hsm::cli {

using Json = nlohmann::ordered_json;

/// Raised for bad parameters; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string experiment;
  std::optional<int> n;
  std::optional<int> d;
  std::optional<double> eps;
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<int> k;
  std::optional<double> eta;
  std::optional<int> trials;
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
};

/// A config with every parameter resolved.
struct Params {
  int n = 0;
  int d = 0;
  double eps = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  int k = 0;
  double eta = 0.0;
  int trials = 0;
  std::uint64_t seed = 1;
  int workers = 0;

  Json to_json() const;
};

struct Report {
  std::vector<Json> records;
  std::vector<std::pair<std::string, std::string>> summary;
  bool passed = true;
};

struct ExperimentInfo {
  std::string id;
  std::string anchor;
  std::string description;
  Params defaults;
  std::function<Report(const Params&)> run;
};

const std::vector<ExperimentInfo>& catalog();
const ExperimentInfo* find_experiment(const std::string& id);

/// Fills unset fields from the experiment defaults and checks them against module caps.
Params resolve(const ExperimentInfo& info, const Config& cfg);

/// Runs an experiment; throws UsageError for unknown ids or out-of-range parameters.
Report run_experiment(const Config& cfg);

/// Renders the summary as a two-column table.
std::string render_summary(const std::string& id, const Report& r);

/// fn(i) for i in [0, count) on a pool of workers; results land in index order.
template <class T, class F>
std::vector<T> parallel_trials(int count, int workers, F fn) {
  std::vector<T> out(static_cast<std::size_t>(count));
  if (count <= 0) return out;
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, count);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (int i; !failed && (i = next++) < count;) {
      try {
        out[static_cast<std::size_t>(i)] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace hsm::cli

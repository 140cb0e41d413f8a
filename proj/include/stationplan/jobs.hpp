#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "stationplan/json_io.hpp"

namespace stationplan {

enum class JobKind { Optimize, Simulate };
enum class JobState { Queued, Running, Done, Failed };

std::string_view to_string(JobKind k) noexcept;
std::string_view to_string(JobState s) noexcept;

struct JobSnapshot {
  std::string id;
  JobKind kind = JobKind::Optimize;
  JobState state = JobState::Queued;
  double progress = 0.0;
  std::shared_ptr<const Json> result;  // set once Done
  Json error;                          // set once Failed
};

/// Bounded worker pool for long-running jobs.  Jobs sharing a non-empty
/// key run one at a time in submission order; others run as workers free up.
class JobManager {
 public:
  /// Reports progress in [0, 1]; values below the current one are ignored.
  /// Returns false once the manager is shutting down.
  using ProgressSink = std::function<bool(double)>;
  using Task = std::function<Json(const ProgressSink&)>;

  explicit JobManager(int workers);
  ~JobManager();
  JobManager(const JobManager&) = delete;
  JobManager& operator=(const JobManager&) = delete;

  std::string submit(JobKind kind, std::string key, Task task);
  std::optional<JobSnapshot> get(const std::string& id) const;
  /// Blocks until the job is Done or Failed, or the timeout passes.
  bool wait(const std::string& id, std::chrono::milliseconds timeout) const;

 private:
  struct Record {
    JobSnapshot snap;
    std::string key;
    Task task;
  };

  void worker();
  // Requires the lock.  Index into queue_ of the next runnable job.
  std::optional<std::size_t> next_runnable() const;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  std::map<std::string, std::shared_ptr<Record>> jobs_;
  std::deque<std::shared_ptr<Record>> queue_;
  std::set<std::string> running_keys_;
  std::size_t next_id_ = 1;
  bool stopping_ = false;
  std::vector<std::jthread> workers_;
};

Json to_json(const JobSnapshot& s);

}  // namespace stationplan

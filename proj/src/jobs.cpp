#include "stationplan/jobs.hpp"

#include <algorithm>

#include "stationplan/app.hpp"
#include "stationplan/error.hpp"

namespace stationplan {

std::string_view to_string(JobKind k) noexcept {
  return k == JobKind::Optimize ? "optimize" : "simulate";
}

std::string_view to_string(JobState s) noexcept {
  switch (s) {
    case JobState::Queued: return "queued";
    case JobState::Running: return "running";
    case JobState::Done: return "done";
    case JobState::Failed: return "failed";
  }
  return "?";
}

JobManager::JobManager(int workers) {
  if (workers < 1) throw Error(errc::kInvalidArgument, "job manager needs at least one worker");
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker(); });
}

JobManager::~JobManager() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  workers_.clear();  // joins
}

std::string JobManager::submit(JobKind kind, std::string key, Task task) {
  auto rec = std::make_shared<Record>();
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "job-" + std::to_string(next_id_++);
    rec->snap.id = id;
    rec->snap.kind = kind;
    rec->key = std::move(key);
    rec->task = std::move(task);
    jobs_[id] = rec;
    queue_.push_back(rec);
  }
  cv_.notify_all();
  return id;
}

std::optional<JobSnapshot> JobManager::get(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second->snap;
}

bool JobManager::wait(const std::string& id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const auto it = jobs_.find(id);
  if (it == jobs_.end()) return false;
  const auto rec = it->second;
  return cv_.wait_for(lock, timeout, [&] {
    return rec->snap.state == JobState::Done || rec->snap.state == JobState::Failed;
  });
}

std::optional<std::size_t> JobManager::next_runnable() const {
  for (std::size_t i = 0; i < queue_.size(); ++i) {
    const auto& k = queue_[i]->key;
    if (k.empty() || !running_keys_.contains(k)) return i;
  }
  return std::nullopt;
}

void JobManager::worker() {
  for (;;) {
    std::shared_ptr<Record> rec;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || next_runnable().has_value(); });
      if (stopping_) return;
      const std::size_t i = *next_runnable();
      rec = queue_[i];
      queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(i));
      rec->snap.state = JobState::Running;
      if (!rec->key.empty()) running_keys_.insert(rec->key);
    }
    const ProgressSink sink = [this, rec](double p) {
      std::lock_guard lock(mu_);
      rec->snap.progress = std::max(rec->snap.progress, std::clamp(p, 0.0, 1.0));
      return !stopping_;
    };
    std::shared_ptr<const Json> result;
    Json error;
    try {
      result = std::make_shared<const Json>(rec->task(sink));
    } catch (const Error& e) {
      error = error_json(e.code(), e.what())["error"];
    } catch (const std::exception& e) {
      error = error_json("internal", e.what())["error"];
    }
    {
      std::lock_guard lock(mu_);
      if (result) {
        rec->snap.result = std::move(result);
        rec->snap.progress = 1.0;
        rec->snap.state = JobState::Done;
      } else {
        rec->snap.error = std::move(error);
        rec->snap.state = JobState::Failed;
      }
      rec->task = nullptr;
      if (!rec->key.empty()) running_keys_.erase(rec->key);
    }
    cv_.notify_all();
  }
}

Json to_json(const JobSnapshot& s) {
  Json j{{"id", s.id}, {"kind", to_string(s.kind)}, {"state", to_string(s.state)}, {"progress", s.progress}};
  if (s.state == JobState::Done) {
    j["result_ref"] = s.kind == JobKind::Optimize ? "/api/solutions/" + s.id + "/pareto" : "/api/jobs/" + s.id + "/result";
  } else {
    j["result_ref"] = nullptr;
  }
  j["error"] = s.state == JobState::Failed ? s.error : Json(nullptr);
  return j;
}

}  // namespace stationplan

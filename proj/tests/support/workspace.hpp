#pragma once

// Writes fixture records to a scratch directory and builds configs over them.

#include <atomic>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unistd.h>

#include "stationplan/app.hpp"
#include "support/replay.hpp"

namespace stationplan::testing {

class ScratchDir {
 public:
  ScratchDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("stationplan-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline AppConfig write_dataset(const ScratchDir& dir, std::span<const FireRecord> fires,
                               std::span<const Station> stations) {
  {
    std::ofstream out(dir / "fires.csv");
    write_fire_records(out, fires);
  }
  {
    std::ofstream out(dir / "stations.csv");
    write_stations(out, stations);
  }
  AppConfig cfg;
  cfg.fires_csv = dir / "fires.csv";
  cfg.stations_csv = dir / "stations.csv";
  cfg.cell_size_km = 2.0;
  cfg.workers = 2;
  return cfg;
}

inline std::filesystem::path demo_config_path() {
  return std::filesystem::path(STATIONPLAN_SOURCE_DIR) / "data" / "demo" / "config.json";
}

}  // namespace stationplan::testing

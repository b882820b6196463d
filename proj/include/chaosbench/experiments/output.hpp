#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <string>
#include <vector>

#include "chaosbench/core/io.hpp"

#ifndef CHAOSBENCH_VERSION
#define CHAOSBENCH_VERSION "0.1.0"
#endif

namespace chaosbench {

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// One run directory. Result files are pure functions of the configuration;
/// only manifest.json carries wall-clock data.
class RunOutput {
 public:
  RunOutput(std::filesystem::path dir, json config) : dir_(std::move(dir)), config_(std::move(config)) {
    started_ = utc_timestamp();
    t0_ = clock::now();
    stage_t0_ = t0_;
  }

  const std::filesystem::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& content) const { write_file_atomic(dir_ / name, content); }
  void write_json(const std::string& name, const json& j) const { write(name, j.dump(2) + "\n"); }

  // Close the current stage and name it.
  void stage(const std::string& name) {
    const auto now = clock::now();
    stages_.push_back({name, std::chrono::duration<double>(now - stage_t0_).count()});
    stage_t0_ = now;
  }

  void warn(const std::string& w) { warnings_.push_back(w); }
  void warn(const std::vector<std::string>& ws) { warnings_.insert(warnings_.end(), ws.begin(), ws.end()); }

  void finish(const std::string& status) const {
    json stages = json::array();
    for (const auto& [n, s] : stages_) stages.push_back({{"stage", n}, {"seconds", s}});
    json m{{"version", CHAOSBENCH_VERSION},
           {"status", status},
           {"started", started_},
           {"finished", utc_timestamp()},
           {"wall_seconds", std::chrono::duration<double>(clock::now() - t0_).count()},
           {"stages", stages},
           {"warnings", warnings_},
           {"config", config_}};
    write_json("manifest.json", m);
  }

 private:
  using clock = std::chrono::steady_clock;
  std::filesystem::path dir_;
  json config_;
  std::string started_;
  clock::time_point t0_, stage_t0_;
  std::vector<std::pair<std::string, double>> stages_;
  std::vector<std::string> warnings_;
};

}  // namespace chaosbench

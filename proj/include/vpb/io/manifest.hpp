#pragma once

#include "vpb/io/config.hpp"
#include "vpb/io/csv.hpp"

#include <json.hpp>

#include <chrono>
#include <string>
#include <vector>

namespace vpb::io {

using Json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

void write_report(const Json& report, const std::string& path);

struct EmittedFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

// Writes artifacts into one output directory and keeps the list that the
// manifest hashes.
class RunArtifacts {
 public:
  RunArtifacts(std::string out_dir, std::string subcommand, ScenarioConfig config);

  const std::string& dir() const { return dir_; }
  std::string path(const std::string& name) const;

  void write_csv(const std::string& name, const TimeSeries& series);
  void write_json(const std::string& name, const Json& doc);

  // failure.json record for non-zero exits.
  void write_failure(int exit_code, const std::string& kind, const std::string& message);

  // manifest.json: subcommand, config echo, code version, timestamps, and
  // every emitted file with its SHA-256.
  void finalize(int exit_code);

  const std::vector<EmittedFile>& files() const { return files_; }

 private:
  void record(const std::string& name);

  std::string dir_;
  std::string subcommand_;
  ScenarioConfig config_;
  std::chrono::system_clock::time_point started_;
  std::vector<EmittedFile> files_;
};

std::string code_version();

}  // namespace vpb::io

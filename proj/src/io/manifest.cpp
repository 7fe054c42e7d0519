#include "vpb/io/manifest.hpp"

#include <openssl/evp.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace vpb::io {

namespace fs = std::filesystem;

namespace {

std::string iso8601(std::chrono::system_clock::time_point tp) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing: " + std::strerror(errno));
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed: " + std::strerror(errno));
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "': " + std::strerror(errno));
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

void write_report(const Json& report, const std::string& path) { write_text(path, report.dump(2) + "\n"); }

std::string code_version() {
#ifdef VPB_VERSION
  return VPB_VERSION;
#else
  return "0.1.0";
#endif
}

RunArtifacts::RunArtifacts(std::string out_dir, std::string subcommand, ScenarioConfig config)
    : dir_(std::move(out_dir)),
      subcommand_(std::move(subcommand)),
      config_(std::move(config)),
      started_(std::chrono::system_clock::now()) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir_ + "': " + ec.message());
}

std::string RunArtifacts::path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

void RunArtifacts::record(const std::string& name) {
  EmittedFile f{name, sha256_file(path(name)), fs::file_size(path(name))};
  for (auto& e : files_)
    if (e.name == name) {
      e = f;
      return;
    }
  files_.push_back(f);
}

void RunArtifacts::write_csv(const std::string& name, const TimeSeries& series) {
  write_timeseries(series, path(name));
  record(name);
}

void RunArtifacts::write_json(const std::string& name, const Json& doc) {
  write_report(doc, path(name));
  record(name);
}

void RunArtifacts::write_failure(int exit_code, const std::string& kind, const std::string& message) {
  Json j;
  j["subcommand"] = subcommand_;
  j["exit_code"] = exit_code;
  j["kind"] = kind;
  j["message"] = message;
  write_json("failure.json", j);
}

void RunArtifacts::finalize(int exit_code) {
  const auto finished = std::chrono::system_clock::now();
  Json m;
  m["subcommand"] = subcommand_;
  m["code_version"] = code_version();
  m["exit_code"] = exit_code;
  m["started"] = iso8601(started_);
  m["finished"] = iso8601(finished);
  m["wall_seconds"] = std::chrono::duration<double>(finished - started_).count();
  Json cfg = Json::object();
  for (const auto& [k, v] : config_.echo()) cfg[k] = v;
  m["config"] = cfg;
  Json files = Json::array();
  for (const auto& f : files_) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  m["files"] = files;
  write_report(m, path("manifest.json"));
}

}  // namespace vpb::io

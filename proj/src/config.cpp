#include "hgd/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "hgd/error.hpp"

namespace hgd {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double positive_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || !(v > 0.0)) {
    fail(ErrorCode::InvalidArgument, key + " must be a positive number, got '" + value + "'");
  }
  return v;
}

int positive_int(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || v <= 0 || v > 1'000'000) {
    fail(ErrorCode::InvalidArgument, key + " must be a positive integer, got '" + value + "'");
  }
  return static_cast<int>(v);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Parse, "config line " + std::to_string(lineno) + ": missing '='");
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[trim(line.substr(0, eq))] = value;
  }
  return out;
}

MetricKind parse_metric(const std::string& name) {
  if (name == "euclidean") return MetricKind::Euclidean;
  if (name == "cosine") return MetricKind::Cosine;
  if (name == "external") return MetricKind::External;
  fail(ErrorCode::InvalidArgument, "unknown metric '" + name + "'");
}

Protocol parse_protocol(const std::string& name) {
  if (name == "single" || name == "single-shot") return Protocol::SingleShot;
  if (name == "multi" || name == "multi-shot") return Protocol::MultiShot;
  fail(ErrorCode::InvalidArgument, "unknown protocol '" + name + "'");
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "image_width") {
    c.descriptor.image_width = positive_int(key, value);
  } else if (key == "image_height") {
    c.descriptor.image_height = positive_int(key, value);
  } else if (key == "regions" || key == "G") {
    c.descriptor.regions = positive_int(key, value);
  } else if (key == "strip_height") {
    c.descriptor.strip_height = positive_int(key, value);
  } else if (key == "patch_size" || key == "k") {
    c.descriptor.patch_size = positive_int(key, value);
  } else if (key == "patch_step" || key == "p") {
    c.descriptor.patch_step = positive_int(key, value);
  } else if (key == "eps0") {
    c.descriptor.eps0 = positive_real(key, value);
  } else if (key == "delta" || key == "step") {
    c.karcher.step = positive_real(key, value);
  } else if (key == "tol") {
    c.karcher.tol = positive_real(key, value);
  } else if (key == "max_iters") {
    c.karcher.max_iters = positive_int(key, value);
  } else if (key == "variant") {
    c.variant = parse_variant(value);
  } else if (key == "metric") {
    c.metric = parse_metric(value);
  } else if (key == "protocol") {
    c.protocol = parse_protocol(value);
  } else if (key == "workers") {
    c.workers = positive_int(key, value);
  } else {
    fail(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
}

RunConfig load_config(const std::filesystem::path& file, RunConfig base) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::Io, "cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  for (const auto& [k, v] : parse_key_values(ss.str())) apply_setting(base, k, v);
  return base;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("HGD_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace hgd

#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "hgd/descriptor.hpp"
#include "hgd/eval.hpp"
#include "hgd/spd_manifold.hpp"

namespace hgd {

struct RunConfig {
  DescriptorConfig descriptor;
  KarcherOptions karcher;
  Variant variant = Variant::GOG;
  MetricKind metric = MetricKind::Euclidean;
  Protocol protocol = Protocol::SingleShot;
  int workers = 0;  // 0: hardware concurrency
};

// `key = value` lines; '#' starts a comment. Unknown keys are errors.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Applies one setting; throws InvalidArgument for unknown keys or values
// that are not positive.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

RunConfig load_config(const std::filesystem::path& file, RunConfig base = {});

MetricKind parse_metric(const std::string& name);
Protocol parse_protocol(const std::string& name);

// Worker count: explicit value, else HGD_WORKERS, else hardware concurrency.
int resolve_workers(int requested);

}  // namespace hgd

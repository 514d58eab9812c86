// hgd: extract hierarchical Gaussian descriptors, fit and apply
// normalization models, match probe/gallery sets and evaluate rankings.

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "hgd/config.hpp"
#include "hgd/descriptor.hpp"
#include "hgd/error.hpp"
#include "hgd/eval.hpp"
#include "hgd/normalize.hpp"
#include "hgd/selftest.hpp"
#include "hgd/storage.hpp"

namespace {

using namespace hgd;

// Flags that mirror RunConfig keys; applied after the config file.
struct SettingFlags {
  std::string config_file;
  std::map<std::string, std::string> values;

  void attach(CLI::App* cmd, std::initializer_list<const char*> keys) {
    cmd->add_option("--config", config_file, "key = value config file (flags override it)");
    for (const char* key : keys) {
      std::string flag = std::string("--") + key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      cmd->add_option_function<std::string>(flag, [this, key](const std::string& v) { values[key] = v; },
                                            std::string("override ") + key);
    }
  }

  RunConfig resolve() const {
    RunConfig config = config_file.empty() ? RunConfig{} : load_config(config_file);
    for (const auto& [k, v] : values) apply_setting(config, k, v);
    return config;
  }
};

constexpr std::initializer_list<const char*> kDescriptorKeys = {
    "variant", "image_width", "image_height", "regions", "strip_height", "patch_size", "patch_step", "eps0", "workers"};

struct ExtractArgs {
  SettingFlags settings;
  std::string manifest;
  std::string out;
  std::string matrix_form;
  std::string split;
  std::optional<int> camera;
};

int cmd_extract(const ExtractArgs& args) {
  const RunConfig config = args.settings.resolve();
  std::vector<ManifestEntry> entries;
  for (auto& e : read_manifest(args.manifest)) {
    if (!args.split.empty() && e.split != args.split) continue;
    if (args.camera && e.camera_id != *args.camera) continue;
    entries.push_back(std::move(e));
  }
  if (entries.empty()) {
    std::cerr << "extract: no manifest entries selected; nothing written\n";
    return 2;
  }

  const bool want_matrices = !args.matrix_form.empty();
  const std::size_t n = entries.size();
  std::vector<std::optional<PersonDescriptor>> descs(n);
  std::vector<std::optional<MatrixFormDescriptor>> mats(n);
  std::vector<std::string> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> finished{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Image img = load_image(entries[i].path);
        MatrixFormDescriptor m = extract_matrix_form(img, config.variant, config.descriptor);
        descs[i] = flatten(m, config.descriptor);
        if (want_matrices) mats[i] = std::move(m);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      const std::size_t done = ++finished;
      if (done % 50 == 0 || done == n) {
        std::lock_guard lock(log_mutex);
        std::cerr << "extract: " << done << "/" << n << "\n";
      }
    }
  };
  const int workers = std::min<int>(resolve_workers(config.workers), static_cast<int>(n));
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  DescriptorFile file;
  file.content = static_cast<ContentTag>(config.variant);
  MatrixFormFile cache;
  cache.variant = config.variant;
  std::size_t failures = 0;
  const Eigen::Index dim = dims(config.variant, config.descriptor).total;
  std::vector<const Vector*> rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (!descs[i]) {
      ++failures;
      std::cerr << "extract: " << entries[i].path.string() << ": " << errors[i] << "\n";
      continue;
    }
    const SampleMeta meta{entries[i].person_id, entries[i].camera_id};
    file.records.push_back(meta);
    rows.push_back(&descs[i]->data);
    if (want_matrices) {
      cache.records.push_back(meta);
      cache.items.push_back(std::move(*mats[i]));
    }
  }
  file.values.resize(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t r = 0; r < rows.size(); ++r) file.values.row(static_cast<Eigen::Index>(r)) = rows[r]->transpose();
  write_file(args.out, encode(file));
  if (want_matrices) write_file(args.matrix_form, encode(cache));
  std::cerr << "extract: wrote " << rows.size() << " x " << dim << " (" << to_string(config.variant) << ") to "
            << args.out << "\n";
  return failures == 0 ? 0 : 1;
}

// Rebuilds PersonDescriptors from a descriptor file using the default layout
// for its variant and the given config.
std::vector<PersonDescriptor> as_descriptors(const DescriptorFile& file, const DescriptorConfig& config) {
  const Variant v = file.variant();
  const Layout layout = dims(v, config);
  if (file.values.cols() != layout.total) {
    fail(ErrorCode::InconsistentLengths, "descriptor dimension " + std::to_string(file.values.cols()) +
                                             " does not match " + std::string(to_string(v)) + " layout " +
                                             std::to_string(layout.total));
  }
  std::vector<PersonDescriptor> out;
  for (Eigen::Index i = 0; i < file.values.rows(); ++i) out.push_back({v, file.values.row(i).transpose(), layout});
  return out;
}

struct NormArgs {
  SettingFlags settings;
  std::string mode;
  std::string in;
  std::string out;
  std::string model;
};

int cmd_fit_norm(const NormArgs& args) {
  const RunConfig config = args.settings.resolve();
  const auto bytes = read_file(args.in);
  if (args.mode == "el2") {
    const auto descs = as_descriptors(decode_descriptor_file(bytes), config.descriptor);
    write_file(args.out, serialize(fit_extrinsic(descs)));
    std::cerr << "fit-norm: extrinsic model over " << descs.size() << " descriptors\n";
    return 0;
  }
  if (args.mode == "il2") {
    const MatrixFormFile cache = decode_matrix_form_file(bytes);
    const IntrinsicNormModel model = fit_intrinsic(cache.items, config.karcher);
    write_file(args.out, serialize(model));
    int unconverged = 0;
    std::cout << "slot,kind,color_space,region,iterations,residual,converged\n";
    for (const auto& s : model.slots) {
      std::cout << (&s - model.slots.data()) << ',' << (s.kind == Embedding::Gauss ? "gauss" : "zmg") << ','
                << to_string(s.space) << ',' << s.region << ',' << s.iterations << ',' << std::scientific
                << std::setprecision(3) << s.residual << std::defaultfloat << ',' << (s.converged ? 1 : 0) << '\n';
      unconverged += s.converged ? 0 : 1;
    }
    std::cerr << "fit-norm: intrinsic model over " << cache.items.size() << " samples, " << model.slots.size()
              << " slots, " << unconverged << " not converged\n";
    return 0;
  }
  fail(ErrorCode::InvalidArgument, "mode must be el2 or il2");
}

int cmd_apply_norm(const NormArgs& args) {
  const RunConfig config = args.settings.resolve();
  const auto model_bytes = read_file(args.model);
  const auto in_bytes = read_file(args.in);
  DescriptorFile out;
  out.payload = PayloadType::F32;
  std::vector<PersonDescriptor> normalized;
  if (peek_model_kind(model_bytes) == ModelKind::Extrinsic) {
    const auto model = deserialize_extrinsic(model_bytes);
    const DescriptorFile in = decode_descriptor_file(in_bytes);
    if (in.variant() != model.variant) {
      fail(ErrorCode::VariantMismatch, "model is " + std::string(to_string(model.variant)) + ", input is " +
                                           std::string(to_string(in.variant())));
    }
    for (const auto& d : as_descriptors(in, config.descriptor)) normalized.push_back(apply_extrinsic(model, d));
    out.content = in.content;
    out.records = in.records;
  } else {
    const auto model = deserialize_intrinsic(model_bytes);
    const MatrixFormFile in = decode_matrix_form_file(in_bytes);
    if (in.variant != model.variant) {
      fail(ErrorCode::VariantMismatch, "model is " + std::string(to_string(model.variant)) + ", input is " +
                                           std::string(to_string(in.variant)));
    }
    for (const auto& m : in.items) normalized.push_back(apply_intrinsic(model, m, config.descriptor));
    out.content = static_cast<ContentTag>(in.variant);
    out.records = in.records;
  }
  const Eigen::Index dim = normalized.empty() ? 0 : normalized.front().data.size();
  out.values.resize(static_cast<Eigen::Index>(normalized.size()), dim);
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    out.values.row(static_cast<Eigen::Index>(i)) = normalized[i].data.transpose();
  }
  write_file(args.out, encode(out));
  std::cerr << "apply-norm: wrote " << normalized.size() << " normalized descriptors\n";
  return 0;
}

struct MatchArgs {
  SettingFlags settings;
  std::string probe;
  std::string gallery;
  std::string external;
  std::string out;
};

int cmd_match(const MatchArgs& args) {
  const RunConfig config = args.settings.resolve();
  const DescriptorFile probe = decode_descriptor_file(read_file(args.probe));
  const DescriptorFile gallery = decode_descriptor_file(read_file(args.gallery));
  if (probe.content != gallery.content) fail(ErrorCode::VariantMismatch, "probe and gallery variants differ");
  std::optional<ExternalMetric> external;
  if (config.metric == MetricKind::External) {
    if (args.external.empty()) fail(ErrorCode::InvalidArgument, "--external is required for the external metric");
    external = read_external_metric(args.external);
  }
  DistanceMatrix dm = pairwise_distances(probe.values, gallery.values, config.metric, external ? &*external : nullptr);
  dm.probes = probe.records;
  dm.gallery = gallery.records;
  write_file(args.out, encode(from_distances(dm)));
  std::cerr << "match: " << dm.values.rows() << " x " << dm.values.cols() << " distances\n";
  return 0;
}

struct EvalArgs {
  SettingFlags settings;
  std::string distances;
  std::string collapse = "mean";
  bool exclude_same_camera = false;
  std::string csv;
};

int cmd_eval(const EvalArgs& args) {
  const RunConfig config = args.settings.resolve();
  const DistanceMatrix dm = to_distances(decode_descriptor_file(read_file(args.distances)));
  CmcOptions opts;
  opts.protocol = config.protocol;
  opts.exclude_same_camera = args.exclude_same_camera;
  if (args.collapse == "min") {
    opts.collapse = Collapse::Min;
  } else if (args.collapse != "mean") {
    fail(ErrorCode::InvalidArgument, "collapse must be mean or min");
  }
  const CmcResult r = cmc(dm, opts);
  const double p = pur(r.curve, r.gallery_identities);
  std::optional<double> map;
  try {
    map = mean_ap(dm);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoValidProbes) throw;
  }

  auto at = [&](std::size_t rank) { return r.curve[std::min(rank, r.curve.size()) - 1]; };
  const std::size_t ranks[] = {1, 5, 10, 20};
  std::cout << "probes " << r.valid_probes << " (skipped " << r.skipped_probes << "), gallery identities "
            << r.gallery_identities << "\n";
  std::cout << std::fixed << std::setprecision(2);
  for (const auto k : ranks) std::cout << "r=" << k << (k < 10 ? "  " : " ") << ' ';
  std::cout << "PUR    mAP\n";
  for (const auto k : ranks) std::cout << std::setw(5) << 100.0 * at(k) << ' ';
  std::cout << std::setw(5) << 100.0 * p << ' ';
  if (map) {
    std::cout << std::setw(5) << 100.0 * *map << '\n';
  } else {
    std::cout << "  n/a\n";
  }

  if (!args.csv.empty()) {
    std::ofstream csv(args.csv, std::ios::trunc);
    if (!csv) fail(ErrorCode::Io, "cannot write " + args.csv);
    csv << std::setprecision(17) << "metric,value\n";
    for (const auto k : ranks) csv << "cmc_r" << k << ',' << at(k) << '\n';
    csv << "pur," << p << '\n';
    if (map) csv << "map," << *map << '\n';
    csv << "\nrank,cmc\n";
    for (std::size_t i = 0; i < r.curve.size(); ++i) csv << i + 1 << ',' << r.curve[i] << '\n';
  }
  return 0;
}

struct SplitArgs {
  std::string manifest;
  std::string out;
  std::size_t train = 0;
  std::uint64_t seed = 0;
};

int cmd_split(const SplitArgs& args) {
  auto entries = read_manifest(args.manifest);
  std::vector<std::string> people;
  for (const auto& e : entries) people.push_back(e.person_id);
  const auto picked = sample_people(people, args.train, args.seed);
  const std::set<std::string> train(picked.begin(), picked.end());
  for (auto& e : entries) e.split = train.count(e.person_id) ? "train" : "test";
  write_manifest(args.out, entries);
  std::cerr << "split: " << train.size() << " training persons, seed " << args.seed << "\n";
  return 0;
}

int cmd_selftest(std::optional<double> eps0) {
  DescriptorConfig config;
  if (eps0) config.eps0 = *eps0;
  int failed = 0;
  for (const auto& r : run_selftest(config)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed) std::cout << ": " << r.detail;
    std::cout << '\n';
    failed += r.passed ? 0 : 1;
  }
  std::cout << (failed == 0 ? "all suites passed\n" : std::to_string(failed) + " suite(s) failed\n");
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical Gaussian descriptors for person re-identification"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "extract descriptors for every manifest image");
  c_extract->add_option("--manifest", extract.manifest, "CSV: path,person_id,camera_id,split")->required();
  c_extract->add_option("--out", extract.out, "descriptor file to write")->required();
  c_extract->add_option("--matrix-form", extract.matrix_form, "also write the region-matrix cache (for il2)");
  c_extract->add_option("--split", extract.split, "only entries with this split tag");
  c_extract->add_option("--camera", extract.camera, "only entries from this camera");
  extract.settings.attach(c_extract, kDescriptorKeys);

  NormArgs fit;
  auto* c_fit = app.add_subcommand("fit-norm", "fit an E-L2 or I-L2 normalization model");
  c_fit->add_option("--mode", fit.mode, "el2 or il2")->required()->check(CLI::IsMember({"el2", "il2"}));
  c_fit->add_option("--in", fit.in, "descriptor file (el2) or matrix-form cache (il2)")->required();
  c_fit->add_option("--out", fit.out, "model file to write")->required();
  fit.settings.attach(c_fit, {"delta", "tol", "max_iters", "image_width", "image_height", "regions", "strip_height",
                              "patch_size", "patch_step"});

  NormArgs apply;
  auto* c_apply = app.add_subcommand("apply-norm", "apply a fitted normalization model");
  c_apply->add_option("--model", apply.model, "model file")->required();
  c_apply->add_option("--in", apply.in, "descriptor file (el2) or matrix-form cache (il2)")->required();
  c_apply->add_option("--out", apply.out, "normalized descriptor file")->required();
  apply.settings.attach(c_apply, {"image_width", "image_height", "regions", "strip_height", "patch_size", "patch_step"});

  MatchArgs match;
  auto* c_match = app.add_subcommand("match", "compute probe x gallery distances");
  c_match->add_option("--probe", match.probe, "probe descriptor file")->required();
  c_match->add_option("--gallery", match.gallery, "gallery descriptor file")->required();
  c_match->add_option("--external", match.external, "text file with a learned projection and metric");
  c_match->add_option("--out", match.out, "distance file to write")->required();
  match.settings.attach(c_match, {"metric"});

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "CMC, PUR and mAP from a distance file");
  c_eval->add_option("--distances", eval.distances, "distance file from `match`")->required();
  c_eval->add_option("--collapse", eval.collapse, "multi-shot collapse: mean or min");
  c_eval->add_flag("--exclude-same-camera", eval.exclude_same_camera,
                   "drop same-person same-camera gallery entries from CMC");
  c_eval->add_option("--csv", eval.csv, "also write the report as CSV");
  eval.settings.attach(c_eval, {"protocol"});

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "seeded random person split of a manifest");
  c_split->add_option("--manifest", split.manifest, "input manifest")->required();
  c_split->add_option("--out", split.out, "manifest to write with train/test tags")->required();
  c_split->add_option("--train", split.train, "number of training persons")->required();
  c_split->add_option("--seed", split.seed, "RNG seed");

  std::optional<double> selftest_eps0;
  auto* c_selftest = app.add_subcommand("selftest", "run the invariant suites");
  c_selftest->add_option("--eps0", selftest_eps0, "override the regularization constant");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*c_extract) return cmd_extract(extract);
    if (*c_fit) return cmd_fit_norm(fit);
    if (*c_apply) return cmd_apply_norm(apply);
    if (*c_match) return cmd_match(match);
    if (*c_eval) return cmd_eval(eval);
    if (*c_split) return cmd_split(split);
    if (*c_selftest) return cmd_selftest(selftest_eps0);
  } catch (const std::exception& e) {
    std::cerr << "hgd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

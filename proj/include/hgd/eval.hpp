#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hgd/spd_manifold.hpp"

namespace hgd {

struct SampleMeta {
  std::string person_id;
  int camera_id = 0;
  bool operator==(const SampleMeta&) const = default;
};

// Rows are probes, columns gallery entries.
struct DistanceMatrix {
  Matrix values;
  std::vector<SampleMeta> probes;
  std::vector<SampleMeta> gallery;
};

enum class MetricKind { Euclidean, Cosine, External };

// Learned linear metric d(x, y) = (W^T x - W^T y)^T M (W^T x - W^T y).
struct ExternalMetric {
  Matrix projection;  // feature dim x k
  Matrix metric;      // k x k, symmetric PSD
};

// Rows of `probes` / `gallery` are feature vectors.
DistanceMatrix pairwise_distances(const Matrix& probes, const Matrix& gallery, MetricKind kind,
                                  const ExternalMetric* external = nullptr);

enum class Protocol { SingleShot, MultiShot };
enum class Collapse { Mean, Min };

struct CmcOptions {
  Protocol protocol = Protocol::SingleShot;
  Collapse collapse = Collapse::Mean;
  // Drops gallery entries sharing both person and camera with the probe.
  bool exclude_same_camera = false;
};

struct CmcResult {
  std::vector<double> curve;  // curve[r-1] = CMC(r)
  int valid_probes = 0;
  int skipped_probes = 0;     // probes without any true match
  int gallery_identities = 0;
};

// Person-level distances: mean (or min) over cross-camera image pairs,
// falling back to all pairs when two persons share no camera pair.
DistanceMatrix collapse_by_person(const DistanceMatrix& dm, Collapse how);

// Ties keep gallery order.
CmcResult cmc(const DistanceMatrix& dm, const CmcOptions& opts = {});

// (ln N + sum p ln p) / ln N with p(r) = CMC(r) - CMC(r-1).
double pur(const std::vector<double>& cmc_curve, int gallery_identities);

// Mean average precision; gallery entries with the probe's person and
// camera are excluded.
double mean_ap(const DistanceMatrix& dm);

// Deterministic person-level split: Fisher-Yates over sorted person ids
// driven by a 64-bit Mersenne Twister with the given seed.
std::vector<std::string> sample_people(std::vector<std::string> people, std::size_t count, std::uint64_t seed);

}  // namespace hgd

#include "hgd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "hgd/error.hpp"

namespace hgd {

DistanceMatrix pairwise_distances(const Matrix& probes, const Matrix& gallery, MetricKind kind,
                                  const ExternalMetric* external) {
  if (probes.cols() != gallery.cols()) fail(ErrorCode::DimensionMismatch, "probe and gallery dimensions differ");
  DistanceMatrix dm;
  dm.values.resize(probes.rows(), gallery.rows());

  switch (kind) {
    case MetricKind::Euclidean:
      for (Eigen::Index i = 0; i < probes.rows(); ++i)
        for (Eigen::Index j = 0; j < gallery.rows(); ++j) dm.values(i, j) = (probes.row(i) - gallery.row(j)).norm();
      break;
    case MetricKind::Cosine: {
      const Vector pn = probes.rowwise().norm();
      const Vector gn = gallery.rowwise().norm();
      if ((pn.array() == 0.0).any() || (gn.array() == 0.0).any()) {
        fail(ErrorCode::ZeroNorm, "cosine distance of a zero vector");
      }
      for (Eigen::Index i = 0; i < probes.rows(); ++i) {
        for (Eigen::Index j = 0; j < gallery.rows(); ++j) {
          const double c = probes.row(i).dot(gallery.row(j)) / (pn(i) * gn(j));
          dm.values(i, j) = std::max(0.0, 1.0 - c);
        }
      }
      break;
    }
    case MetricKind::External: {
      if (external == nullptr) fail(ErrorCode::InvalidArgument, "external metric not supplied");
      const auto& w = external->projection;
      const auto& m = external->metric;
      if (w.rows() != probes.cols() || m.rows() != w.cols() || m.cols() != w.cols()) {
        fail(ErrorCode::DimensionMismatch, "external metric does not match feature dimension");
      }
      const Matrix pp = probes * w;
      const Matrix gp = gallery * w;
      for (Eigen::Index i = 0; i < pp.rows(); ++i) {
        for (Eigen::Index j = 0; j < gp.rows(); ++j) {
          const Eigen::RowVectorXd diff = pp.row(i) - gp.row(j);
          dm.values(i, j) = std::max(0.0, (diff * m * diff.transpose())(0, 0));
        }
      }
      break;
    }
  }
  return dm;
}

DistanceMatrix collapse_by_person(const DistanceMatrix& dm, Collapse how) {
  auto group = [](const std::vector<SampleMeta>& metas, std::vector<SampleMeta>& people) {
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < metas.size(); ++i) {
      auto [it, inserted] = index.try_emplace(metas[i].person_id, members.size());
      if (inserted) {
        members.emplace_back();
        people.push_back({metas[i].person_id, metas[i].camera_id});
      }
      members[it->second].push_back(i);
    }
    return members;
  };

  DistanceMatrix out;
  const auto prows = group(dm.probes, out.probes);
  const auto gcols = group(dm.gallery, out.gallery);
  out.values.resize(static_cast<Eigen::Index>(prows.size()), static_cast<Eigen::Index>(gcols.size()));
  for (std::size_t p = 0; p < prows.size(); ++p) {
    for (std::size_t g = 0; g < gcols.size(); ++g) {
      double acc = how == Collapse::Min ? INFINITY : 0.0;
      int n = 0;
      for (const bool cross_only : {true, false}) {
        for (const auto i : prows[p]) {
          for (const auto j : gcols[g]) {
            if (cross_only && dm.probes[i].camera_id == dm.gallery[j].camera_id) continue;
            const double v = dm.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            acc = how == Collapse::Min ? std::min(acc, v) : acc + v;
            ++n;
          }
        }
        if (n > 0) break;
      }
      out.values(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g)) =
          how == Collapse::Min ? acc : acc / n;
    }
  }
  return out;
}

namespace {

// Gallery indices ordered by distance, ties by index.
std::vector<Eigen::Index> rank_row(const Matrix& values, Eigen::Index row) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(values.cols()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(row, a) < values(row, b); });
  return order;
}

int count_identities(const std::vector<SampleMeta>& metas) {
  std::vector<std::string> ids;
  for (const auto& m : metas) ids.push_back(m.person_id);
  std::sort(ids.begin(), ids.end());
  return static_cast<int>(std::unique(ids.begin(), ids.end()) - ids.begin());
}

}  // namespace

CmcResult cmc(const DistanceMatrix& input, const CmcOptions& opts) {
  const DistanceMatrix dm = opts.protocol == Protocol::MultiShot ? collapse_by_person(input, opts.collapse) : input;
  CmcResult result;
  result.gallery_identities = count_identities(dm.gallery);
  std::vector<double> hits(dm.gallery.size() + 1, 0.0);

  for (Eigen::Index i = 0; i < dm.values.rows(); ++i) {
    const auto& probe = dm.probes[static_cast<std::size_t>(i)];
    int rank = 0;
    int found = -1;
    for (const Eigen::Index j : rank_row(dm.values, i)) {
      const auto& g = dm.gallery[static_cast<std::size_t>(j)];
      const bool same_person = g.person_id == probe.person_id;
      if (opts.exclude_same_camera && same_person && g.camera_id == probe.camera_id) continue;
      ++rank;
      if (same_person) {
        found = rank;
        break;
      }
    }
    if (found < 0) {
      ++result.skipped_probes;
      continue;
    }
    ++result.valid_probes;
    hits[static_cast<std::size_t>(found)] += 1.0;
  }
  if (result.valid_probes == 0) fail(ErrorCode::NoValidProbes, "no probe has a true match in the gallery");

  result.curve.resize(dm.gallery.size());
  double acc = 0.0;
  for (std::size_t r = 1; r <= dm.gallery.size(); ++r) {
    acc += hits[r];
    result.curve[r - 1] = acc / result.valid_probes;
  }
  return result;
}

double pur(const std::vector<double>& curve, int gallery_identities) {
  if (gallery_identities <= 1) return 1.0;
  const double log_n = std::log(static_cast<double>(gallery_identities));
  double neg_entropy = 0.0;
  double prev = 0.0;
  for (const double c : curve) {
    const double p = c - prev;
    prev = c;
    if (p > 0.0) neg_entropy += p * std::log(p);
  }
  return std::clamp((log_n + neg_entropy) / log_n, 0.0, 1.0);
}

double mean_ap(const DistanceMatrix& dm) {
  double total = 0.0;
  int valid = 0;
  for (Eigen::Index i = 0; i < dm.values.rows(); ++i) {
    const auto& probe = dm.probes[static_cast<std::size_t>(i)];
    int rank = 0;
    int matches = 0;
    double precision_sum = 0.0;
    for (const Eigen::Index j : rank_row(dm.values, i)) {
      const auto& g = dm.gallery[static_cast<std::size_t>(j)];
      const bool same_person = g.person_id == probe.person_id;
      if (same_person && g.camera_id == probe.camera_id) continue;
      ++rank;
      if (same_person) {
        ++matches;
        precision_sum += static_cast<double>(matches) / rank;
      }
    }
    if (matches == 0) continue;
    total += precision_sum / matches;
    ++valid;
  }
  if (valid == 0) fail(ErrorCode::NoValidProbes, "no probe has a cross-camera true match");
  return total / valid;
}

std::vector<std::string> sample_people(std::vector<std::string> people, std::size_t count, std::uint64_t seed) {
  std::sort(people.begin(), people.end());
  people.erase(std::unique(people.begin(), people.end()), people.end());
  if (count > people.size()) fail(ErrorCode::InvalidArgument, "split asks for more people than exist");
  // std::shuffle and the std distributions are implementation-defined; the
  // engine output is not, so draw indices from it directly.
  std::mt19937_64 rng(seed);
  for (std::size_t i = people.size(); i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(people[i - 1], people[static_cast<std::size_t>(draw % bound)]);
  }
  people.resize(count);
  std::sort(people.begin(), people.end());
  return people;
}

}  // namespace hgd

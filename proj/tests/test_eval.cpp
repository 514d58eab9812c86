#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "hgd/error.hpp"
#include "hgd/eval.hpp"
#include "test_util.hpp"

using namespace hgd;

namespace {

DistanceMatrix random_null(synthetic::Rng& rng, int probes, int people) {
  DistanceMatrix dm;
  dm.values = hgd::testing::random_matrix(rng, probes, people, 0, 1);
  for (int i = 0; i < probes; ++i) dm.probes.push_back({"p" + std::to_string(i % people), 0});
  for (int j = 0; j < people; ++j) dm.gallery.push_back({"p" + std::to_string(j), 1});
  return dm;
}

}  // namespace

TEST_CASE("single-shot CMC on a hand example") {
  DistanceMatrix dm;
  dm.values = Matrix{{0.3, 0.1, 0.2}, {0.5, 0.45, 0.4}, {0.9, 0.8, 0.7}};
  dm.probes = {{"a", 0}, {"b", 0}, {"c", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}, {"c", 1}};
  // a ranks third, b second, c first.
  const CmcResult r = cmc(dm);
  REQUIRE(r.curve.size() == 3);
  CHECK(r.curve[0] == doctest::Approx(1.0 / 3));
  CHECK(r.curve[1] == doctest::Approx(2.0 / 3));
  CHECK(r.curve[2] == doctest::Approx(1.0));
  CHECK(r.valid_probes == 3);
  CHECK(r.gallery_identities == 3);
  CHECK(mean_ap(dm) == doctest::Approx((1.0 / 3 + 1.0 / 2 + 1.0) / 3));

  // Scaling the distances changes nothing.
  DistanceMatrix scaled = dm;
  scaled.values *= 7.5;
  CHECK(cmc(scaled).curve == r.curve);
}

TEST_CASE("ties keep gallery order") {
  DistanceMatrix dm;
  dm.values = Matrix{{0.5, 0.5, 0.5}};
  dm.probes = {{"b", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}, {"c", 1}};
  const CmcResult r = cmc(dm);
  CHECK(r.curve[0] == 0.0);
  CHECK(r.curve[1] == 1.0);
}

TEST_CASE("probes without a true match are skipped") {
  DistanceMatrix dm;
  dm.values = Matrix{{0.1, 0.2}, {0.3, 0.1}};
  dm.probes = {{"a", 0}, {"z", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}};
  const CmcResult r = cmc(dm);
  CHECK(r.valid_probes == 1);
  CHECK(r.skipped_probes == 1);
  CHECK(r.curve[0] == 1.0);

  DistanceMatrix none = dm;
  none.probes = {{"x", 0}, {"y", 0}};
  CHECK_THROWS_AS(cmc(none), Error);
}

TEST_CASE("same-camera exclusion") {
  DistanceMatrix dm;
  dm.values = Matrix{{0.0, 0.4, 0.2}};
  dm.probes = {{"a", 0}};
  dm.gallery = {{"a", 0}, {"a", 1}, {"b", 1}};
  CHECK(cmc(dm).curve[0] == 1.0);
  CmcOptions opts;
  opts.exclude_same_camera = true;
  const CmcResult r = cmc(dm, opts);
  CHECK(r.curve[0] == 0.0);
  CHECK(r.curve[1] == 1.0);
}

TEST_CASE("average precision") {
  DistanceMatrix dm;
  dm.values = Matrix{{0.1, 0.2, 0.3, 0.05}};
  dm.probes = {{"a", 0}};
  // Ranked: own-camera copy (excluded), a@1, b@1, a@2.
  dm.gallery = {{"a", 1}, {"b", 1}, {"a", 2}, {"a", 0}};
  CHECK(mean_ap(dm) == doctest::Approx((1.0 + 2.0 / 3) / 2));
  CHECK(mean_ap(dm) == doctest::Approx(5.0 / 6));
}

TEST_CASE("random distances give the chance-level curve") {
  synthetic::Rng rng(61);
  const int trials = 10000, people = 20;
  const DistanceMatrix dm = random_null(rng, trials, people);
  const CmcResult r = cmc(dm);
  for (const int rank : {1, 5, 10, 15}) {
    const double p = static_cast<double>(rank) / people;
    const double sigma = std::sqrt(p * (1 - p) / trials);
    CHECK(std::fabs(r.curve[rank - 1] - p) <= 3 * sigma);
  }
  // PUR of chance is near zero.
  CHECK(pur(r.curve, people) < 0.01);
  for (std::size_t i = 1; i < r.curve.size(); ++i) CHECK(r.curve[i] >= r.curve[i - 1]);
  CHECK(r.curve.back() == 1.0);
}

TEST_CASE("PUR") {
  CHECK(pur({1.0, 1.0, 1.0, 1.0}, 4) == doctest::Approx(1.0));
  CHECK(pur({0.25, 0.5, 0.75, 1.0}, 4) == doctest::Approx(0.0).scale(1));
  // p = (0.5, 0.5, 0, 0): (ln 4 + ln 0.5) / ln 4 = 0.5.
  CHECK(pur({0.5, 1.0, 1.0, 1.0}, 4) == doctest::Approx(0.5));
  synthetic::Rng rng(62);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> curve(10);
    double acc = 0.0;
    for (double& c : curve) {
      acc += rng.uniform();
      c = acc;
    }
    for (double& c : curve) c /= acc;
    const double v = pur(curve, 10);
    CHECK(v >= -1e-12);
    CHECK(v <= 1.0 + 1e-12);
  }
}

TEST_CASE("pairwise distances") {
  synthetic::Rng rng(63);
  const Matrix p = hgd::testing::random_matrix(rng, 4, 6);
  const Matrix g = hgd::testing::random_matrix(rng, 5, 6);
  const DistanceMatrix e = pairwise_distances(p, g, MetricKind::Euclidean);
  REQUIRE(e.values.rows() == 4);
  REQUIRE(e.values.cols() == 5);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(e.values(i, j) == doctest::Approx((p.row(i) - g.row(j)).norm()).epsilon(1e-9));

  const ExternalMetric eye{Matrix::Identity(6, 6), Matrix::Identity(6, 6)};
  const DistanceMatrix x = pairwise_distances(p, g, MetricKind::External, &eye);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(x.values(i, j) == doctest::Approx((p.row(i) - g.row(j)).squaredNorm()).epsilon(1e-9));

  // Projection to 2 dims with a diagonal metric.
  ExternalMetric proj{Matrix::Zero(6, 2), Matrix::Zero(2, 2)};
  proj.projection(0, 0) = 1.0;
  proj.projection(3, 1) = 1.0;
  proj.metric(0, 0) = 2.0;
  proj.metric(1, 1) = 0.5;
  const DistanceMatrix y = pairwise_distances(p, g, MetricKind::External, &proj);
  const double d0 = p(1, 0) - g(2, 0), d3 = p(1, 3) - g(2, 3);
  CHECK(y.values(1, 2) == doctest::Approx(2.0 * d0 * d0 + 0.5 * d3 * d3));
  CHECK_THROWS_AS(pairwise_distances(p, g, MetricKind::External), Error);

  const DistanceMatrix c = pairwise_distances(p, p, MetricKind::Cosine);
  for (int i = 0; i < 4; ++i) CHECK(c.values(i, i) == doctest::Approx(0.0).scale(1));
  const Matrix axes = Matrix::Identity(2, 2);
  CHECK(pairwise_distances(axes, axes, MetricKind::Cosine).values(0, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(pairwise_distances(Matrix::Zero(1, 2), axes, MetricKind::Cosine), Error);
  CHECK_THROWS_AS(pairwise_distances(p, Matrix::Zero(2, 3), MetricKind::Euclidean), Error);
}

TEST_CASE("multi-shot collapse") {
  DistanceMatrix dm;
  // Probes: a@0 twice, b@0. Gallery: a@1, b@1 twice.
  dm.values = Matrix{{0.2, 0.5, 0.7}, {0.4, 0.1, 0.3}, {0.9, 0.6, 0.2}};
  dm.probes = {{"a", 0}, {"a", 0}, {"b", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}, {"b", 1}};
  const DistanceMatrix mean = collapse_by_person(dm, Collapse::Mean);
  REQUIRE(mean.values.rows() == 2);
  REQUIRE(mean.values.cols() == 2);
  CHECK(mean.probes[0].person_id == "a");
  CHECK(mean.gallery[1].person_id == "b");
  CHECK(mean.values(0, 0) == doctest::Approx(0.3));
  CHECK(mean.values(0, 1) == doctest::Approx((0.5 + 0.7 + 0.1 + 0.3) / 4));
  CHECK(mean.values(1, 1) == doctest::Approx(0.4));
  const DistanceMatrix mn = collapse_by_person(dm, Collapse::Min);
  CHECK(mn.values(0, 1) == doctest::Approx(0.1));

  CmcOptions ms;
  ms.protocol = Protocol::MultiShot;
  const CmcResult r = cmc(dm, ms);
  CHECK(r.valid_probes == 2);
  CHECK(r.curve[0] == 1.0);
  ms.collapse = Collapse::Min;
  CHECK(cmc(dm, ms).curve[0] == 0.5);

  // Same-camera pairs only count when no cross-camera pair exists.
  DistanceMatrix mixed;
  mixed.values = Matrix{{0.0, 0.8}};
  mixed.probes = {{"a", 0}};
  mixed.gallery = {{"a", 0}, {"a", 1}};
  CHECK(collapse_by_person(mixed, Collapse::Mean).values(0, 0) == doctest::Approx(0.8));
  DistanceMatrix same;
  same.values = Matrix{{0.3, 0.5}};
  same.probes = {{"a", 0}};
  same.gallery = {{"a", 0}, {"a", 0}};
  CHECK(collapse_by_person(same, Collapse::Mean).values(0, 0) == doctest::Approx(0.4));
}

TEST_CASE("person sampling") {
  std::vector<std::string> people;
  for (int i = 0; i < 50; ++i) people.push_back("id" + std::to_string(i));
  const auto a = sample_people(people, 10, 7);
  const auto b = sample_people(people, 10, 7);
  std::vector<std::string> shuffled(people.rbegin(), people.rend());
  const auto c = sample_people(shuffled, 10, 7);
  CHECK(a == b);
  CHECK(a == c);
  CHECK(a.size() == 10);
  CHECK(std::set<std::string>(a.begin(), a.end()).size() == 10);
  CHECK(sample_people(people, 10, 8) != a);
  CHECK(sample_people(people, 50, 1).size() == 50);
  CHECK_THROWS_AS(sample_people(people, 51, 1), Error);
}

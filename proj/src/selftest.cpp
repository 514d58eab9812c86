#include "hgd/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "hgd/error.hpp"
#include "hgd/eval.hpp"
#include "hgd/normalize.hpp"
#include "hgd/synthetic.hpp"

namespace hgd {

namespace {

struct Check {
  std::ostringstream failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures << what << "; ";
  }
  void near(double a, double b, double tol, const std::string& what) {
    if (!(std::fabs(a - b) <= tol)) failures << what << " (" << a << " vs " << b << "); ";
  }
};

Matrix random_spd(synthetic::Rng& rng, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

Matrix random_sym(synthetic::Rng& rng, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
  return 0.5 * (a + a.transpose());
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

void manifold_suite(Check& c) {
  synthetic::Rng rng(11);
  for (const int n : {2, 8, 9}) {
    const SpdMatrix x(random_spd(rng, n));
    const SymMatrix s(random_sym(rng, n));
    c.expect(rel(expm(logm(x)).data(), x.data()) < 1e-9, "expm(logm(X)) round trip");
    c.expect(rel(logm(expm(s)).data(), s.data()) < 1e-9, "logm(expm(S)) round trip");
    const SpdMatrix eye(Matrix::Identity(n, n));
    c.near(lerm_distance(eye, x), airm_distance(eye, x), 1e-9, "LERM == AIRM at identity");
    const SpdMatrix scaled = SpdMatrix::trusted(7.0 * x.data());
    const Matrix expected = logm(x).data() + std::log(7.0) * Matrix::Identity(n, n);
    c.expect(rel(logm(scaled).data(), expected) < 1e-9, "log(aX) == log X + ln a I");
  }
}

void scale_suite(Check& c) {
  synthetic::Rng rng(12);
  for (const int n : {2, 8, 9}) {
    const SpdMatrix x(random_spd(rng, n));
    for (const double a : {1e-4, 1e4}) {
      const SpdMatrix ax = SpdMatrix::trusted(a * x.data());
      c.expect(rel(scale_normalize(ax).data(), scale_normalize(x).data()) < 1e-9, "eta(aX) == eta(X)");
      c.expect(rel(log_scale_normalize(ax).data(), log_scale_normalize(x).data()) < 1e-9,
               "log eta(aX) == log eta(X)");
    }
    c.near(log_scale_normalize(x).data().trace(), 0.0, 1e-9, "trace of log eta(X)");
    c.expect(rel(logm(scale_normalize(x)).data(), log_scale_normalize(x).data()) < 1e-9,
             "direct tangent path == determinant path");
  }
}

void regularization_suite(Check& c, const DescriptorConfig& config) {
  // A flat patch has zero covariance; only the regularizer keeps it SPD.
  PixelFeatureMap fm(config.patch_size, config.patch_size, 8);
  for (int y = 0; y < fm.height(); ++y)
    for (int x = 0; x < fm.width(); ++x)
      for (int k = 0; k < 8; ++k) fm.at(x, y)[k] = 0.25;
  const IntegralImages ints(fm);
  const PatchGaussian pg = patch_stats(ints, Rect{0, 0, config.patch_size, config.patch_size});
  const PatchGaussian reg = regularize_patch(pg, config.eps0);
  const double eps = patch_regularizer(pg.sigma, config.eps0);
  const auto e = eigen_sym(reg.sigma);
  const double smallest = e.eigenvalues(e.eigenvalues.size() - 1);
  c.expect(smallest > 0.0, "regularized flat patch covariance is not positive definite");
  c.expect(smallest >= eps * (1 - 1e-9), "smallest eigenvalue below eps_s");
  try {
    const TangentVector g = flatten_patch(gauss_embed(reg));
    c.expect(g.data().allFinite(), "flattened flat patch is not finite");
    const TangentVector z = flatten_patch(zmg_embed(pg, config.eps0));
    c.expect(z.data().allFinite(), "flattened flat ZmG patch is not finite");
  } catch (const Error& err) {
    c.expect(false, err.what());
  }
}

void embedding_suite(Check& c) {
  synthetic::Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    PatchGaussian pg;
    pg.n = 25;
    pg.mu = Vector::NullaryExpr(8, [&] { return rng.uniform(); });
    pg.sigma = random_spd(rng, 8) * 0.01;
    const EmbeddedPatch g = gauss_embed(pg);
    c.near(g.generator.determinant() / pg.sigma.determinant(), 1.0, 1e-8, "|G| == |Sigma|");
    c.near(g.matrix().data().determinant(), 1.0, 1e-7, "det of Gaussian embedding");
    c.near(zmg_embed(pg, 1e-3).matrix().data().determinant(), 1.0, 1e-7, "det of ZmG embedding");
  }
}

void integral_suite(Check& c) {
  synthetic::Rng rng(14);
  PixelFeatureMap fm(13, 17, 5);
  for (int y = 0; y < fm.height(); ++y)
    for (int x = 0; x < fm.width(); ++x)
      for (int k = 0; k < 5; ++k) fm.at(x, y)[k] = rng.uniform();
  const IntegralImages ints(fm);
  for (int t = 0; t < 50; ++t) {
    const int x0 = rng.integer(0, 12), y0 = rng.integer(0, 16);
    const Rect r{x0, y0, rng.integer(1, 13 - x0), rng.integer(1, 17 - y0)};
    Vector s = Vector::Zero(5);
    Matrix o = Matrix::Zero(5, 5);
    for (int y = r.y; y < r.y + r.height; ++y) {
      for (int x = r.x; x < r.x + r.width; ++x) {
        const Eigen::Map<const Vector> f(fm.at(x, y).data(), 5);
        s += f;
        o += f * f.transpose();
      }
    }
    const RectSums q = ints.query(r);
    c.expect((q.sum - s).norm() <= 1e-9 * s.norm() && rel(q.outer, o) < 1e-9, "integral query != brute force");
  }
  c.expect(dense_patches(Rect{0, 0, 48, 32}, 5, 2).size() == 308, "patch count of a 32x48 strip");
}

void dims_suite(Check& c) {
  c.expect(dims(Variant::GOG).total == 27622, "GOG length 27622");
  c.expect(dims(Variant::ZOZ).total == 16828, "ZOZ length 16828");
  c.expect(dims(Variant::HGD).total == 44450, "HGD length 44450");
  const auto gog = dims(Variant::GOG).blocks;
  const auto zoz = dims(Variant::ZOZ).blocks;
  c.expect(gog[0].region_dim == 1081 && gog[3].region_dim == 703, "GOG region dims 1081/703");
  c.expect(zoz[0].region_dim == 666 && zoz[3].region_dim == 406, "ZOZ region dims 666/406");
}

void karcher_suite(Check& c) {
  synthetic::Rng rng(15);
  std::vector<SpdMatrix> xs;
  for (int i = 0; i < 5; ++i) xs.emplace_back(random_spd(rng, 6));
  const KarcherResult k = karcher_mean(xs);
  c.expect(k.converged && k.residual < 1e-7, "Karcher residual below tolerance");
  const std::vector<SpdMatrix> diag{SpdMatrix(Vector::Constant(3, 2.0).asDiagonal().toDenseMatrix()),
                                    SpdMatrix(Vector::Constant(3, 8.0).asDiagonal().toDenseMatrix())};
  c.expect(rel(karcher_mean(diag).mean.data(), 4.0 * Matrix::Identity(3, 3)) < 1e-8, "commuting Karcher mean");
}

void normalization_suite(Check& c, const DescriptorConfig& config) {
  synthetic::Rng rng(16);
  std::vector<PersonDescriptor> train;
  const Layout layout = dims(Variant::ZOZ, config);
  for (int i = 0; i < 4; ++i) {
    PersonDescriptor d{Variant::ZOZ, Vector::NullaryExpr(layout.total, [&] { return rng.uniform(-1, 1); }), layout};
    train.push_back(std::move(d));
  }
  const auto model = fit_extrinsic(train);
  const auto out = apply_extrinsic(model, train[0]);
  for (const auto& b : out.layout.blocks) {
    c.near(out.data.segment(b.offset, b.length).norm(), 1.0, 1e-12, "E-L2 block norm");
  }
}

void eval_suite(Check& c) {
  DistanceMatrix dm;
  dm.values = Matrix{{0.1, 0.5, 0.9}, {0.7, 0.2, 0.3}, {0.4, 0.6, 0.5}};
  dm.probes = {{"a", 0}, {"b", 0}, {"c", 0}};
  dm.gallery = {{"a", 1}, {"b", 1}, {"c", 1}};
  const CmcResult r = cmc(dm);
  // Ranks of the true match: a -> 1, b -> 1, c -> 2.
  c.near(r.curve[0], 2.0 / 3.0, 1e-12, "CMC(1)");
  c.near(r.curve[1], 1.0, 1e-12, "CMC(2)");
  c.near(mean_ap(dm), (1.0 + 1.0 + 0.5) / 3.0, 1e-12, "mAP");
  c.near(pur({1.0, 1.0, 1.0}, 3), 1.0, 1e-12, "PUR of perfect ranking");
  c.near(pur({1.0 / 3, 2.0 / 3, 1.0}, 3), 0.0, 1e-12, "PUR of uniform ranking");
}

}  // namespace

std::vector<SuiteResult> run_selftest(const DescriptorConfig& config) {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> suites = {
      {"manifold identities", manifold_suite},
      {"scale normalization", scale_suite},
      {"patch regularization", [&](Check& c) { regularization_suite(c, config); }},
      {"embedding identities", embedding_suite},
      {"integral images", integral_suite},
      {"dimensions 27622/16828/44450", dims_suite},
      {"karcher mean", karcher_suite},
      {"normalization", [&](Check& c) { normalization_suite(c, config); }},
      {"evaluation metrics", eval_suite},
  };
  std::vector<SuiteResult> results;
  for (const auto& [name, run] : suites) {
    Check c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const std::string detail = c.failures.str();
    results.push_back({name, detail.empty(), detail});
  }
  return results;
}

}  // namespace hgd

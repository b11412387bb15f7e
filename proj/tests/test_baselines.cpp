#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>

#include "ssvep/cca.hpp"
#include "ssvep/lda.hpp"
#include "ssvep/rng.hpp"
#include "ssvep/stats.hpp"

using namespace ssvep;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

MatrixXd random_matrix(int r, int c, Rng& rng) {
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.gaussian();
  return m;
}

// Adaptive Simpson integration, the independent oracle for the t CDF.
double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth > 0 && std::abs(left + right - whole) > 15.0 * tol)
    return simpson(f, a, m, fa, flm, fm, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, tol / 2.0, depth - 1);
  return left + right + (left + right - whole) / 15.0;
}

// Two-tailed t p-value by numeric integration of the t density over
// [0, |t|]: p = 1 - 2 * integral.
double t_p_by_integration(double t, int df) {
  const double v = df;
  const double log_norm = std::lgamma(0.5 * (v + 1.0)) -
                          std::lgamma(0.5 * v) -
                          0.5 * std::log(v * std::numbers::pi);
  auto density = [&](double u) {
    return std::exp(log_norm -
                    0.5 * (v + 1.0) * std::log1p(u * u / v));
  };
  const double a = 0.0, b = std::abs(t);
  if (b == 0.0) return 1.0;
  const double integral = simpson(density, a, b, density(a),
                                  density(0.5 * (a + b)), density(b),
                                  1e-13, 48);
  return 1.0 - 2.0 * integral;
}

Epoch tone_epoch(double f_hz, int channels = 4) {
  Epoch e;
  e.montage = MontageKind::Ear18;
  e.rate = 100.0;
  e.data.resize(channels, 350);
  for (int c = 0; c < channels; ++c)
    for (int t = 0; t < 350; ++t)
      e.data(c, t) = (c + 1) * std::sin(kTwoPi * f_hz * t / 100.0 + 0.3 * c);
  return e;
}

const std::vector<double> kStimuli = {60.0 / 11.0, 60.0 / 7.0, 12.0};

}  // namespace

TEST_CASE("reference bank has the documented geometry") {
  ReferenceBank bank = build_references(kStimuli, 2, 350, 100.0);
  REQUIRE(bank.references.size() == 3);
  for (const auto& ref : bank.references) {
    CHECK(ref.rows() == 4);  // sin/cos for 2 harmonics
    CHECK(ref.cols() == 350);
    for (int r = 0; r < ref.rows(); ++r)
      CHECK(std::sqrt(ref.row(r).squaredNorm() / 350.0) ==
            doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  }
  CHECK_THROWS_AS((void)build_references({30.0}, 2, 350, 100.0),
                  std::invalid_argument);  // 2nd harmonic above Nyquist
}

TEST_CASE("canonical correlation of a matrix with itself is 1") {
  Rng rng(17);
  MatrixXd x = random_matrix(5, 350, rng);
  CcaResult r = max_canonical_correlation(x, x);
  CHECK(r.rho == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("canonical correlation finds a tone in a reference pair") {
  MatrixXd x(1, 350);
  for (int t = 0; t < 350; ++t)
    x(0, t) = std::sin(kTwoPi * 10.0 * t / 100.0 + 1.2);
  MatrixXd y(2, 350);
  for (int t = 0; t < 350; ++t) {
    y(0, t) = std::sin(kTwoPi * 10.0 * t / 100.0);
    y(1, t) = std::cos(kTwoPi * 10.0 * t / 100.0);
  }
  CHECK(max_canonical_correlation(x, y).rho > 0.999);
  // Orthogonal tone: 12 Hz (42 cycles) vs the 10 Hz pair (35 cycles), both
  // integer periods over the 350-sample window.
  MatrixXd z(1, 350);
  for (int t = 0; t < 350; ++t) z(0, t) = std::sin(kTwoPi * 12.0 * t / 100.0);
  CHECK(max_canonical_correlation(z, y).rho < 1e-6);
}

TEST_CASE("canonical correlation is scale and offset invariant") {
  Rng rng(23);
  MatrixXd x = random_matrix(4, 350, rng);
  MatrixXd y = random_matrix(3, 350, rng);
  const double base = max_canonical_correlation(x, y).rho;
  MatrixXd x2 = 7.5 * x;
  x2.array() += 3.0;
  CHECK(max_canonical_correlation(x2, y).rho ==
        doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("canonical correlation flags rank-deficient input") {
  Rng rng(29);
  MatrixXd x = random_matrix(3, 350, rng);
  MatrixXd dup(6, 350);
  dup << x, x;  // rank 3 despite 6 rows
  CcaResult r = max_canonical_correlation(dup, random_matrix(4, 350, rng));
  CHECK(r.regularized);
  CHECK(r.rho <= 1.0);
}

TEST_CASE("white noise rarely reaches high canonical correlation") {
  ReferenceBank bank = build_references(kStimuli, 2, 350, 100.0);
  Rng rng(31);
  int exceed = 0;
  const int draws = 300;
  for (int i = 0; i < draws; ++i) {
    MatrixXd x = random_matrix(8, 350, rng);
    for (const auto& ref : bank.references)
      if (max_canonical_correlation(x, ref).rho >= 0.35) ++exceed;
  }
  // Nominal exceedance is ~1%; 10/900 leaves generous slack.
  CHECK(exceed <= 30);
}

TEST_CASE("cca classifies pure tones at each stimulus frequency") {
  ReferenceBank bank = build_references(kStimuli, 2, 350, 100.0);
  for (int k = 0; k < 3; ++k) {
    CcaClassification cls = cca_classify(tone_epoch(kStimuli[k]), bank);
    CHECK(cls.label == k);
    REQUIRE(cls.rho.size() == 3);
    for (int j = 0; j < 3; ++j) CHECK(cls.rho[j] <= cls.rho[k]);
  }
}

TEST_CASE("cca classification is invariant to channel permutation") {
  ReferenceBank bank = build_references(kStimuli, 2, 350, 100.0);
  Epoch e = tone_epoch(kStimuli[1], 6);
  Rng rng(37);
  e.data += 0.5 * random_matrix(6, 350, rng);
  CcaClassification base = cca_classify(e, bank);
  Epoch perm = e;
  perm.data.row(0) = e.data.row(5);
  perm.data.row(5) = e.data.row(0);
  CcaClassification after = cca_classify(perm, bank);
  CHECK(after.label == base.label);
  for (int j = 0; j < 3; ++j)
    CHECK(after.rho[j] == doctest::Approx(base.rho[j]).epsilon(1e-9));
}

TEST_CASE("lda separates two well-separated clouds") {
  Rng rng(41);
  const int n = 60, d = 5;
  MatrixXd feats(2 * n, d);
  std::vector<int> labels;
  for (int i = 0; i < 2 * n; ++i) {
    const int cls = i < n ? 0 : 1;
    for (int j = 0; j < d; ++j)
      feats(i, j) = rng.gaussian() + (cls == 0 ? -3.0 : 3.0);
    labels.push_back(cls);
  }
  LdaModel model = lda_fit(feats, labels, 2);
  int correct = 0;
  for (int i = 0; i < 2 * n; ++i)
    if (lda_predict(model, feats.row(i).transpose()) == labels[i]) ++correct;
  CHECK(correct == 2 * n);
  // The class mean itself must classify to its class.
  CHECK(lda_predict(model, model.means[0]) == 0);
  CHECK(lda_predict(model, model.means[1]) == 1);
}

TEST_CASE("lda with gamma=1 reduces to a nearest-mean rule") {
  Rng rng(43);
  const int n = 40, d = 4;
  MatrixXd feats(2 * n, d);
  std::vector<int> labels;
  for (int i = 0; i < 2 * n; ++i) {
    const int cls = i % 2;
    for (int j = 0; j < d; ++j)
      feats(i, j) = 2.0 * rng.gaussian() + (cls == 0 ? -1.0 : 1.0);
    labels.push_back(cls);
  }
  LdaModel model = lda_fit(feats, labels, 2, 1.0);
  Rng probe_rng(44);
  for (int i = 0; i < 50; ++i) {
    VectorXd x = random_matrix(d, 1, probe_rng);
    const int nearest =
        (x - model.means[0]).squaredNorm() <= (x - model.means[1]).squaredNorm()
            ? 0
            : 1;
    CHECK(lda_predict(model, x) == nearest);
  }
}

TEST_CASE("lda is invariant to duplicating the training set") {
  Rng rng(47);
  const int n = 30, d = 6;
  MatrixXd feats(n, d);
  std::vector<int> labels;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j)
      feats(i, j) = rng.gaussian() + 0.8 * (i % 3);
    labels.push_back(i % 3);
  }
  MatrixXd dup(2 * n, d);
  dup << feats, feats;
  std::vector<int> dup_labels = labels;
  dup_labels.insert(dup_labels.end(), labels.begin(), labels.end());
  LdaModel a = lda_fit(feats, labels, 3, 0.2);
  LdaModel b = lda_fit(dup, dup_labels, 3, 0.2);
  Rng probe_rng(48);
  for (int i = 0; i < 50; ++i) {
    VectorXd x = random_matrix(d, 1, probe_rng);
    CHECK(lda_predict(a, x) == lda_predict(b, x));
  }
}

TEST_CASE("lda rejects degenerate inputs") {
  Rng rng(53);
  MatrixXd feats = random_matrix(10, 3, rng);
  std::vector<int> labels(10, 0);  // class 1 and 2 missing
  CHECK_THROWS_AS((void)lda_fit(feats, labels, 3), std::invalid_argument);
  std::vector<int> short_labels(9, 0);
  CHECK_THROWS_AS((void)lda_fit(feats, short_labels, 3),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)lda_fit(feats, labels, 1, 2.0),
                  std::invalid_argument);  // gamma out of range
}

TEST_CASE("lda model save/load round trip") {
  Rng rng(59);
  MatrixXd feats = random_matrix(30, 4, rng);
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) labels.push_back(i % 3);
  LdaModel model = lda_fit(feats, labels, 3);
  const auto path =
      std::filesystem::temp_directory_path() / "ssvep_lda_rt.bin";
  model.save(path);
  LdaModel back = LdaModel::load(path);
  REQUIRE(back.num_classes() == 3);
  CHECK(back.gamma == model.gamma);
  for (int c = 0; c < 3; ++c) {
    CHECK((back.means[c] - model.means[c]).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.weights[c] - model.weights[c]).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.biases[c] == model.biases[c]);
  }
  Rng probe_rng(60);
  for (int i = 0; i < 20; ++i) {
    VectorXd x = random_matrix(4, 1, probe_rng);
    CHECK(lda_predict(back, x) == lda_predict(model, x));
  }
  std::filesystem::remove(path);
}

TEST_CASE("lda band features respond to the right stimulus band") {
  Epoch e = tone_epoch(kStimuli[2], 3);  // 12 Hz tone on 3 channels
  VectorXd f = lda_band_features(e);
  const SpectralFeatures sf = magnitude_features(e, 3.0, 45.0);
  const int bins = static_cast<int>(sf.matrix.cols());
  REQUIRE(f.size() == 3 * bins);
  // Channel-major layout: channel c owns bins [c*bins, (c+1)*bins); within a
  // channel the bin nearest 12 Hz must dominate the whole spectrum.
  int peak = 0;
  for (int k = 1; k < bins; ++k)
    if (std::abs(sf.bin_freqs[k] - kStimuli[2]) <
        std::abs(sf.bin_freqs[peak] - kStimuli[2]))
      peak = k;
  for (int c = 0; c < 3; ++c) {
    Eigen::Index argmax = 0;
    f.segment(static_cast<Eigen::Index>(c) * bins, bins).maxCoeff(&argmax);
    CHECK(argmax == peak);
  }
  for (int i = 0; i < f.size(); ++i) CHECK(f[i] >= 0.0);
}

TEST_CASE("paired t-test handles identical and degenerate inputs") {
  std::vector<double> a = {0.5, 0.6, 0.7, 0.8};
  TTestResult same = paired_ttest(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);
  CHECK(same.df == 3);
  CHECK_FALSE(same.degenerate);

  // Exactly representable values give an exact constant difference, so the
  // variance is an exact zero.
  std::vector<double> c = {1.5, 2.5, 3.5, 4.5};
  std::vector<double> d = {1.0, 2.0, 3.0, 4.0};
  TTestResult deg = paired_ttest(c, d);
  CHECK(deg.degenerate);
  CHECK(deg.p == 0.0);
  CHECK(deg.mean_diff == doctest::Approx(0.5));

  CHECK_THROWS_AS((void)paired_ttest({1.0}, {2.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)paired_ttest(a, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("paired t-test is antisymmetric") {
  std::vector<double> a = {0.91, 0.83, 0.77, 0.95, 0.88};
  std::vector<double> b = {0.85, 0.80, 0.79, 0.90, 0.84};
  TTestResult ab = paired_ttest(a, b);
  TTestResult ba = paired_ttest(b, a);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
  CHECK(ab.mean_diff == doctest::Approx(-ba.mean_diff).epsilon(1e-12));
}

TEST_CASE("t distribution reproduces the df=12 critical value") {
  CHECK(t_two_tailed_p(2.1788, 12) == doctest::Approx(0.050).epsilon(0.02));
  CHECK(std::abs(t_two_tailed_p(2.1788, 12) - 0.050) < 0.001);
}

TEST_CASE("t p-values match numeric integration of the density") {
  Rng rng(61);
  for (int i = 0; i < 40; ++i) {
    const double t = rng.uniform(-4.0, 4.0);
    const int df = 1 + static_cast<int>(rng.below(30));
    const double p_cf = t_two_tailed_p(t, df);
    const double p_int = t_p_by_integration(t, df);
    CHECK(std::abs(p_cf - p_int) < 1e-9);
  }
}

TEST_CASE("chi-squared upper tail matches known values") {
  // chi2 with 2 df is Exp(1/2): P(X > x) = exp(-x/2).
  for (double x : {0.5, 2.0, 5.0, 10.0})
    CHECK(chi2_upper_p(x, 2) == doctest::Approx(std::exp(-x / 2.0))
                                    .epsilon(1e-10));
  // 1 df relates to the normal tail: P(X > 3.841) ~ 0.05.
  CHECK(chi2_upper_p(3.841, 1) == doctest::Approx(0.05).epsilon(0.01));
  CHECK(chi2_upper_p(0.0, 3) == 1.0);
}

TEST_CASE("incomplete beta edge cases") {
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1,1) = x (uniform distribution).
  for (double x : {0.1, 0.5, 0.9})
    CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-12));
  // Symmetry: I_x(a,b) = 1 - I_{1-x}(b,a).
  CHECK(incomplete_beta(2.5, 4.0, 0.3) ==
        doctest::Approx(1.0 - incomplete_beta(4.0, 2.5, 0.7)).epsilon(1e-12));
}

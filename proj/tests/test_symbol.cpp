#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bousslab/symbol.hpp"
#include "oracles.hpp"

using namespace bousslab;

namespace {

const Dissipation kAllDiss[] = {Dissipation::Complete, Dissipation::PartialU, Dissipation::PartialEta};

SystemSpec random_spec(std::mt19937_64& rng) {
  const auto r = rng() % 4 == 0 ? oracle::random_c2(rng) : oracle::random_c1(rng);
  return make_spec(r.a, r.b, r.c, r.d, kAllDiss[rng() % 3]);
}

oracle::Coeffs coeffs(const SystemSpec& s) { return {s.a, s.b, s.c, s.d, s.nu_eta(), s.nu_u()}; }

}  // namespace

TEST(SymbolMatrix, BbmBbmAtOne) {
  const auto a = symbol_matrix(preset_spec("bbm-bbm", Dissipation::Complete), 1.0);
  EXPECT_NEAR(a.d11, 6.0 / 7, 1e-15);
  EXPECT_NEAR(a.d22, 6.0 / 7, 1e-15);
  EXPECT_NEAR(a.off12, 6.0 / 7, 1e-15);
  EXPECT_NEAR(a.off21, 6.0 / 7, 1e-15);
}

TEST(SymbolMatrix, ZeroAtOrigin) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto a = symbol_matrix(random_spec(rng), 0.0);
    EXPECT_EQ(a.d11, 0.0);
    EXPECT_EQ(a.d22, 0.0);
    EXPECT_EQ(a.off12, 0.0);
    EXPECT_EQ(a.off21, 0.0);
  }
}

TEST(SymbolMatrix, KdvKdvResonanceIsDiagonal) {
  const auto a = symbol_matrix(preset_spec("kdv-kdv", Dissipation::Complete), std::sqrt(6.0));
  EXPECT_NEAR(a.d11, 6.0, 1e-14);
  EXPECT_NEAR(a.d22, 6.0, 1e-14);
  EXPECT_NEAR(a.off12, 0.0, 1e-7);
  EXPECT_NEAR(a.off21, 0.0, 1e-7);
}

TEST(SymbolMatrix, CouplingIsSkewHermitian) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> xi(-50, 50);
  for (int i = 0; i < 2000; ++i) {
    const auto a = symbol_matrix(random_spec(rng), xi(rng)).dense();
    // U = A - D must satisfy U* = -U
    EXPECT_NEAR(std::abs(std::conj(a.m10) + a.m01), 0.0, 1e-13);
    EXPECT_EQ(a.m00.imag(), 0.0);
    EXPECT_GE(a.m00.real(), 0.0);
    EXPECT_GE(a.m11.real(), 0.0);
  }
}

TEST(SymbolMatrix, MatchesGeneratorBuiltFromThePde) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> xi(-20, 20);
  for (int i = 0; i < 1000; ++i) {
    const auto s = random_spec(rng);
    const double x = xi(rng);
    const auto a = symbol_matrix(s, x).dense();
    // A = S B S^{-1} with S = diag(1, H)
    const auto b = oracle::generator_eta_u(coeffs(s), x);
    const double h = oracle::h_weight(coeffs(s), x);
    EXPECT_NEAR(std::abs(a.m00 - b[0]), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.m01 - b[1] / h), 0.0, 1e-10 * std::max(1.0, std::abs(a.m01)));
    EXPECT_NEAR(std::abs(a.m10 - b[2] * h), 0.0, 1e-10 * std::max(1.0, std::abs(a.m10)));
    EXPECT_NEAR(std::abs(a.m11 - b[3]), 0.0, 1e-12);
  }
}

TEST(Eigen, ZeroAtOrigin) {
  const auto e = eigen(preset_spec("kdv-kdv", Dissipation::PartialU), 0.0);
  EXPECT_EQ(e.lambda1, cplx(0.0));
  EXPECT_EQ(e.lambda2, cplx(0.0));
}

TEST(Eigen, BbmBbmAtOne) {
  const auto e = eigen(preset_spec("bbm-bbm", Dissipation::Complete), 1.0);
  EXPECT_NEAR(e.tr, 12.0 / 7, 1e-14);
  EXPECT_NEAR(e.det, 72.0 / 49, 1e-14);
  EXPECT_NEAR(e.delta, -144.0 / 49, 1e-14);
  EXPECT_NEAR(e.lambda1.real(), 6.0 / 7, 1e-14);
  EXPECT_NEAR(std::abs(e.lambda1.imag()), 6.0 / 7, 1e-14);
  EXPECT_NEAR(e.lambda2.imag(), -e.lambda1.imag(), 1e-15);
  EXPECT_NEAR(e.z_abs, 0.0, 1e-15);
}

TEST(Eigen, BbmBbmPartialUHighFrequency) {
  const auto s = preset_spec("bbm-bbm", Dissipation::PartialU);
  const double xi = 100.0;
  const auto e = eigen(s, xi);
  ASSERT_GT(e.delta, 0.0);
  const double expected = 2.0 / (2.0 * s.d * xi * xi);
  EXPECT_NEAR(e.lambda1.real() / expected, 1.0, 0.05);
  // textbook quadratic as a cross-check of the stable formula
  const auto o = oracle::eigenvalues(oracle::generator_eta_u(coeffs(s), xi));
  EXPECT_NEAR(e.lambda1.real(), o[0].real(), 1e-9 * e.lambda2.real());
}

TEST(Eigen, InvariantsOverRandomSamples) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> xi_dist(-50, 50);
  for (int i = 0; i < 5000; ++i) {
    const auto s = random_spec(rng);
    const double xi = xi_dist(rng);
    const auto a = symbol_matrix(s, xi);
    const auto e = eigen(a);
    const double scale = std::max(1.0, std::abs(e.tr));
    ASSERT_GE(e.tr, 0.0);
    ASSERT_GE(e.det, 0.0);
    ASSERT_NEAR(std::abs(e.lambda1 + e.lambda2 - e.tr), 0.0, 1e-10 * scale);
    ASSERT_NEAR(std::abs(e.lambda1 * e.lambda2 - e.det), 0.0, 1e-10 * std::max(1.0, e.det));
    ASSERT_LE(e.lambda1.real(), e.lambda2.real());
    const auto m = multipliers(s, xi);
    if (e.delta <= 0)
      ASSERT_NEAR(e.z_abs, std::abs(a.d11 - a.d22), 1e-10);
    else
      ASSERT_NEAR(e.z_abs, 2.0 * std::abs(xi) * m.sigma, 1e-10 * scale);
  }
}

TEST(Eigen, PerturbationRangeSharesRealPart) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xi_dist(-50, 50);
  int seen = 0;
  for (int i = 0; i < 5000; ++i) {
    const auto e = eigen(random_spec(rng), xi_dist(rng));
    if (e.delta > 0) continue;
    ++seen;
    ASSERT_NEAR(e.lambda1.real(), 0.5 * e.tr, 1e-10);
    ASSERT_NEAR(e.lambda2.real(), 0.5 * e.tr, 1e-10);
  }
  EXPECT_GT(seen, 100);
}

TEST(Eigen, SandwichInNonPerturbationRange) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> xi_dist(-50, 50);
  int seen = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto e = eigen(random_spec(rng), xi_dist(rng));
    if (!(e.delta > 0) || e.coincident) continue;
    ++seen;
    const double l1 = e.lambda1.real();
    ASSERT_GE(l1 + 1e-10, e.det / e.tr);
    ASSERT_LE(l1, std::min(e.tr, 2.0 * e.det / e.tr) + 1e-10);
  }
  EXPECT_GT(seen, 100);
}

TEST(Eigen, PartialUDirectEstimate) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> xi_dist(-50, 50);
  int seen = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto r = oracle::random_c1(rng);
    const auto s = make_spec(r.a, r.b, r.c, r.d, Dissipation::PartialU);
    const double xi = xi_dist(rng);
    const auto e = eigen(s, xi);
    if (!(e.delta > 0) || e.coincident) continue;
    ++seen;
    const auto m = multipliers(s, xi);
    const double ratio = 4.0 * xi * xi * m.sigma * m.sigma / (m.epsilon * m.epsilon);
    // 1 - sqrt(1 - x) = x / (1 + sqrt(1 - x)) avoids cancellation on the reference side
    const double expected = m.epsilon * ratio / (1.0 + std::sqrt(1.0 - ratio));
    ASSERT_NEAR(2.0 * e.lambda1.real(), expected, 1e-8 * expected);
  }
  EXPECT_GT(seen, 100);
}

TEST(Eigen, CoincidentBranch) {
  // KdV-KdV complete at resonance: A = 6 I
  const auto e = eigen(preset_spec("kdv-kdv", Dissipation::Complete), std::sqrt(6.0));
  EXPECT_TRUE(e.coincident);
  EXPECT_NEAR(e.lambda1.real(), 6.0, 1e-12);
  const auto n = semigroup_norm_exact(preset_spec("kdv-kdv", Dissipation::Complete), std::sqrt(6.0), 1.0);
  EXPECT_NEAR(n, std::exp(-6.0), 1e-12);
}

TEST(Semigroup, MatchesTaylorOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> xi_dist(-10, 10), t_dist(0, 5);
  for (int i = 0; i < 3000; ++i) {
    const auto s = random_spec(rng);
    const double xi = xi_dist(rng), t = t_dist(rng);
    const auto m = semigroup(s, xi, t);
    const auto o = oracle::semigroup(coeffs(s), xi, t);
    const double tol = 1e-9 * std::max(1.0, oracle::inf_norm(o));
    ASSERT_NEAR(std::abs(m.m00 - o[0]), 0.0, tol) << s.a << ' ' << s.b << ' ' << xi << ' ' << t;
    ASSERT_NEAR(std::abs(m.m01 - o[1]), 0.0, tol);
    ASSERT_NEAR(std::abs(m.m10 - o[2]), 0.0, tol);
    ASSERT_NEAR(std::abs(m.m11 - o[3]), 0.0, tol);
    ASSERT_NEAR(semigroup_norm_exact(s, xi, t), oracle::spectral_norm(o), 1e-8);
  }
}

TEST(Semigroup, NormExamples) {
  const auto bbm = preset_spec("bbm-bbm", Dissipation::Complete);
  const auto kdv = preset_spec("kdv-kdv", Dissipation::Complete);
  EXPECT_NEAR(semigroup_norm_exact(bbm, 3.7, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(semigroup_norm_exact(bbm, 1.0, 1.0), std::exp(-6.0 / 7), 1e-14);
  EXPECT_NEAR(semigroup_norm_exact(bbm, 1.0, 1.0), 0.42437, 5e-6);
  EXPECT_NEAR(semigroup_norm_exact(kdv, std::sqrt(6.0), 1.0), 2.4788e-3, 1e-7);
}

TEST(Semigroup, BoundExamples) {
  const auto bbm = preset_spec("bbm-bbm", Dissipation::Complete);
  EXPECT_NEAR(semigroup_norm_bound(bbm, 2.0, 0.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(semigroup_norm_bound(bbm, 1.0, 1.0), std::sqrt(2.0) * std::exp(-6.0 / 7), 1e-14);
  EXPECT_NEAR(semigroup_norm_bound(bbm, 1.0, 1.0), 0.60015, 5e-6);
  EXPECT_NEAR(semigroup_norm_bound(bbm, 0.0, 5.0), std::sqrt(2.0), 1e-15);
}

TEST(Semigroup, BoundDominatesExact) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> xi_dist(-50, 50), t_dist(0, 100);
  for (int i = 0; i < 10000; ++i) {
    const auto s = random_spec(rng);
    const double xi = xi_dist(rng), t = t_dist(rng);
    ASSERT_LE(semigroup_norm_exact(s, xi, t), semigroup_norm_bound(s, xi, t) + 1e-9);
  }
}

TEST(Semigroup, GroupLaw) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> xi_dist(-20, 20), t_dist(0, 3);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_spec(rng);
    const double xi = xi_dist(rng), t1 = t_dist(rng), t2 = t_dist(rng);
    const auto lhs = semigroup(s, xi, t1 + t2);
    const auto rhs = semigroup(s, xi, t2) * semigroup(s, xi, t1);
    const double scale = std::max(std::sqrt(lhs.frobenius_sq()), 1e-300);
    ASSERT_LE(std::sqrt(Mat2{lhs.m00 - rhs.m00, lhs.m01 - rhs.m01, lhs.m10 - rhs.m10, lhs.m11 - rhs.m11}
                            .frobenius_sq()),
              1e-11 * std::max(scale, 1e-3));
  }
}

TEST(Semigroup, ContractiveWhenDamped) {
  // A has nonnegative Hermitian part, so exp(-tA) never expands
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> xi_dist(-50, 50), t_dist(0, 100);
  for (int i = 0; i < 5000; ++i) {
    const auto s = random_spec(rng);
    ASSERT_LE(semigroup_norm_exact(s, xi_dist(rng), t_dist(rng)), 1.0 + 1e-12);
  }
}

TEST(Resonance, FamilyTwoUnderPartialDamping) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto r = oracle::random_c2(rng);
    const auto s = make_spec(r.a, r.b, r.c, r.d, Dissipation::PartialU);
    const double xi = *resonance_point(s);
    EXPECT_NEAR(eigen(s, xi).det, 0.0, 1e-14);
    for (double t : {0.0, 0.5, 1.0, 10.0, 100.0, 1000.0})
      EXPECT_GE(semigroup_norm_exact(s, xi, t), 1.0 / std::sqrt(2.0)) << t;
  }
  EXPECT_FALSE(resonance_point(preset_spec("bbm-bbm", Dissipation::PartialU)).has_value());
}

TEST(Classify, CorollaryExamples) {
  EXPECT_EQ(classify(preset_spec("kdv-kdv", Dissipation::Complete)).klass, DecayClass::KdVBurgers);
  for (auto d : {Dissipation::Complete, Dissipation::PartialU})
    EXPECT_EQ(classify(preset_spec("classical-boussinesq", d)).klass, DecayClass::BBMBurgers);
  EXPECT_EQ(classify(preset_spec("bbm-bbm", Dissipation::PartialU)).klass, DecayClass::SlowDecay);
  EXPECT_EQ(classify(preset_spec("bbm-bbm", Dissipation::Complete)).klass, DecayClass::BBMBurgers);
  EXPECT_EQ(classify(preset_spec("bona-smith", Dissipation::PartialU)).klass, DecayClass::BBMBurgers);
  // eta-only damping mirrors the rule with alpha in place of epsilon
  EXPECT_EQ(classify(preset_spec("bbm-bbm", Dissipation::PartialEta)).klass, DecayClass::SlowDecay);
  EXPECT_EQ(decay_class(preset_spec("kdv-kdv", Dissipation::PartialEta)), DecayClass::KdVBurgers);
}

TEST(Classify, OrderRules) {
  // brute force over every indicator pattern reachable by valid systems
  std::mt19937_64 rng(14);
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_spec(rng);
    const auto o = orders(s);
    const auto k = decay_class(s);
    if (s.diss == Dissipation::Complete) {
      EXPECT_EQ(k, o.order_sigma <= 0 ? DecayClass::BBMBurgers : DecayClass::KdVBurgers);
    } else {
      const int od = s.diss == Dissipation::PartialU ? o.order_epsilon : o.order_alpha;
      const double bar = 2.0 - od / 2.0;
      if (o.order_sigma >= bar) EXPECT_EQ(k, DecayClass::KdVBurgers);
      else if (std::abs(o.order_sigma) < bar) EXPECT_EQ(k, DecayClass::BBMBurgers);
      else EXPECT_EQ(k, DecayClass::SlowDecay);
    }
  }
}

TEST(Thresholds, LowFrequencyExamples) {
  EXPECT_GE(low_freq_threshold(preset_spec("bbm-bbm", Dissipation::Complete)), 0.5);
  EXPECT_LT(low_freq_threshold(preset_spec("kdv-kdv", Dissipation::Complete)), std::sqrt(6.0));
  std::mt19937_64 rng(15);
  for (int i = 0; i < 30; ++i) EXPECT_GT(low_freq_threshold(random_spec(rng)), 0.0);
}

TEST(Thresholds, LowFrequencyRegimeHolds) {
  for (const auto& p : kPresets) {
    for (auto d : {Dissipation::Complete, Dissipation::PartialU}) {
      const auto s = preset_spec(p.id, d);
      const double dm = low_freq_threshold(s);
      for (double xi = 1e-3; xi <= dm; xi += 1e-3) {
        const auto e = eigen(s, xi);
        const double ratio = e.tr / ((s.nu_eta() + s.nu_u()) * xi * xi);
        ASSERT_LE(e.delta, 0.0) << p.id << ' ' << xi;
        ASSERT_GE(ratio, 0.5);
        ASSERT_LE(ratio, 2.0);
      }
    }
  }
}

TEST(Thresholds, ClassificationInvariants) {
  for (const auto& p : kPresets) {
    for (auto d : {Dissipation::Complete, Dissipation::PartialU}) {
      const auto c = classify(preset_spec(p.id, d));
      EXPECT_GT(c.delta_m, 0.0);
      EXPECT_LE(c.delta_m, c.delta_M);
      if (c.resonance) {
        EXPECT_GE(*c.resonance, c.delta_m);
        EXPECT_LE(*c.resonance, c.delta_M);
      }
    }
  }
}

TEST(Thresholds, HighFrequencyRegimeHolds) {
  // beyond delta_M the sign of Delta never changes again
  for (const auto& p : kPresets) {
    for (auto d : {Dissipation::Complete, Dissipation::PartialU}) {
      const auto s = preset_spec(p.id, d);
      const auto c = classify(s);
      const auto end = eigen(s, kScanHighMax);
      const bool pos_end = end.delta > 0 && !end.coincident;
      for (double xi = c.delta_M * 1.001; xi < kScanHighMax; xi *= 1.01) {
        const auto e = eigen(s, xi);
        ASSERT_EQ(e.delta > 0 && !e.coincident, pos_end) << p.id << ' ' << to_string(d) << ' ' << xi;
      }
    }
  }
}

namespace {

// min over samples of -log ||exp(-tA)|| / (t g(xi)), zero norms skipped
double fitted_beta(const SystemSpec& s, double lo, double hi, int power) {
  double beta = HUGE_VAL;
  for (double t : {1.0, 10.0, 100.0}) {
    for (int i = 0; i <= 200; ++i) {
      const double xi = lo + (hi - lo) * i / 200.0;
      const double n = semigroup_norm_exact(s, xi, t);
      if (n == 0) continue;
      beta = std::min(beta, -std::log(n) / (t * std::pow(xi, power)));
    }
  }
  return beta;
}

}  // namespace

TEST(Dichotomy, HighFrequencyDamping) {
  for (const auto& p : kPresets) {
    for (auto d : {Dissipation::Complete, Dissipation::PartialU}) {
      const auto s = preset_spec(p.id, d);
      const auto c = classify(s);
      const double lo = c.delta_M * 1.0001, hi = 10.0 * c.delta_M;
      if (c.klass == DecayClass::KdVBurgers) {
        EXPECT_GT(fitted_beta(s, lo, hi, 2), 0.0) << p.id;
      } else if (c.klass == DecayClass::BBMBurgers) {
        const double beta = fitted_beta(s, lo, hi, 0);
        EXPECT_GT(beta, 0.0) << p.id;
        // not KdV-like: the xi^2-weighted rate collapses at the top of the band
        EXPECT_LT(fitted_beta(s, 0.9 * hi, hi, 2), beta) << p.id;
      }
    }
  }
}

TEST(Dichotomy, SlowDecayScalesLikeInverseSquare) {
  const auto s = preset_spec("bbm-bbm", Dissipation::PartialU);
  const double t = 100.0;
  auto rate = [&](double xi) { return -std::log(semigroup_norm_exact(s, xi, t)) / t; };
  // exp(-beta t / xi^2): rate * xi^2 settles to a constant
  EXPECT_NEAR(rate(20.0) * 400.0 / (rate(40.0) * 1600.0), 1.0, 0.1);
  EXPECT_NEAR(rate(10.0) * 100.0 / (rate(20.0) * 400.0), 1.0, 0.2);
  EXPECT_GT(semigroup_norm_exact(s, 20.0, t), std::exp(-t / 50.0));
  EXPECT_GT(semigroup_norm_exact(s, 40.0, t), std::exp(-t / 200.0));
}

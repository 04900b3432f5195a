#include <gtest/gtest.h>

#include <cmath>

#include "horton/analytic.hpp"

using namespace horton;

namespace {

double poly(const std::vector<double>& q, double z, int deriv) {
  double s = 0;
  for (std::size_t k = static_cast<std::size_t>(deriv); k < q.size(); ++k) {
    double f = 1;
    for (int r = 0; r < deriv; ++r) f *= static_cast<double>(k - static_cast<std::size_t>(r));
    s += q[k] * f * std::pow(z, static_cast<double>(k - static_cast<std::size_t>(deriv)));
  }
  return s;
}

// Tokunaga coefficients straight from sigma and the polynomial
Matrix naive_tokunaga(const std::vector<double>& q, int K, Matrix& reg) {
  std::vector<double> sigma{0.0};
  for (int j = 1; j <= K; ++j) {
    double s = sigma.back();
    sigma.push_back((poly(q, s, 0) - s * poly(q, s, 1)) / (1 - poly(q, s, 1)));
  }
  auto pi = [&](int j) { return sigma[j] - sigma[j - 1]; };
  Matrix T = square_matrix(K);
  reg = square_matrix(K);
  for (int j = 2; j <= K; ++j) {
    double a = sigma[j - 1], b = sigma[j - 2], p = pi(j - 1);
    double den = poly(q, a, 0) - poly(q, b, 0) - p * poly(q, b, 1);
    for (int i = 1; i < j; ++i) {
      reg[i][j] = pi(i) * poly(q, a, 2) / (1 - poly(q, a, 1));
      double num = i < j - 1 ? pi(i) * (poly(q, a, 1) - poly(q, b, 1) - p * poly(q, b, 2))
                             : p * poly(q, a, 1) + p * poly(q, b, 1) - 2 * poly(q, a, 0) + 2 * poly(q, b, 0);
      T[i][j] = num / den + reg[i][j];
    }
  }
  return T;
}

double mixed_tol(double ref) { return 1e-9 * std::max(1.0, std::abs(ref)); }

}  // namespace

TEST(Tokunaga, Binary) {
  auto tab = tokunaga_analytic(OffspringDistribution::binary(), 8);
  EXPECT_EQ(tab.provenance, Provenance::analytic);
  for (int j = 2; j <= 8; ++j)
    for (int i = 1; i < j; ++i) {
      double ref = std::ldexp(1.0, j - i - 1);
      EXPECT_NEAR(tab.T[i][j], ref, 1e-9);
      EXPECT_NEAR(tab.T_reg[i][j], ref, 1e-9);
      EXPECT_NEAR(tab.t_total[i][j], ref + (i == j - 1 ? 2 : 0), 1e-9);
    }
}

TEST(Tokunaga, MatchesNaiveFormulas) {
  for (std::vector<double> q : {std::vector<double>{0.6, 0.0, 0.3, 0.1}, std::vector<double>{0.6, 0.0, 0.4},
                                std::vector<double>{0.6, 0.0, 0.25, 0.1, 0.05}}) {
    Matrix reg;
    auto ref = naive_tokunaga(q, 6, reg);
    auto tab = tokunaga_analytic(OffspringDistribution::explicit_finite(q), 6);
    for (int j = 2; j <= 6; ++j)
      for (int i = 1; i < j; ++i) {
        EXPECT_NEAR(tab.T[i][j], ref[i][j], 1e-9 * std::max(1.0, ref[i][j]));
        EXPECT_NEAR(tab.T_reg[i][j], reg[i][j], 1e-9 * std::max(1.0, reg[i][j]));
      }
  }
}

TEST(Tokunaga, TableInvariants) {
  for (auto d : {OffspringDistribution::explicit_finite({0.6, 0.0, 0.3, 0.1}), OffspringDistribution::igw(0.7),
                 OffspringDistribution::zipf_example()}) {
    auto tab = tokunaga_analytic(d, 7);
    for (int j = 2; j <= 7; ++j)
      for (int i = 1; i < j; ++i) {
        EXPECT_GE(tab.T[i][j], 0.0);
        EXPECT_GE(tab.T_reg[i][j], 0.0);
        EXPECT_LE(tab.T_reg[i][j], tab.T[i][j] + (i == j - 1 ? 2 : 0) + 1e-12);
        EXPECT_DOUBLE_EQ(tab.t_total[i][j], tab.T[i][j] + (i == j - 1 ? 2 : 0));
      }
  }
}

TEST(Tokunaga, IgwSelfSimilar) {
  for (double q0 : {0.6, 0.75, 0.9}) {
    auto k = igw_constants(q0);
    auto tab = tokunaga_analytic(OffspringDistribution::igw(q0), 8);
    for (int j = 2; j <= 8; ++j)
      for (int i = 1; i < j; ++i) {
        int m = j - i;
        double Tm = m == 1 ? k.T1 : k.a * std::pow(k.c, m - 1);
        double To = std::pow(k.c, m - 1);
        EXPECT_NEAR(tab.T[i][j], Tm, mixed_tol(Tm)) << q0 << " " << i << " " << j;
        EXPECT_NEAR(tab.T_reg[i][j], To, mixed_tol(To)) << q0 << " " << i << " " << j;
      }
  }
}

TEST(Tokunaga, IgwToeplitz) {
  for (double q0 : {0.5, 0.6, 0.75}) {
    auto tab = tokunaga_analytic(OffspringDistribution::igw(q0), 10);
    for (int j = 2; j <= 10; ++j)
      for (int i = 1; i < j; ++i) EXPECT_NEAR(tab.T[i][j], tab.T[1][1 + j - i], 1e-9);
  }
}

TEST(Tokunaga, BadK) { EXPECT_THROW(tokunaga_analytic(OffspringDistribution::binary(), 1), DomainError); }

TEST(IgwConstants, Examples) {
  auto h = igw_constants(0.5);
  EXPECT_DOUBLE_EQ(h.c, 2.0);
  EXPECT_NEAR(h.a, 1.0, 1e-15);
  EXPECT_NEAR(h.T1, 1.0, 1e-15);
  EXPECT_NEAR(h.R, 4.0, 1e-14);
  auto k = igw_constants(0.75);
  EXPECT_NEAR(k.c, 4.0, 1e-15);
  EXPECT_NEAR(k.a, 3 * (std::cbrt(4.0) - 1), 1e-14);
  EXPECT_NEAR(k.a, 1.76221, 1e-5);
  EXPECT_NEAR(k.R, 6.349604, 1e-6);
  for (double q = 0.5; q < 0.995; q += 0.01) {
    auto c = igw_constants(q);
    EXPECT_NEAR(c.R, c.R_alt, 1e-12 * c.R);
  }
  EXPECT_THROW(igw_constants(0.4), DomainError);
}

TEST(IgwConstants, MonotoneInQ0) {
  double pc = 0, pR = 0;
  for (double q = 0.5; q < 0.995; q += 0.01) {
    auto c = igw_constants(q);
    EXPECT_GT(c.c, pc);
    EXPECT_GT(c.R, pR);
    pc = c.c;
    pR = c.R;
  }
}

TEST(HortonExponent, Examples) {
  auto b = horton_exponent(TokunagaSequence::self_similar(1.0, 1.0, 2.0));
  EXPECT_NEAR(b.R, 4.0, 1e-10);
  for (double q0 : {0.6, 0.75, 0.9}) {
    auto k = igw_constants(q0);
    auto h = horton_exponent(TokunagaSequence::self_similar(k.T1, k.a, k.c));
    EXPECT_NEAR(h.R, std::pow(1 - q0, -1 / q0), 1e-10 * h.R);
    EXPECT_NEAR(h.w0, std::pow(k.c, -k.c / (k.c - 1)), 1e-12);
  }
  EXPECT_NEAR(horton_exponent(TokunagaSequence::self_similar(igw_constants(0.9).T1, igw_constants(0.9).a, 10.0)).R,
              12.915497, 1e-6);
}

TEST(HortonExponent, NoTailIsFinitePolynomial) {
  // -1 + 3z = 0 when every T_k vanishes past T_1 = 1
  auto h = horton_exponent({{1.0}, 0.0});
  EXPECT_NEAR(h.R, 3.0, 1e-10);
}

TEST(HortonExponent, StructuralErrors) {
  EXPECT_THROW(horton_exponent({{-1.5}, 0.0}), StructuralError);
  EXPECT_THROW(horton_exponent({{}, 2.0}), DomainError);
}

TEST(Regularity, FiniteSecondMoment) {
  auto r = regularity_probe(OffspringDistribution::binary());
  EXPECT_EQ(r.status, ProbeStatus::regular);
  EXPECT_NEAR(r.S1, 0.5, 1e-6);
  EXPECT_NEAR(r.L, 0.0, 1e-5);
  auto m = regularity_probe(OffspringDistribution::explicit_finite({0.6, 0.0, 0.25, 0.1, 0.05}));
  EXPECT_EQ(m.status, ProbeStatus::regular);
}

TEST(Regularity, ZipfExample) {
  // logarithmic approach: (1-S(x))/(1-x) - 1/2 decays like 1/ln(1-x)
  auto r = regularity_probe(OffspringDistribution::zipf_example());
  EXPECT_EQ(r.status, ProbeStatus::regular);
  EXPECT_NEAR(r.S1, 0.5, 0.01);
  EXPECT_NEAR(r.L, 0.0, 0.05);
}

TEST(Regularity, ZipfIgw) {
  for (double q : {0.6, 0.75, 0.9}) {
    double alpha = 1 / q;
    auto r = regularity_probe(OffspringDistribution::igw(q));
    EXPECT_EQ(r.status, ProbeStatus::regular);
    EXPECT_NEAR(r.S1, (alpha - 1) / alpha, 1e-9);
    EXPECT_NEAR(r.L, 2 - alpha, 1e-8);
  }
}

TEST(Regularity, SubcriticalHasZeroDerivative) {
  auto r = regularity_probe(OffspringDistribution::explicit_finite({0.6, 0.0, 0.4}));
  EXPECT_NEAR(r.S1, 0.0, 1e-6);
}

#include <gtest/gtest.h>

#include <cmath>

#include "horton/analytic.hpp"
#include "horton/distribution.hpp"

using namespace horton;

namespace {

// direct polynomial evaluation, no w-form
double poly(const std::vector<double>& q, double z, int deriv) {
  double s = 0;
  for (std::size_t k = static_cast<std::size_t>(deriv); k < q.size(); ++k) {
    double f = 1;
    for (int r = 0; r < deriv; ++r) f *= static_cast<double>(k - static_cast<std::size_t>(r));
    s += q[k] * f * std::pow(z, static_cast<double>(k - static_cast<std::size_t>(deriv)));
  }
  return s;
}

double igw_pmf_gamma(double q, int k) {
  double a = 1.0 / q;
  return (a - 1.0) * std::exp(std::lgamma(k - a) - std::lgamma(k + 1.0)) / std::tgamma(2.0 - a);
}

// Q(x) for the k^{-3} law by direct summation of its coefficients
double zipf_direct(double x) {
  double s = 2.0 / 3.0;
  for (int k = 2; k < 4000; ++k) s += (4.0 / 3.0) / (k * (double(k) * k - 1.0)) * std::pow(x, k);
  return s;
}

const std::vector<double> sub{0.6, 0.0, 0.4};
const std::vector<double> mixed{0.6, 0.0, 0.3, 0.1};

}  // namespace

TEST(Igw, Coefficients) {
  auto b = OffspringDistribution::igw(0.5);
  EXPECT_DOUBLE_EQ(b.pmf(0), 0.5);
  EXPECT_DOUBLE_EQ(b.pmf(2), 0.5);
  for (std::size_t k : {1u, 3u, 4u, 10u, 100u}) EXPECT_EQ(b.pmf(k), 0.0);

  auto d = OffspringDistribution::igw(0.75);
  EXPECT_NEAR(d.pmf(0), 0.75, 1e-15);
  EXPECT_EQ(d.pmf(1), 0.0);
  EXPECT_NEAR(d.pmf(2), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(d.pmf(3), 1.0 / 27.0, 1e-15);
}

TEST(Igw, MatchesGammaForm) {
  for (double q : {0.6, 0.75, 0.9}) {
    auto d = OffspringDistribution::igw(q);
    for (int k : {2, 3, 5, 17, 100, 1000, 4095, 4096, 5000, 100000})
      // lgamma near 1e6 limits the reference itself to about 1e-10
      EXPECT_NEAR(d.pmf(static_cast<std::size_t>(k)) / igw_pmf_gamma(q, k), 1.0, 1e-9) << q << " " << k;
  }
}

TEST(Igw, RatioRecurrence) {
  double q = 0.6;
  auto d = OffspringDistribution::igw(q);
  for (int k = 2; k < 300; ++k)
    EXPECT_NEAR(d.pmf(k + 1) / d.pmf(k), (k - 1.0 / q) / (k + 1.0), 1e-12);
}

TEST(Igw, ZipfTailConstant) {
  for (double q : {0.6, 0.75, 0.9}) {
    auto d = OffspringDistribution::igw(q);
    double C = (1 - q) / (q * std::tgamma(2 - 1 / q));
    double k = 1e4;
    EXPECT_NEAR(d.pmf(10000) * std::pow(k, (1 + q) / q) / C, 1.0, 0.01);
  }
}

TEST(Igw, DomainErrors) {
  EXPECT_THROW(OffspringDistribution::igw(0.49), DomainError);
  EXPECT_THROW(OffspringDistribution::igw(1.0), DomainError);
  EXPECT_THROW(OffspringDistribution::explicit_finite({0.5, 0.1, 0.4}), DomainError);
  EXPECT_THROW(OffspringDistribution::explicit_finite({0.4, 0.0, 0.6}), DomainError);
}

TEST(Distribution, Normalization) {
  for (auto d : {OffspringDistribution::binary(), OffspringDistribution::explicit_finite(mixed)}) {
    double s = 0;
    for (double p : d.pmf_table(10)) s += p;
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_EQ(d.pmf(1), 0.0);
  }
  // IGW(0.9): Q(z) -> 1 as z -> 1 and partial sums stay below it
  auto d = OffspringDistribution::igw(0.9);
  double s = 0;
  for (double p : d.pmf_table(2000)) s += p;
  EXPECT_LT(s, 1.0);
  EXPECT_NEAR(gf_eval(d, 1.0, 0), 1.0, 1e-15);
}

TEST(GfEval, Examples) {
  auto b = OffspringDistribution::binary();
  EXPECT_NEAR(gf_eval(b, 0.5, 0), 0.625, 1e-15);
  for (auto d : {b, OffspringDistribution::igw(0.75), OffspringDistribution::igw(0.9), OffspringDistribution::zipf_example()})
    EXPECT_NEAR(gf_eval(d, 1.0, 1), 1.0, 1e-12);
  EXPECT_NEAR(gf_eval(OffspringDistribution::igw(0.75), 0.0, 0), 0.75, 1e-15);
  EXPECT_THROW(gf_eval(b, 1.5, 0), DomainError);
  EXPECT_THROW(gf_eval(b, -0.1, 0), DomainError);
}

TEST(GfEval, IgwClosedForms) {
  for (double q : {0.5, 0.6, 0.75, 0.9}) {
    auto d = OffspringDistribution::igw(q);
    for (double z = 0; z < 1; z += 0.07) {
      EXPECT_NEAR(gf_eval(d, z, 0), z + q * std::pow(1 - z, 1 / q), 1e-13);
      EXPECT_NEAR(gf_eval(d, z, 1), 1 - std::pow(1 - z, 1 / q - 1), 1e-13);
      EXPECT_NEAR(gf_eval(d, z, 2), (1 / q - 1) * std::pow(1 - z, 1 / q - 2), 1e-12);
    }
  }
}

TEST(GfEval, FiniteMatchesPolynomial) {
  auto d = OffspringDistribution::explicit_finite(mixed);
  for (double z = 0; z <= 1.0; z += 0.05)
    for (int r = 0; r <= 2; ++r) EXPECT_NEAR(gf_eval(d, z, r), poly(mixed, z, r), 1e-14);
}

TEST(GfEval, ZipfMatchesDirectSum) {
  auto d = OffspringDistribution::zipf_example();
  for (double z : {0.0, 0.1, 0.3, 0.5, 0.6666, 0.8}) EXPECT_NEAR(gf_eval(d, z, 0), zipf_direct(z), 1e-13);
  for (int k = 2; k < 50; ++k) EXPECT_NEAR(d.pmf(k), (4.0 / 3.0) / (k * (double(k) * k - 1.0)), 1e-16);
}

TEST(SEval, Examples) {
  EXPECT_NEAR(s_eval(OffspringDistribution::binary(), 0.6), 0.8, 1e-15);
  EXPECT_NEAR(s_eval(OffspringDistribution::igw(0.75), 0.2), 0.8, 1e-15);
  auto d = OffspringDistribution::explicit_finite(sub);
  EXPECT_NEAR(s_eval(d, 0.6), 0.456 / 0.52, 1e-14);
  EXPECT_EQ(s_eval(d, 1.0), 1.0);
  // generic formula from the polynomial
  auto m = OffspringDistribution::explicit_finite(mixed);
  for (double z = 0; z < 0.95; z += 0.05) {
    double ref = (poly(mixed, z, 0) - z * poly(mixed, z, 1)) / (1 - poly(mixed, z, 1));
    EXPECT_NEAR(s_eval(m, z), ref, 1e-13);
  }
}

TEST(SEval, IgwLinear) {
  for (double q : {0.5, 0.6, 0.9}) {
    auto d = OffspringDistribution::igw(q);
    for (double z = 0; z < 1; z += 0.1) EXPECT_NEAR(s_eval(d, z), q + (1 - q) * z, 1e-13);
  }
}

TEST(GEval, Examples) {
  auto b = OffspringDistribution::binary();
  for (double z : {0.0, 0.3, 0.9, 0.999}) EXPECT_NEAR(g_eval(b, z), 0.5, 1e-14);
  auto zf = OffspringDistribution::zipf_example();
  EXPECT_NEAR(g_eval(zf, 0.5), -(2.0 / 3.0) / 0.5 * std::log(0.5), 1e-13);
  EXPECT_NEAR(g_eval(zf, 0.5), 0.924196, 1e-6);
  for (double q : {0.6, 0.75}) {
    auto d = OffspringDistribution::igw(q);
    for (double z = 0; z < 1; z += 0.1) EXPECT_NEAR(g_eval(d, z), q * std::pow(1 - z, 1 / q - 2), 1e-12);
  }
}

TEST(GEval, FactorizationIdentity) {
  for (auto d : {OffspringDistribution::binary(), OffspringDistribution::igw(0.6), OffspringDistribution::igw(0.9),
                 OffspringDistribution::zipf_example()}) {
    for (double z = 0; z < 1; z += 0.01) {
      double lhs = gf_eval(d, z, 0) - z;
      EXPECT_NEAR(lhs, (1 - z) * (1 - z) * g_eval(d, z), 1e-10);
    }
  }
}

TEST(OrderDistribution, Binary) {
  auto od = order_distribution(OffspringDistribution::binary(), 40);
  ASSERT_EQ(od.size(), 40);
  for (int j = 1; j <= 40; ++j) {
    EXPECT_NEAR(od.pi[j], std::ldexp(1.0, -j), 1e-15);
    EXPECT_NEAR(od.sigma[j], 1 - std::ldexp(1.0, -j), 1e-15);
  }
  EXPECT_EQ(od.sigma[0], 0.0);
}

TEST(OrderDistribution, Igw) {
  auto od = order_distribution(OffspringDistribution::igw(0.75), 5);
  for (int j = 1; j <= 5; ++j) EXPECT_NEAR(od.pi[j], 0.75 * std::pow(0.25, j - 1), 1e-15);
}

TEST(OrderDistribution, Subcritical) {
  auto od = order_distribution(OffspringDistribution::explicit_finite(sub), 6);
  EXPECT_NEAR(od.pi[1], 0.6, 1e-15);
  EXPECT_NEAR(od.pi[2], 0.456 / 0.52 - 0.6, 1e-14);
  EXPECT_NEAR(od.pi[2], 0.276923, 1e-6);
}

TEST(OrderDistribution, MatchesNaiveIteration) {
  auto d = OffspringDistribution::explicit_finite(mixed);
  auto od = order_distribution(d, 8);
  double s = 0;
  for (int j = 1; j <= 8; ++j) {
    double next = (poly(mixed, s, 0) - s * poly(mixed, s, 1)) / (1 - poly(mixed, s, 1));
    EXPECT_NEAR(od.pi[j], next - s, 1e-12);
    s = next;
  }
}

TEST(OrderDistribution, RoutesAgreeEverywhere) {
  std::vector<OffspringDistribution> laws = {OffspringDistribution::binary(), OffspringDistribution::igw(0.6),
                                             OffspringDistribution::igw(0.9), OffspringDistribution::zipf_example(),
                                             OffspringDistribution::explicit_finite(sub),
                                             OffspringDistribution::explicit_finite(mixed)};
  for (const auto& d : laws) {
    auto od = order_distribution(d, 20);
    EXPECT_LE(od.route_gap, 1e-10) << kind_name(d.kind());
    for (int j = 1; j <= od.size(); ++j) {
      EXPECT_GT(od.pi[j], 0.0);
      EXPECT_NEAR(od.sigma[j], od.sigma[j - 1] + od.pi[j], 1e-15);
      // sigma itself rounds to 1, the stored tail 1 - sigma does not
      EXPECT_LT(od.tail[j], od.tail[j - 1]);
      EXPECT_LE(od.sigma[j], 1.0);
      EXPECT_NEAR(od.pi_direct[j], od.pi[j], 1e-10);
    }
  }
}

TEST(OrderDistribution, CriticalSigmaApproachesOne) {
  auto od = order_distribution(OffspringDistribution::zipf_example(), 60);
  EXPECT_GT(od.sigma[od.size()], 1 - 1e-12);
}

TEST(OrderDistribution, BadInput) { EXPECT_THROW(order_distribution(OffspringDistribution::binary(), 0), DomainError); }

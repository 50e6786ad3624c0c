#include <gtest/gtest.h>

#include "elastodtn/dtn.hpp"
#include "elastodtn/specfun.hpp"
#include "elastodtn/verify.hpp"

using namespace elastodtn;

TEST(Bessel, WronskianAcrossOrdersAndArguments)
{
  for (int n : {0, 1, 7, 30, 60})
    for (double x : {0.1, 0.9, 3.0, 17.5, 50.0})
    {
      const SphBessel b = sph_bessel(n, x);
      EXPECT_NEAR(x * x * (b.j * b.dy - b.dj * b.y), 1.0, 1e-10) << "n=" << n << " x=" << x;
    }
}

TEST(Bessel, LowOrderClosedForms)
{
  const double x = 1.3;
  const SphBessel b0 = sph_bessel(0, x), b1 = sph_bessel(1, x);
  EXPECT_NEAR(b0.j, std::sin(x) / x, 1e-15);
  EXPECT_NEAR(b0.y, -std::cos(x) / x, 1e-15);
  EXPECT_NEAR(b1.j, std::sin(x) / (x * x) - std::cos(x) / x, 1e-15);
}

TEST(Bessel, HankelFirstKind)
{
  const HankelValue h = sph_hankel(1, 1, 1.0);
  EXPECT_NEAR(h.h.real(), std::sin(1.0) - std::cos(1.0), 1e-14);
  EXPECT_NEAR(h.h.imag(), -std::cos(1.0) - std::sin(1.0), 1e-14);
}

TEST(Bessel, LogDerivativeLargeOrder)
{
  // z_n(t) = -(n+1) + t^2 / (2n) + O(n^-2) for n >> t.
  const int n = 400;
  const cplx z = log_deriv(1, n, pi);
  EXPECT_NEAR(z.real(), -(n + 1) + pi * pi / (2.0 * n), 1e-3);
  // Im z = 1 / (t |h|^2) > 0; it underflows in double at this order.
  EXPECT_GT(log_deriv_ext(1, n, pi).imag(), 0.0L);
}

TEST(Bessel, RejectsBadArguments)
{
  EXPECT_THROW(sph_bessel(-1, 1.0), DomainError);
  EXPECT_THROW(sph_bessel(2, 0.0), DomainError);
}

TEST(Harmonics, LegendreDerivativeMatchesDifference)
{
  const double th = 1.0, h = 1e-6;
  for (int n : {1, 4, 9})
    for (int m = 0; m <= n; ++m)
    {
      LegendreTable t(n, th), tp(n, th + h), tm(n, th - h);
      EXPECT_NEAR(t.d(n, m), (tp.p(n, m) - tm.p(n, m)) / (2 * h), 1e-7);
    }
}

TEST(Harmonics, NegativeOrderIsConjugate)
{
  const cplx a = sph_harmonic({3, 2}, 0.7, 1.9), b = sph_harmonic({3, -2}, 0.7, 1.9);
  EXPECT_NEAR(std::abs(a - std::conj(b)), 0.0, 1e-15);
}

TEST(Harmonics, TangentialFieldsOrthogonalToRadial)
{
  const double th = 0.6, ph = 2.2;
  const Vec3 er(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
  const VectorHarmonic h = vector_harmonics({4, -1}, th, ph, 1.0);
  EXPECT_LT(std::abs(h.U.dot(er.cast<cplx>())), 1e-14);
  EXPECT_LT(std::abs(h.V.dot(er.cast<cplx>())), 1e-14);
  // Eigen conjugates complex cross products, so split into real and imaginary parts.
  const CVec3 c = er.cross(Vec3(h.U.real())).cast<cplx>() +
                  cplx(0, 1) * er.cross(Vec3(h.U.imag())).cast<cplx>();
  EXPECT_LT((h.V - c).norm(), 1e-14);
}

TEST(Harmonics, SuiteGramAndIdentities)
{
  for (const Check &c : verify_harmonics_suite())
    EXPECT_TRUE(c.pass) << c.name << " value " << c.value;
}

TEST(Harmonics, RadialProfileIdentities)
{
  const RadialProfile f{[](double r) { return cplx(r * r * r); },
                        [](double r) { return cplx(3 * r * r); },
                        [](double r) { return cplx(6 * r); }};
  EXPECT_LT(verify_vector_identities({2, 1}, f, 0.7).max(), 1e-5);
}

TEST(Bessel, InequalitiesHaveOnset)
{
  const ElasticParams p;
  for (const LemmaRow &r : verify_bessel_lemmas(1, 120, p.kappa_p, p.kappa_s, 1.0, 0.5))
  {
    EXPECT_GE(r.onset, 1) << r.name;
    EXPECT_GE(r.worst_margin, 0.0) << r.name;
  }
}

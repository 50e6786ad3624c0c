#include "elastodtn/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace elastodtn
{

const TriRule &triangle_rule_deg4()
{
  static const TriRule rule = [] {
    TriRule r;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    for (auto [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}})
    {
      const double b = 1.0 - 2.0 * a;
      r.bary.push_back({a, a, b});
      r.bary.push_back({a, b, a});
      r.bary.push_back({b, a, a});
      for (int i = 0; i < 3; ++i)
        r.weight.push_back(w);
    }
    return r;
  }();
  return rule;
}

const TetRule &tet_rule_deg2()
{
  static const TetRule rule = [] {
    TetRule r;
    const double a = 0.5854101966249685, b = 0.1381966011250105;
    r.bary = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
    r.weight = {0.25, 0.25, 0.25, 0.25};
    return r;
  }();
  return rule;
}

void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w)
{
  if (n < 1)
    throw std::invalid_argument("gauss_legendre: n >= 1");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i)
  {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it)
    {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k)
      {
        const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1)
        p0 = 1, p1 = z;
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    // recompute derivative at the converged node
    double p0 = 1, p1 = z;
    for (int k = 2; k <= n; ++k)
    {
      const double p2 = ((2.0 * k - 1) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace elastodtn

#ifndef ELASTODTN_QUADRATURE_HPP
#define ELASTODTN_QUADRATURE_HPP

#include <array>
#include <vector>

namespace elastodtn
{

// Barycentric points and weights summing to 1 (multiply by the measure).
struct TriRule
{
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weight;
};

struct TetRule
{
  std::vector<std::array<double, 4>> bary;
  std::vector<double> weight;
};

const TriRule &triangle_rule_deg4();  // 6 points
const TetRule &tet_rule_deg2();       // 4 points

// Gauss-Legendre on [-1, 1].
void gauss_legendre(int n, std::vector<double> &x, std::vector<double> &w);

}  // namespace elastodtn

#endif

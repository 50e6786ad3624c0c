#ifndef ELASTODTN_ESTIMATOR_HPP
#define ELASTODTN_ESTIMATOR_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "elastodtn/fem.hpp"
#include "elastodtn/scattering.hpp"
#include "elastodtn/solver.hpp"

namespace elastodtn
{

struct IndicatorField
{
  std::vector<double> eta;  // per tet
  double eta_l2 = 0;        // (sum eta_T^2)^{1/2}
  double data_term = 0;     // Dirichlet data surrogate
  double eps_h = 0;         // eta_l2 + data_term
  double eps_N = 0;
  double eta_max() const;
};

// Residual indicators for a P1 solution. The Gamma_R jump uses the truncated
// DtN series rebuilt from `coeffs` and the blocks of `tbc`; coeffs may be
// omitted only for meshes without OUTER faces.
IndicatorField element_indicator(const TetMesh &m, const ElasticParams &p, const CVector &u,
                                 const ModeCoeffs *coeffs, const LowRankTBC *tbc);

// Surrogate H^{1/2}(dD) norm of g - g_h: sqrt(|e|_0 (|e|_0 + |grad_T e|_0)).
double dirichlet_data_error(const TetMesh &m, const JetFunction &g, const CVector &gh);

// eta_T > theta max eta.
MarkSet mark_max_strategy(const std::vector<double> &eta, double theta);

struct IterationRecord
{
  int iter = 0;
  int dof = 0;
  int n_trunc = 0;
  double eps_h = 0;
  double eps_N = 0;
  std::optional<double> e_h;
  double eta_max = 0;
  int marked = 0;
  double wall_ms = 0;
  double data_term = 0;
};

enum class AdaptStatus
{
  Converged,
  DofCap,
  IterationCap
};
std::string status_name(AdaptStatus s);

struct AdaptOptions
{
  ElasticParams params;
  SphericalGeometry geometry;  // R' and R
  IncidentField incident;
  double epsilon = 1e-2;       // target for eps_h
  double eps_N = 1e-8;         // target for the truncation error model
  int n_trunc = -1;            // fixed N when >= 0, else selected from eps_N
  double theta = 0.5;
  int max_dof = 200000;
  int max_iterations = 25;
  SolverOptions solver;
  WoodburyOptions woodbury;
  JetFunction exact;           // optional exact scattered field
};

struct RunRecord
{
  std::vector<IterationRecord> iterations;
  AdaptStatus status = AdaptStatus::IterationCap;
  TetMesh mesh;        // last solved mesh
  CVector solution;    // on `mesh`
  IndicatorField indicators;
  double uinc_norm = 0;
};

// Called after each solve with the iteration data, before refinement.
using IterationHook = std::function<void(const IterationRecord &, const TetMesh &,
                                         const CVector &, const IndicatorField &)>;

// Solve, estimate, mark, refine until eps_h <= epsilon or a cap is hit.
RunRecord adapt_loop(const TetMesh &initial, const AdaptOptions &opt,
                     const IterationHook &hook = nullptr);

// One solve on a fixed mesh. Returns the full DoF vector.
struct SolveResult
{
  CVector u;
  ModeCoeffs coeffs;
  IndicatorField indicators;
  WoodburyStats stats;
  int n_trunc = 0;
};
SolveResult solve_scattering(const TetMesh &m, const AdaptOptions &opt, int N);

// Least squares slope of log(y) against log(x) over the last `count` points.
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y, int count);

}  // namespace elastodtn

#endif

#ifndef ELASTODTN_ANALYSIS_HPP
#define ELASTODTN_ANALYSIS_HPP

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "elastodtn/common.hpp"

namespace elastodtn
{

// Single-mode dual problem in the annulus R' < rho < R, evaluated mode by
// mode from the closed-form radial solutions. Channels are ordered U, V, X
// throughout (index 0, 1, 2).

struct RadialGrid
{
  std::vector<double> rho;

  static RadialGrid uniform(const SphericalGeometry &g, int intervals);
  double step() const { return rho[1] - rho[0]; }
  int size() const { return static_cast<int>(rho.size()); }
};

// Radial profile of one (n, m) mode of a vector field.
struct RadialSource
{
  std::function<CVec3(double)> f;

  CVec3 operator()(double rho) const { return f ? f(rho) : CVec3::Zero(); }
  bool is_zero() const { return !f; }
  double sup_norm(const SphericalGeometry &g, int samples = 401) const;

  static RadialSource zero() { return {}; }
  // Low order trigonometric profiles with random complex amplitudes.
  static RadialSource random_smooth(unsigned seed);
};

// Grid samples per (n, m).
struct AnnulusField
{
  RadialGrid grid;
  std::map<std::pair<int, int>, std::vector<CVec3>> modes;

  const std::vector<CVec3> &at(int n, int m) const;
};

AnnulusField sample_field(const RadialSource &xi, int n, int m, const RadialGrid &grid);

// zeta (scalar, X channel) and Z (U, V, X) with grad(zeta X) + curl Z = xi,
// div Z = 0 and zeta(R) = Z(R) = 0.
struct SourceCoeffs
{
  cplx zeta = 0;
  CVec3 Z = CVec3::Zero();
};

// Adaptive quadrature of the decomposition integrals for a callable profile.
SourceCoeffs annulus_source_at(const RadialSource &xi, int n, const SphericalGeometry &g,
                               double rho);

// Grid version: composite Simpson on the samples of xi, cumulative from R.
// Returns zeta in channel X of the first field and Z in the second.
std::pair<AnnulusField, AnnulusField> annulus_source_coeffs(const AnnulusField &xi,
                                                            const SphericalGeometry &g);

// Free traces at R' for the scalar and vector potentials.
struct DualTraces
{
  cplx g = 0, q2 = 0, q3 = 0;
};

struct DualValues
{
  cplx g = 0, dg = 0;    // scalar potential and its radial derivative
  cplx q2 = 0, dq2 = 0;  // V channel of the vector potential
  cplx v = 0, dv = 0;    // rho q3
  SourceCoeffs src;
};

// Closed-form endpoint quantities, independent of the grid.
struct EndpointForms
{
  cplx g_R, dg_Rp;
  cplx q2_R, dq2_Rp;
  cplx q3_R, dq3_Rp;
};

class DualModeSolution
{
public:
  DualModeSolution(const ElasticParams &p, const SphericalGeometry &g, int n, RadialSource xi,
                   DualTraces traces);

  int degree() const { return n_; }
  const ElasticParams &params() const { return p_; }
  const SphericalGeometry &geometry() const { return geo_; }
  const RadialSource &source() const { return xi_; }
  const DualTraces &traces() const { return tr_; }

  DualValues values(double rho) const;
  CVec3 p(double rho) const;  // (p1, p2, p3)
  CVec3 q(double rho) const;  // (q1, q2, q3), q1 from div q = 0
  CVec3 p(const DualValues &d, double rho) const;

  EndpointForms endpoint_forms() const;

  // Traces making p(R') = 0, as for an obstacle filling the ball of radius R'.
  static DualTraces clamped_traces(const ElasticParams &p, const SphericalGeometry &g, int n,
                                   const RadialSource &xi);

private:
  ElasticParams p_;
  SphericalGeometry geo_;
  int n_;
  RadialSource xi_;
  DualTraces tr_;
  cplx Bp_ = 0, Bs2_ = 0, Bs3_ = 0;  // integrals of t^2 S(t) times the sources
};

// The three pieces below return relative errors; tolerances live in callers.

struct EndpointReport
{
  int intervals = 0;
  // (g, q2, q3) at R; their derivatives at R'; Robin conditions at R.
  double value_R = 0, deriv_Rp = 0, robin_R = 0;
  double max() const;
};

// Grid samples, one-sided fourth order differences at the endpoints.
EndpointReport dual_endpoint_check(const DualModeSolution &s, int intervals);

struct PdeReport
{
  double navier = 0;        // mu lap p + (lambda+mu) grad div p + omega^2 p + xi
  double decomposition = 0; // grad(zeta X) + curl Z - xi
  double div_Z = 0, div_q = 0;
  double max() const;
};

// Cartesian central differences with one Richardson step at `samples`
// random interior points; single mode (n, m).
PdeReport dual_pde_check(const DualModeSolution &s, int m, int samples = 20, unsigned seed = 11);

// Traction D p at R by differences, against conj(M_n) p(R).
double dual_boundary_check(const DualModeSolution &s);

struct BoundScan
{
  std::vector<int> n;
  std::vector<double> ratio;  // |p(R)| / (n (R'/R)^n sum|p(R')| + |xi|_inf / n)
  double constant = 0;        // frozen at the reference degree
  bool holds = false;
};

// Persistence of the dual coefficient bound with a constant calibrated at
// n_lo (times `slack`) and then held fixed.
BoundScan dual_bound_check(const ElasticParams &p, const SphericalGeometry &g, int n_lo,
                           int n_hi, unsigned seed, bool zero_source, double slack = 4.0);

struct PairingScan
{
  std::vector<int> N;
  std::vector<double> value;  // |sum_{n>N} M_n xi_n(R) . conj p_n(R)| / |xi|_{H1}^2
  double slope = 0;           // log-log fit over N
};

// Tail pairing for a band-limited source with degrees 1..band and p clamped
// at R'.
PairingScan truncation_pairing_scan(const ElasticParams &p, const SphericalGeometry &g, int band,
                                    int N_lo, int N_hi, unsigned seed);

// Outgoing single mode from potential amplitudes (phi, psi_2, psi_3) at
// scale one: phi = a h_n(k_p rho), psi_2 = b h_n(k_s rho), rho psi_3 = c h_n(k_s rho).
struct RadiatingMode
{
  ElasticParams params;
  int n = 1;
  cplx a = 1, b = 0, c = 0;

  CVec3 coeffs(double rho) const;    // (u1, u2, u3)
  CVec3 traction(double rho) const;  // coefficients of mu du/drho + (lambda+mu) div u e_rho
};

struct PropagationReport
{
  double propagation = 0;  // |Q_n u(R') - u(R)| / |u(R)|
  double dtn = 0;          // |M_n u(R) - D u(R)| / |D u(R)|
};

PropagationReport propagation_check(const RadiatingMode &mode, const SphericalGeometry &g);

}  // namespace elastodtn

#endif

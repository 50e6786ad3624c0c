#ifndef ELASTODTN_COMMON_HPP
#define ELASTODTN_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace elastodtn
{

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;
using Mat3 = Eigen::Matrix3d;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;

// Error hierarchy. Every failure surfaced by the library derives from Error so
// the CLI can map it to exit status 1.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error { public: using Error::Error; };
class RangeError : public Error { public: using Error::Error; };
class CapacityError : public Error { public: using Error::Error; };
class MeshError : public Error { public: using Error::Error; };
class ImportError : public Error { public: using Error::Error; };
class AssemblyError : public Error { public: using Error::Error; };
class DataError : public Error { public: using Error::Error; };
class SolverError : public Error { public: using Error::Error; };
class ContractError : public Error { public: using Error::Error; };

// Material and frequency. Wavenumbers are derived on construction.
struct ElasticParams
{
  double lambda = 2.0;
  double mu = 1.0;
  double omega = pi;
  double kappa_p = 0.0;
  double kappa_s = 0.0;

  ElasticParams() : ElasticParams(2.0, 1.0, pi) {}
  ElasticParams(double lambda_, double mu_, double omega_);
};

// Artificial sphere R and the ball radius R' enclosing the obstacle.
struct SphericalGeometry
{
  double r_inner = 0.5;  // R'
  double r_outer = 1.0;  // R

  SphericalGeometry() = default;
  SphericalGeometry(double r_inner_, double r_outer_);
};

// Three columns per (n,m): U, V, X channel. k(n,m) = n^2 + n + m.
inline int mode_index(int n, int m) { return n * n + n + m; }
inline int num_modes(int N) { return (N + 1) * (N + 1); }

}  // namespace elastodtn

#endif

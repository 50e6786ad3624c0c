#ifndef ELASTODTN_VERIFY_HPP
#define ELASTODTN_VERIFY_HPP

#include <string>
#include <vector>

#include "elastodtn/common.hpp"

namespace elastodtn
{

// One property check: `value` is compared against `tol` unless the check is
// a boolean one, in which case value is 0 (pass) or 1 (fail).
struct Check
{
  std::string suite;
  std::string name;
  double value = 0;
  double tol = 0;
  bool pass = false;
  std::string detail;
};

struct SuiteSettings
{
  ElasticParams params{2.0, 1.0, pi};
  SphericalGeometry geometry{0.5, 1.0};
  int n_max = 200;  // upper degree for the asymptotic scans
};

std::vector<Check> verify_bessel_suite(const SuiteSettings &s = {});
std::vector<Check> verify_harmonics_suite(const SuiteSettings &s = {});
std::vector<Check> verify_dtn_suite(const SuiteSettings &s = {});
std::vector<Check> verify_dual_suite(const SuiteSettings &s = {});

// "bessel", "harmonics", "dtn", "dual" or "all"; throws ContractError otherwise.
std::vector<Check> run_suite(const std::string &name, const SuiteSettings &s = {});

bool all_pass(const std::vector<Check> &checks);
// One JSON object per line.
std::string checks_to_jsonl(const std::vector<Check> &checks);

}  // namespace elastodtn

#endif

#pragma once

#include <Eigen/Dense>

#include <functional>

namespace swabsim {

struct NelderMeadOptions {
  double initial_step = 0.005;
  double f_tol = 1e-12;
  double x_tol = 1e-9;
  int max_evals = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evals = 0;
};

/// Derivative-free simplex minimisation (Nelder-Mead with standard
/// coefficients). Constraints are handled by the caller through penalties in
/// the objective. Returns the best point ever evaluated, so the result never
/// ranks worse than the starting point.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& opts = {});

}  // namespace swabsim

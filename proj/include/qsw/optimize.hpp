#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace qsw::optimize {

// 1-D scalar maximization by coarse scan + golden-section refinement.
// Throws BracketError if the scan maximum sits on the bracket edge.
double maximize_scan_golden(const std::function<double(double)>& f,
                            double lo, double hi, int scan_points,
                            double x_tol);

// Root of f on [lo, hi]; requires a sign change. Bisection, |hi-lo| <= x_tol.
double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double x_tol);

// Nelder-Mead simplex minimization. Deterministic for fixed inputs.
struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double initial_step,
                          double x_tol, int max_iter);

// Damped least squares with forward-difference Jacobian.
// Accepted steps never increase the cost; cost_history records them.
struct LeastSquaresResult {
  Eigen::VectorXd x;
  double cost = 0.0;              // 0.5 * sum of squared residuals
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;
};
struct LeastSquaresOptions {
  int max_iter = 200;
  double step_tol = 1e-12;        // relative parameter step
  double cost_tol = 1e-14;        // relative cost decrease
  double lambda0 = 1e-3;
  Eigen::VectorXd scale;          // per-parameter finite-difference scale
};
LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& x0, const LeastSquaresOptions& opt = {});

}  // namespace qsw::optimize

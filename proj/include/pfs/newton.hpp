#pragma once

#include <Eigen/Dense>
#include <functional>

namespace pfs {

struct NewtonOptions {
  double tolerance = 1e-10;  // max-norm of the residual
  int max_iterations = 50;
  double fd_step = 1e-7;  // relative finite-difference step
};

struct NewtonResult {
  Eigen::VectorXd x;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

using NonlinearSystem = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Newton with a forward-difference Jacobian and Armijo backtracking.
NewtonResult solve_newton(const NonlinearSystem& f, Eigen::VectorXd x0,
                          const NewtonOptions& opt = {});

}  // namespace pfs

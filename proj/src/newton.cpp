#include "pfs/newton.hpp"

#include <cmath>
#include <limits>

namespace pfs {

namespace {

double merit(const Eigen::VectorXd& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return 0.5 * r.squaredNorm();
}

double max_norm(const Eigen::VectorXd& r) {
  if (!r.allFinite()) return std::numeric_limits<double>::infinity();
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

NewtonResult solve_newton(const NonlinearSystem& f, Eigen::VectorXd x0, const NewtonOptions& opt) {
  NewtonResult out;
  out.x = std::move(x0);
  Eigen::VectorXd r = f(out.x);
  out.residual = max_norm(r);
  const Eigen::Index n = out.x.size();

  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    if (out.residual <= opt.tolerance) {
      out.converged = true;
      return out;
    }
    if (!std::isfinite(out.residual)) return out;

    Eigen::MatrixXd J(r.size(), n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd xp = out.x;
      const double h = opt.fd_step * std::max(1.0, std::abs(xp(j)));
      xp(j) += h;
      J.col(j) = (f(xp) - r) / (xp(j) - out.x(j));
    }
    if (!J.allFinite()) return out;
    const Eigen::VectorXd d = J.colPivHouseholderQr().solve(-r);
    if (!d.allFinite()) return out;

    const double m0 = merit(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      Eigen::VectorXd xt = out.x + lambda * d;
      Eigen::VectorXd rt = f(xt);
      if (merit(rt) <= (1.0 - 2e-4 * lambda) * m0) {
        out.x = std::move(xt);
        r = std::move(rt);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      out.residual = max_norm(r);
      return out;
    }
    out.residual = max_norm(r);
  }
  out.converged = out.residual <= opt.tolerance;
  return out;
}

}  // namespace pfs

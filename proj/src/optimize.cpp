#include "qsw/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "qsw/errors.hpp"

namespace qsw::optimize {

double maximize_scan_golden(const std::function<double(double)>& f, double lo,
                            double hi, int scan_points, double x_tol) {
  if (!(hi > lo) || scan_points < 3) {
    throw ValidationError("maximize: bad bracket or scan count");
  }
  int best = 0;
  double best_val = -1e300;
  for (int i = 0; i < scan_points; ++i) {
    const double x = lo + (hi - lo) * i / (scan_points - 1);
    const double v = f(x);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (best == 0 || best == scan_points - 1) {
    throw BracketError("maximize: extremum not bracketed by search window");
  }
  double a = lo + (hi - lo) * (best - 1) / (scan_points - 1);
  double b = lo + (hi - lo) * (best + 1) / (scan_points - 1);
  const double gr = 0.6180339887498949;  // golden ratio - 1
  double c = b - gr * (b - a);
  double d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& f, double lo,
                   double hi, double x_tol) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw BracketError("bisect: no sign change on bracket");
  }
  while (hi - lo > x_tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                          const Eigen::VectorXd& x0, double initial_step,
                          double x_tol, int max_iter) {
  const int n = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (int i = 0; i < n; ++i) pts[i + 1](i) += initial_step;
  for (int i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  SimplexResult res;
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    // Order vertices best..worst (stable: ties keep insertion order).
    std::vector<int> idx(n + 1);
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return vals[a] < vals[b]; });
    std::vector<Eigen::VectorXd> p2(n + 1);
    std::vector<double> v2(n + 1);
    for (int i = 0; i <= n; ++i) {
      p2[i] = pts[idx[i]];
      v2[i] = vals[idx[i]];
    }
    pts.swap(p2);
    vals.swap(v2);

    double spread = 0.0;
    for (int i = 1; i <= n; ++i) {
      spread = std::max(spread, (pts[i] - pts[0]).cwiseAbs().maxCoeff());
    }
    if (spread < x_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += pts[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - pts[n]);
    const double fr = f(xr);
    if (fr < vals[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[n]);
      const double fe = f(xe);
      if (fe < fr) {
        pts[n] = xe;
        vals[n] = fe;
      } else {
        pts[n] = xr;
        vals[n] = fr;
      }
    } else if (fr < vals[n - 1]) {
      pts[n] = xr;
      vals[n] = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (pts[n] - centroid);
      const double fc = f(xc);
      if (fc < vals[n]) {
        pts[n] = xc;
        vals[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  res.x = pts[0];
  res.value = vals[0];
  return res;
}

LeastSquaresResult levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    const Eigen::VectorXd& x0, const LeastSquaresOptions& opt) {
  const int n = static_cast<int>(x0.size());
  Eigen::VectorXd x = x0;
  Eigen::VectorXd r = residuals(x);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opt.lambda0;

  LeastSquaresResult res;
  res.cost_history.push_back(cost);

  Eigen::VectorXd scale = opt.scale.size() == n
                              ? opt.scale
                              : Eigen::VectorXd::Ones(n);

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    // Forward-difference Jacobian.
    Eigen::MatrixXd jac(r.size(), n);
    for (int j = 0; j < n; ++j) {
      const double h =
          std::max(1e-7 * std::abs(x(j)), 1e-9 * std::abs(scale(j)));
      Eigen::VectorXd xp = x;
      xp(j) += h;
      jac.col(j) = (residuals(xp) - r) / h;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * r;
    if (jtr.cwiseAbs().maxCoeff() < 1e-16) {
      res.converged = true;
      break;
    }

    bool accepted = false;
    for (int tries = 0; tries < 16; ++tries) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::VectorXd step = a.ldlt().solve(-jtr);
      const Eigen::VectorXd xn = x + step;
      const Eigen::VectorXd rn = residuals(xn);
      const double cn = 0.5 * rn.squaredNorm();
      if (cn <= cost) {
        const double rel_step =
            step.cwiseAbs().maxCoeff() /
            (x.cwiseAbs().maxCoeff() + scale.cwiseAbs().maxCoeff());
        const double rel_drop = (cost - cn) / std::max(cost, 1e-300);
        x = xn;
        r = rn;
        cost = cn;
        res.cost_history.push_back(cost);
        lambda = std::max(lambda * 0.25, 1e-12);
        accepted = true;
        if (rel_step < opt.step_tol || rel_drop < opt.cost_tol) {
          res.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted || res.converged) {
      res.converged = res.converged || !accepted;
      break;
    }
  }
  res.x = x;
  res.cost = cost;
  return res;
}

}  // namespace qsw::optimize

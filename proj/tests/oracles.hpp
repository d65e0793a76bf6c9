#pragma once

// Reference computations the tests compare the library against. Nothing here
// calls into the code under test: matrices are assembled from their textbook
// definitions and evaluated with Eigen's general solvers or brute force.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

inline double spectral_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

inline Eigen::Matrix2d bias_matrix(double lr, double mu, double h) {
  Eigen::Matrix2d a;
  a << 1.0 - lr * h + mu, -mu, 1.0, 0.0;
  return a;
}

inline Eigen::Matrix3d variance_matrix(double lr, double mu, double h) {
  const double m = 1.0 - lr * h + mu;
  Eigen::Matrix3d b;
  b << m * m, mu * mu, -2.0 * mu * m,
       1.0, 0.0, 0.0,
       m, 0.0, -mu;
  return b;
}

/// Block bias operator on (x_{t+1}, x_t) for a diagonal Hessian.
inline Eigen::MatrixXd block_bias_matrix(const std::vector<double>& eig, double lr, double mu) {
  const auto n = static_cast<Eigen::Index>(eig.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 1.0 + mu - lr * eig[static_cast<std::size_t>(i)];
    a(i, n + i) = -mu;
    a(n + i, i) = 1.0;
  }
  return a;
}

/// Second-moment map Z -> A Z A^T for z = (x_{t+1}, x_t) and the block bias
/// operator A, written out as a (2n)^2 x (2n)^2 matrix acting on vec(Z).
/// Cov(x_{t+1}), Cov(x_t) and E[x_{t+1} x_t^T] are the blocks of Z.
inline Eigen::MatrixXd block_variance_matrix(const std::vector<double>& eig, double lr, double mu) {
  const Eigen::MatrixXd a = block_bias_matrix(eig, lr, mu);
  const Eigen::Index k = a.rows();
  Eigen::MatrixXd op(k * k, k * k);
  // vec(A Z A^T) = (A kron A) vec(Z).
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) op.block(i * k, j * k, k, k) = a(i, j) * a;
  return op;
}

struct ExactSplit {
  double bias = 0.0;
  double variance = 0.0;
};

/// E(x_{t+1})^2 from the closed expression with explicit matrix powers and
/// an explicit solve against (I - B).
inline ExactSplit closed_form_sq_dist(double h, double lr, double mu, double grad_variance,
                                     double x0, int t) {
  const Eigen::Matrix2d a = bias_matrix(lr, mu, h);
  const Eigen::Matrix3d b = variance_matrix(lr, mu, h);
  Eigen::Matrix2d a_pow = Eigen::Matrix2d::Identity();
  Eigen::Matrix3d b_pow = Eigen::Matrix3d::Identity();
  for (int i = 0; i < t; ++i) {
    a_pow = a_pow * a;
    b_pow = b_pow * b;
  }
  const double mean = (a_pow * Eigen::Vector2d(x0, x0))(0);
  const Eigen::Vector3d e1(1.0, 0.0, 0.0);
  const Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const Eigen::Vector3d solved = (id - b).fullPivLu().solve(e1);
  const double var = lr * lr * grad_variance * (e1.transpose() * (id - b_pow) * solved)(0);
  return {mean * mean, var};
}

/// Stationary variance lr^2 sigma^2 e1^T (I - B)^{-1} e1.
inline double stationary_variance(double h, double lr, double mu, double grad_variance) {
  const Eigen::Matrix3d b = variance_matrix(lr, mu, h);
  const Eigen::Vector3d e1(1.0, 0.0, 0.0);
  const Eigen::Vector3d solved = (Eigen::Matrix3d::Identity() - b).fullPivLu().solve(e1);
  return lr * lr * grad_variance * solved(0);
}

/// Minimum of f over an evenly spaced grid on [lo, hi].
struct GridMin {
  double x = 0.0;
  double value = 0.0;
};

inline GridMin grid_search(const std::function<double(double)>& f, double lo, double hi,
                           double step) {
  GridMin best{lo, f(lo)};
  const auto n = static_cast<long>(std::floor((hi - lo) / step));
  for (long k = 1; k <= n; ++k) {
    const double x = lo + static_cast<double>(k) * step;
    const double v = f(x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

/// Plain (raw) exponential moving average, debiased by explicit division.
struct RawEma {
  double beta;
  double raw = 0.0;
  int n = 0;
  void push(double x) {
    raw = beta * raw + (1.0 - beta) * x;
    ++n;
  }
  double debiased() const { return raw / (1.0 - std::pow(beta, n)); }
};

/// Least-squares slope of y against t.
inline double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

/// Slope of the upper envelope of log(values) over steps [first, last]
/// (1-based, values[k-1] belongs to step k). The envelope at step k is the
/// largest value at or after k, which removes oscillation troughs.
inline double envelope_log_slope(const std::vector<double>& values, std::size_t first,
                                 std::size_t last) {
  std::vector<double> env(values.size());
  double running = -INFINITY;
  for (std::size_t i = values.size(); i-- > 0;) {
    running = std::max(running, std::log(values[i]));
    env[i] = running;
  }
  std::vector<double> t, y;
  for (std::size_t k = first; k <= last; ++k) {
    t.push_back(static_cast<double>(k));
    y.push_back(env[k - 1]);
  }
  return fit_slope(t, y);
}

}  // namespace oracle

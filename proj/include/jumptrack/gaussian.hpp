#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "jumptrack/errors.hpp"

namespace jumptrack {

inline constexpr double kLog2Pi = 1.8378770664093454836;  // log(2*pi)

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

namespace detail {

inline Eigen::LLT<Eigen::MatrixXd> cholesky(const Eigen::MatrixXd& cov,
                                            const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string("covariance not positive-definite in ") + what);
  return llt;
}

inline double log_det_from_llt(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace detail

/// log N(y; mean, cov), evaluated via Cholesky.
inline double log_gaussian_density(const Eigen::VectorXd& y,
                                   const Eigen::VectorXd& mean,
                                   const Eigen::MatrixXd& cov) {
  if (y.size() != mean.size() || cov.rows() != y.size() || cov.cols() != y.size())
    throw NumericError("dimension mismatch in log_gaussian_density");
  const auto llt = detail::cholesky(cov, "log_gaussian_density");
  const Eigen::VectorXd diff = y - mean;
  const double maha = llt.matrixL().solve(diff).squaredNorm();
  const double log_det = detail::log_det_from_llt(llt);
  return -0.5 * (y.size() * kLog2Pi + log_det + maha);
}

/// log E[N(X; mean, cov)] for X ~ N(mean, cov): the closed form
/// (4*pi)^(-d/2) |cov|^(-1/2) in log space.
inline double log_expected_self_density(const Eigen::MatrixXd& cov) {
  const auto llt = detail::cholesky(cov, "log_expected_self_density");
  const double d = static_cast<double>(cov.rows());
  return -0.5 * (d * (kLog2Pi + std::log(2.0)) + detail::log_det_from_llt(llt));
}

/// Random-walk prediction: the mean is carried over, covariance grows by the
/// process noise.
inline Gaussian predict(const Gaussian& g, const Eigen::MatrixXd& q_cov) {
  if (q_cov.rows() != g.dim() || q_cov.cols() != g.dim())
    throw NumericError("dimension mismatch in predict");
  return Gaussian{g.mean, g.cov + q_cov};
}

/// Kalman measurement update with the identity observation model.
inline Gaussian update(const Gaussian& g, const Eigen::VectorXd& y,
                       const Eigen::MatrixXd& r_cov) {
  if (y.size() != g.dim() || r_cov.rows() != g.dim() || r_cov.cols() != g.dim())
    throw NumericError("dimension mismatch in update");
  const Eigen::MatrixXd innovation_cov = g.cov + r_cov;
  const auto llt = detail::cholesky(innovation_cov, "update");
  // K = cov * (cov + R)^-1, via the solve of the transposed system.
  const Eigen::MatrixXd gain = llt.solve(g.cov).transpose();
  Gaussian post;
  post.mean = g.mean + gain * (y - g.mean);
  post.cov = g.cov - gain * g.cov;
  post.cov = (0.5 * (post.cov + post.cov.transpose())).eval();
  return post;
}

/// log N(y; mean, cov + Q + R): marginal likelihood of observing y after one
/// prediction step, with the identity observation model.
inline double log_predictive_likelihood(const Gaussian& g,
                                        const Eigen::VectorXd& y,
                                        const Eigen::MatrixXd& q_cov,
                                        const Eigen::MatrixXd& r_cov) {
  return log_gaussian_density(y, g.mean, g.cov + q_cov + r_cov);
}

inline double predictive_likelihood(const Gaussian& g, const Eigen::VectorXd& y,
                                    const Eigen::MatrixXd& q_cov,
                                    const Eigen::MatrixXd& r_cov) {
  return std::exp(log_predictive_likelihood(g, y, q_cov, r_cov));
}

}  // namespace jumptrack

#pragma once

#include <Eigen/Core>

#include "bgdce/polytope.hpp"
#include "bgdce/spanner.hpp"

namespace bgdce {

// N = sum_p prob_p alpha_p alpha_p^T + (mu/s) I over the round's support.
// The basis part of the support contributes exactly the (mu/s) I term, so
// lambda_min(N) >= mu/s.
struct SecondMoment {
  Eigen::MatrixXd n_matrix;
  double mu = 0.0;
};

SecondMoment second_moment(const MixedSupport& support);

// One-sample estimate in spanner coordinates: g = loss * N^{-1} alpha_p.
// Unbiased for B^T c over the support.
Eigen::VectorXd estimate_cost(const SecondMoment& moment,
                              const Eigen::VectorXd& alpha_sampled, double loss);

// Edge-space estimate c_hat = loss * (B N B^T)^+ p, pseudo-inverse via SVD
// with singular values below 1e-10 * sigma_max zeroed. Validation path only;
// B^T c_hat equals estimate_cost up to numerics.
Eigen::VectorXd full_space_estimate(const Spanner& sp, const SecondMoment& moment,
                                    const PathVec& sampled, double loss);

}  // namespace bgdce

#include "bgdce/estimator.hpp"

#include <Eigen/Dense>
#include <string>

#include "bgdce/errors.hpp"

namespace bgdce {

SecondMoment second_moment(const MixedSupport& support) {
  if (support.atoms.empty()) throw PreconditionError("empty support");
  const int s = static_cast<int>(support.coords[0].size());
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(s, s);
  // The basis atoms sum to exactly (mu/s) sum_h e_h e_h^T; add that part in
  // closed form and the Caratheodory part atom by atom.
  for (std::size_t i = 0; i < support.caratheodory_count; ++i)
    n += support.atoms[i].weight * (support.coords[i] * support.coords[i].transpose());
  n += (support.mu / s) * Eigen::MatrixXd::Identity(s, s);
  return {std::move(n), support.mu};
}

Eigen::VectorXd estimate_cost(const SecondMoment& moment,
                              const Eigen::VectorXd& alpha_sampled, double loss) {
  Eigen::LLT<Eigen::MatrixXd> llt(moment.n_matrix);
  if (llt.info() != Eigen::Success)
    throw InvariantError("second-moment matrix is not positive definite");
  return loss * llt.solve(alpha_sampled);
}

Eigen::VectorXd full_space_estimate(const Spanner& sp, const SecondMoment& moment,
                                    const PathVec& sampled, double loss) {
  Eigen::MatrixXd m_matrix = sp.b_matrix * moment.n_matrix * sp.b_matrix.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m_matrix,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = 1e-10 * sigma(0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (int i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) inv(i) = 1.0 / sigma(i);
  Eigen::VectorXd p = sampled.as_vector();
  return loss * (svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * p);
}

}  // namespace bgdce

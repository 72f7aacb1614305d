#pragma once

#include <Eigen/Dense>
#include <vector>

namespace clonedet {

// Weighted generalized CCA: the shared embedding G holds the top-k
// eigenvectors of M = sum_i w_i X_i (X_i^T X_i + ridge_i I)^(-1) X_i^T over
// column-centered views, and U_i = (X_i^T X_i + ridge_i I)^(-1) X_i^T G maps
// each view back to the latent space. Centering means are persisted so
// unseen accounts can be projected inductively.
struct WgccaModel {
  int latent_dim = 0;
  std::vector<double> weights;
  std::vector<double> ridges;                     // per-view Gram regularization
  std::vector<Eigen::RowVectorXd> view_means;
  std::vector<Eigen::MatrixXd> view_projections;  // d_i x k
  Eigen::MatrixXd shared_embedding;               // n x k, rows in fit order
  std::vector<double> eigenvalues;                // descending, size k

  int num_views() const { return static_cast<int>(view_projections.size()); }
};

// Uniform absolute ridge on every view's Gram matrix. Eigenvector signs are
// canonicalized (first nonzero entry positive). Errors: k > n, all-zero
// weights, or a singular Gram with ridge 0.
WgccaModel wgcca_fit(const std::vector<Eigen::MatrixXd>& views, const std::vector<double>& weights,
                     int k, double ridge);

// Per-view ridge 1e-6 * trace(X_i^T X_i) / d_i, which keeps rank-deficient
// views (zero rows for accounts without posts or network presence) invertible.
WgccaModel wgcca_fit_auto(const std::vector<Eigen::MatrixXd>& views,
                          const std::vector<double>& weights, int k);

// Inductive embedding of one account: (sum_i w_i (x_i - mean_i)^T U_i) / sum_i w_i.
Eigen::VectorXd wgcca_project(const WgccaModel& model, const std::vector<Eigen::VectorXd>& x_new);

// Reconstruction objective sum_i w_i ||G - Xc_i U_i||_F^2 of a fitted model
// on its training views.
double wgcca_objective(const std::vector<Eigen::MatrixXd>& views, const WgccaModel& model);

// Same objective for an arbitrary candidate G, pairing it with its
// ridge-optimal per-view projections.
double wgcca_objective_for(const std::vector<Eigen::MatrixXd>& views,
                           const std::vector<double>& weights, const std::vector<double>& ridges,
                           const Eigen::MatrixXd& g);

}  // namespace clonedet

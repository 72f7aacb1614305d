#include "clonedet/wgcca.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace clonedet {

namespace {

// Above this row count the n x n eigenproblem is solved through the
// equivalent D x D one (D = total view width), which touches M = B B^T only
// implicitly. Small problems keep the direct solve so that algebraically
// identical M matrices produce bitwise identical embeddings.
constexpr int kDirectSolveMaxRows = 1024;

struct ViewDecomposition {
  Eigen::MatrixXd centered;      // n x d
  Eigen::RowVectorXd mean;
  Eigen::MatrixXd basis;         // eigenvectors of the regularized Gram
  Eigen::VectorXd gram_eigs;     // ascending, all > 0 after the ridge
};

void validate_inputs(const std::vector<Eigen::MatrixXd>& views, const std::vector<double>& weights,
                     int k) {
  if (views.empty()) throw std::invalid_argument("wgcca needs at least one view");
  if (weights.size() != views.size())
    throw std::invalid_argument("weight count does not match view count");
  const Eigen::Index n = views[0].rows();
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (views[i].rows() != n)
      throw std::invalid_argument("views disagree on row count");
    if (views[i].cols() < 1) throw std::invalid_argument("view has no columns");
    if (weights[i] < 0.0) throw std::invalid_argument("view weights must be >= 0");
    weight_sum += weights[i];
  }
  if (weight_sum <= 0.0) throw std::invalid_argument("view weights must not all be zero");
  if (k < 1) throw std::invalid_argument("latent dimension must be positive");
  if (static_cast<Eigen::Index>(k) > n)
    throw std::invalid_argument("latent dimension exceeds the number of rows");
}

ViewDecomposition decompose_view(const Eigen::MatrixXd& view, double ridge, std::size_t index) {
  ViewDecomposition d;
  d.mean = view.colwise().mean();
  d.centered = view.rowwise() - d.mean;
  Eigen::MatrixXd gram = d.centered.transpose() * d.centered;
  if (ridge > 0.0)
    gram += ridge * Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("Gram eigendecomposition failed for view " + std::to_string(index));
  d.gram_eigs = es.eigenvalues();
  d.basis = es.eigenvectors();
  const double max_eig = std::max(d.gram_eigs(d.gram_eigs.size() - 1), 1.0);
  if (d.gram_eigs(0) <= 1e-12 * max_eig) {
    throw std::runtime_error("singular Gram matrix in view " + std::to_string(index) +
                             "; use a positive ridge");
  }
  return d;
}

void canonicalize_sign(Eigen::MatrixXd& g) {
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      if (g(i, j) != 0.0) {
        if (g(i, j) < 0.0) g.col(j) = -g.col(j);
        break;
      }
    }
  }
}

WgccaModel fit_impl(const std::vector<Eigen::MatrixXd>& views, const std::vector<double>& weights,
                    int k, const std::vector<double>& ridges) {
  validate_inputs(views, weights, k);
  const Eigen::Index n = views[0].rows();
  const std::size_t v = views.size();

  std::vector<ViewDecomposition> decomp;
  decomp.reserve(v);
  Eigen::Index total_width = 0;
  for (std::size_t i = 0; i < v; ++i) {
    decomp.push_back(decompose_view(views[i], ridges[i], i));
    total_width += views[i].cols();
  }

  WgccaModel model;
  model.latent_dim = k;
  model.weights = weights;
  model.ridges = ridges;
  model.view_means.reserve(v);
  for (const auto& d : decomp) model.view_means.push_back(d.mean);
  model.shared_embedding.resize(n, k);
  model.eigenvalues.resize(static_cast<std::size_t>(k));

  if (n <= kDirectSolveMaxRows || n <= total_width) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < v; ++i) {
      const auto& d = decomp[i];
      const Eigen::MatrixXd gram_inv =
          d.basis * d.gram_eigs.cwiseInverse().asDiagonal() * d.basis.transpose();
      m += weights[i] * (d.centered * gram_inv * d.centered.transpose());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw std::runtime_error("shared eigendecomposition failed");
    for (int j = 0; j < k; ++j) {
      model.shared_embedding.col(j) = es.eigenvectors().col(n - 1 - j);
      model.eigenvalues[static_cast<std::size_t>(j)] = es.eigenvalues()(n - 1 - j);
    }
  } else {
    // M = B B^T with B = [sqrt(w_i) Xc_i C_i^(-1/2)]; the eigenvectors of
    // B^T B map back through u = B v / sqrt(lambda).
    Eigen::MatrixXd b(n, total_width);
    Eigen::Index offset = 0;
    for (std::size_t i = 0; i < v; ++i) {
      const auto& d = decomp[i];
      const Eigen::Index width = views[i].cols();
      const Eigen::MatrixXd gram_inv_sqrt =
          d.basis * d.gram_eigs.cwiseSqrt().cwiseInverse().asDiagonal() * d.basis.transpose();
      b.block(0, offset, n, width) = std::sqrt(weights[i]) * (d.centered * gram_inv_sqrt);
      offset += width;
    }
    const Eigen::MatrixXd small = b.transpose() * b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(small);
    if (es.info() != Eigen::Success) throw std::runtime_error("shared eigendecomposition failed");
    const Eigen::Index d_total = small.rows();
    const double max_eig = std::max(es.eigenvalues()(d_total - 1), 1.0);
    if (static_cast<Eigen::Index>(k) > d_total)
      throw std::runtime_error("latent dimension exceeds the total view width");
    for (int j = 0; j < k; ++j) {
      const double lambda = es.eigenvalues()(d_total - 1 - j);
      if (lambda <= 1e-10 * max_eig)
        throw std::runtime_error("latent dimension exceeds the effective rank of the views");
      model.shared_embedding.col(j) =
          (b * es.eigenvectors().col(d_total - 1 - j)) / std::sqrt(lambda);
      model.eigenvalues[static_cast<std::size_t>(j)] = lambda;
    }
  }

  canonicalize_sign(model.shared_embedding);
  model.view_projections.reserve(v);
  for (std::size_t i = 0; i < v; ++i) {
    const auto& d = decomp[i];
    model.view_projections.push_back(d.basis * d.gram_eigs.cwiseInverse().asDiagonal() *
                                     d.basis.transpose() *
                                     (d.centered.transpose() * model.shared_embedding));
  }
  return model;
}

}  // namespace

WgccaModel wgcca_fit(const std::vector<Eigen::MatrixXd>& views, const std::vector<double>& weights,
                     int k, double ridge) {
  if (ridge < 0.0) throw std::invalid_argument("ridge must be >= 0");
  return fit_impl(views, weights, k, std::vector<double>(views.size(), ridge));
}

WgccaModel wgcca_fit_auto(const std::vector<Eigen::MatrixXd>& views,
                          const std::vector<double>& weights, int k) {
  std::vector<double> ridges(views.size(), 0.0);
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Eigen::RowVectorXd mean = views[i].colwise().mean();
    const Eigen::MatrixXd centered = views[i].rowwise() - mean;
    const double trace = centered.squaredNorm();
    ridges[i] = 1e-6 * std::max(trace / static_cast<double>(views[i].cols()), 1.0);
  }
  return fit_impl(views, weights, k, ridges);
}

Eigen::VectorXd wgcca_project(const WgccaModel& model, const std::vector<Eigen::VectorXd>& x_new) {
  if (static_cast<int>(x_new.size()) != model.num_views())
    throw std::invalid_argument("wrong number of view vectors");
  Eigen::VectorXd result = Eigen::VectorXd::Zero(model.latent_dim);
  double weight_sum = 0.0;
  for (int i = 0; i < model.num_views(); ++i) {
    if (x_new[static_cast<std::size_t>(i)].size() != model.view_means[static_cast<std::size_t>(i)].size())
      throw std::invalid_argument("view vector dimension mismatch in view " + std::to_string(i));
    const double w = model.weights[static_cast<std::size_t>(i)];
    weight_sum += w;
    const Eigen::RowVectorXd centered = x_new[static_cast<std::size_t>(i)].transpose() -
                                        model.view_means[static_cast<std::size_t>(i)];
    result += w * (centered * model.view_projections[static_cast<std::size_t>(i)]).transpose();
  }
  return result / weight_sum;
}

double wgcca_objective(const std::vector<Eigen::MatrixXd>& views, const WgccaModel& model) {
  if (static_cast<int>(views.size()) != model.num_views())
    throw std::invalid_argument("wrong number of views");
  double total = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Eigen::MatrixXd centered = views[i].rowwise() - model.view_means[i];
    total += model.weights[i] *
             (model.shared_embedding - centered * model.view_projections[i]).squaredNorm();
  }
  return total;
}

double wgcca_objective_for(const std::vector<Eigen::MatrixXd>& views,
                           const std::vector<double>& weights, const std::vector<double>& ridges,
                           const Eigen::MatrixXd& g) {
  if (weights.size() != views.size() || ridges.size() != views.size())
    throw std::invalid_argument("weight/ridge count does not match view count");
  double total = 0.0;
  for (std::size_t i = 0; i < views.size(); ++i) {
    const Eigen::RowVectorXd mean = views[i].colwise().mean();
    const Eigen::MatrixXd centered = views[i].rowwise() - mean;
    Eigen::MatrixXd gram = centered.transpose() * centered;
    if (ridges[i] > 0.0)
      gram += ridges[i] * Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    const Eigen::MatrixXd u = gram.ldlt().solve(centered.transpose() * g);
    total += weights[i] * (g - centered * u).squaredNorm();
  }
  return total;
}

}  // namespace clonedet

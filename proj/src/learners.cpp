#include "simenc/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Cholesky>

namespace simenc {

std::vector<int> cv_folds(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cv_folds: folds must be >= 2");
  if (n < static_cast<std::size_t>(folds))
    throw std::invalid_argument("cv_folds: need n >= folds");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold_of(n);
  for (std::size_t j = 0; j < n; ++j)
    fold_of[perm[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
  return fold_of;
}

double r2_score(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size() || y_true.size() == 0)
    throw std::invalid_argument("r2_score: length mismatch or empty input");
  const double mean = y_true.mean();
  const double ss_tot = (y_true.array() - mean).square().sum();
  const double ss_res = (y_true - y_pred).squaredNorm();
  if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
  return 1.0 - ss_res / ss_tot;
}

namespace {

struct CenteredRidge {
  Vector weights;
  double intercept = 0.0;
};

// Normal equations on centered data; the intercept stays unpenalized.
CenteredRidge solve_ridge(const Matrix& X, const Vector& y, double lambda) {
  const Eigen::Index p = X.cols();
  const Eigen::RowVectorXd x_mean = X.colwise().mean();
  const double y_mean = y.mean();
  const Matrix Xc = X.rowwise() - x_mean;
  const Vector yc = y.array() - y_mean;
  Matrix gram = Matrix::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
  gram.diagonal().array() += lambda;
  CenteredRidge out;
  out.weights = gram.selfadjointView<Eigen::Lower>().ldlt().solve(
      Xc.transpose() * yc);
  out.intercept = y_mean - x_mean.dot(out.weights);
  return out;
}

Matrix gather_rows(const Matrix& X, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Vector gather(const Vector& v, const std::vector<Eigen::Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

}  // namespace

RidgeModel ridge_fit(const Matrix& X, const Vector& y,
                     const std::vector<double>& lambda_grid, int folds,
                     std::uint64_t seed) {
  const Eigen::Index n = X.rows();
  if (n == 0 || X.cols() == 0)
    throw std::invalid_argument("ridge_fit: degenerate X");
  if (y.size() != n) throw std::invalid_argument("ridge_fit: length mismatch");
  if (folds < 2 || n < folds)
    throw std::invalid_argument("ridge_fit: need rows >= folds >= 2");
  if (lambda_grid.empty())
    throw std::invalid_argument("ridge_fit: empty lambda grid");

  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());

  const std::vector<int> fold_of = cv_folds(static_cast<std::size_t>(n), folds, seed);
  std::vector<double> mean_r2(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train_rows, val_rows;
    for (Eigen::Index i = 0; i < n; ++i)
      (fold_of[static_cast<std::size_t>(i)] == f ? val_rows : train_rows)
          .push_back(i);
    const Matrix Xtr = gather_rows(X, train_rows);
    const Vector ytr = gather(y, train_rows);
    const Matrix Xval = gather_rows(X, val_rows);
    const Vector yval = gather(y, val_rows);

    // One Gram factorization pass per fold, reused across the grid.
    const Eigen::Index p = X.cols();
    const Eigen::RowVectorXd x_mean = Xtr.colwise().mean();
    const double y_mean = ytr.mean();
    const Matrix Xc = Xtr.rowwise() - x_mean;
    const Vector yc = ytr.array() - y_mean;
    Matrix gram = Matrix::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(Xc.transpose());
    const Vector xty = Xc.transpose() * yc;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Matrix reg = gram;
      reg.diagonal().array() += grid[g];
      const Vector w =
          reg.selfadjointView<Eigen::Lower>().ldlt().solve(xty);
      const double b = y_mean - x_mean.dot(w);
      const Vector pred = (Xval * w).array() + b;
      mean_r2[g] += r2_score(yval, pred) / folds;
    }
  }

  // Ascending grid plus >= keeps ties on the larger lambda.
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (mean_r2[g] >= mean_r2[best]) best = g;

  const CenteredRidge final = solve_ridge(X, y, grid[best]);
  RidgeModel model;
  model.weights = final.weights;
  model.intercept = final.intercept;
  model.chosen_lambda = grid[best];
  model.lambda_grid = grid;
  model.cv_folds = folds;
  return model;
}

Vector ridge_predict(const RidgeModel& model, const Matrix& X) {
  if (X.cols() != model.weights.size())
    throw std::invalid_argument("ridge_predict: dimension mismatch");
  return (X * model.weights).array() + model.intercept;
}

double logistic_loss_grad(const Matrix& X, const std::vector<int>& y_idx,
                          const Vector& sample_weights, int n_classes,
                          const Matrix& W, const Vector& b, double reg,
                          Matrix* grad_W, Vector* grad_b) {
  const Eigen::Index n = X.rows();
  Matrix scores = X * W;
  scores.rowwise() += b.transpose();
  const Vector row_max = scores.rowwise().maxCoeff();
  scores.colwise() -= row_max;
  Matrix probs = scores.array().exp();
  const Vector norms = probs.rowwise().sum();
  probs.array().colwise() /= norms.array();

  const double total_weight = sample_weights.sum();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double log_p = scores(i, y_idx[static_cast<std::size_t>(i)]) -
                         std::log(norms[i]);
    loss -= sample_weights[i] * log_p;
  }
  loss /= total_weight;
  loss += 0.5 * reg * W.squaredNorm();

  if (grad_W != nullptr || grad_b != nullptr) {
    Matrix delta = probs;  // p_ic - [c == y_i], weighted
    for (Eigen::Index i = 0; i < n; ++i)
      delta(i, y_idx[static_cast<std::size_t>(i)]) -= 1.0;
    delta.array().colwise() *= sample_weights.array();
    delta /= total_weight;
    if (grad_W != nullptr) *grad_W = X.transpose() * delta + reg * W;
    if (grad_b != nullptr) *grad_b = delta.colwise().sum().transpose();
  }
  return loss;
}

namespace {

struct LogisticFitResult {
  Matrix W;
  Vector b;
};

LogisticFitResult logistic_gd(const Matrix& X, const std::vector<int>& y_idx,
                              const Vector& sample_weights, int n_classes,
                              double reg, const LogisticOptions& opts) {
  Matrix W = Matrix::Zero(X.cols(), n_classes);
  Vector b = Vector::Zero(n_classes);
  Matrix gW;
  Vector gb;
  double step = opts.step;
  double loss = logistic_loss_grad(X, y_idx, sample_weights, n_classes, W, b,
                                   reg, &gW, &gb);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Matrix W_next = W - step * gW;
    const Vector b_next = b - step * gb;
    Matrix gW_next;
    Vector gb_next;
    const double loss_next =
        logistic_loss_grad(X, y_idx, sample_weights, n_classes, W_next, b_next,
                           reg, &gW_next, &gb_next);
    if (loss_next > loss) {
      step *= 0.5;
      continue;
    }
    const double delta = loss - loss_next;
    W = W_next;
    b = b_next;
    gW = std::move(gW_next);
    gb = std::move(gb_next);
    loss = loss_next;
    if (delta < opts.tol) break;
  }
  return {std::move(W), std::move(b)};
}

Vector make_sample_weights(const std::vector<int>& y_idx, int n_classes,
                           ClassWeighting weighting) {
  const std::size_t n = y_idx.size();
  Vector w = Vector::Ones(static_cast<Eigen::Index>(n));
  if (weighting == ClassWeighting::InverseFrequency) {
    std::vector<double> counts(static_cast<std::size_t>(n_classes), 0.0);
    for (int c : y_idx) counts[static_cast<std::size_t>(c)] += 1.0;
    for (std::size_t i = 0; i < n; ++i)
      w[static_cast<Eigen::Index>(i)] =
          static_cast<double>(n) /
          (n_classes * counts[static_cast<std::size_t>(y_idx[i])]);
  }
  return w;
}

}  // namespace

LogisticModel logistic_fit(const Matrix& X, const std::vector<std::string>& y,
                           const std::vector<double>& reg_grid,
                           std::uint64_t seed, const LogisticOptions& opts) {
  const Eigen::Index n = X.rows();
  if (n == 0 || X.cols() == 0)
    throw std::invalid_argument("logistic_fit: degenerate X");
  if (y.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("logistic_fit: length mismatch");
  if (reg_grid.empty())
    throw std::invalid_argument("logistic_fit: empty regularization grid");

  const std::set<std::string> uniq(y.begin(), y.end());
  if (uniq.size() < 2)
    throw std::invalid_argument("logistic_fit: need at least 2 classes");
  std::vector<std::string> classes(uniq.begin(), uniq.end());
  std::unordered_map<std::string, int> class_index;
  for (std::size_t c = 0; c < classes.size(); ++c)
    class_index[classes[c]] = static_cast<int>(c);
  const int n_classes = static_cast<int>(classes.size());
  std::vector<int> y_idx(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) y_idx[i] = class_index.at(y[i]);

  std::vector<double> grid = reg_grid;
  std::sort(grid.begin(), grid.end());

  double chosen_reg = grid.back();
  if (grid.size() > 1 && n >= opts.folds) {
    const std::vector<int> fold_of =
        cv_folds(static_cast<std::size_t>(n), opts.folds, seed);
    std::vector<double> mean_acc(grid.size(), 0.0);
    for (int f = 0; f < opts.folds; ++f) {
      std::vector<Eigen::Index> train_rows, val_rows;
      for (Eigen::Index i = 0; i < n; ++i)
        (fold_of[static_cast<std::size_t>(i)] == f ? val_rows : train_rows)
            .push_back(i);
      std::vector<int> ytr;
      ytr.reserve(train_rows.size());
      bool all_classes = true;
      {
        std::set<int> present;
        for (Eigen::Index i : train_rows) {
          ytr.push_back(y_idx[static_cast<std::size_t>(i)]);
          present.insert(ytr.back());
        }
        all_classes = static_cast<int>(present.size()) == n_classes;
      }
      if (!all_classes) continue;  // fold too small to vote
      const Matrix Xtr = gather_rows(X, train_rows);
      const Matrix Xval = gather_rows(X, val_rows);
      const Vector wts = make_sample_weights(ytr, n_classes, opts.weighting);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const LogisticFitResult fitres =
            logistic_gd(Xtr, ytr, wts, n_classes, grid[g], opts);
        Matrix scores = Xval * fitres.W;
        scores.rowwise() += fitres.b.transpose();
        Eigen::Index correct = 0;
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
          Eigen::Index arg = 0;
          scores.row(static_cast<Eigen::Index>(i)).maxCoeff(&arg);
          if (static_cast<int>(arg) ==
              y_idx[static_cast<std::size_t>(val_rows[i])])
            ++correct;
        }
        mean_acc[g] += static_cast<double>(correct) /
                       static_cast<double>(val_rows.size()) / opts.folds;
      }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
      if (mean_acc[g] >= mean_acc[best]) best = g;
    chosen_reg = grid[best];
  } else if (grid.size() == 1) {
    chosen_reg = grid[0];
  }

  const Vector wts = make_sample_weights(y_idx, n_classes, opts.weighting);
  const LogisticFitResult fitres =
      logistic_gd(X, y_idx, wts, n_classes, chosen_reg, opts);

  LogisticModel model;
  model.weights = fitres.W;
  model.intercepts = fitres.b;
  model.chosen_reg = chosen_reg;
  model.classes = std::move(classes);
  model.weighting = opts.weighting;
  return model;
}

Matrix logistic_predict_proba(const LogisticModel& model, const Matrix& X) {
  if (X.cols() != model.weights.rows())
    throw std::invalid_argument("logistic_predict_proba: dimension mismatch");
  Matrix scores = X * model.weights;
  scores.rowwise() += model.intercepts.transpose();
  scores.colwise() -= scores.rowwise().maxCoeff();
  Matrix probs = scores.array().exp();
  probs.array().colwise() /= probs.rowwise().sum().array();
  return probs;
}

std::vector<std::string> logistic_predict(const LogisticModel& model,
                                          const Matrix& X) {
  const Matrix probs = logistic_predict_proba(model, X);
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index arg = 0;
    probs.row(i).maxCoeff(&arg);
    out.push_back(model.classes[static_cast<std::size_t>(arg)]);
  }
  return out;
}

}  // namespace simenc

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simenc/feature_matrix.hpp"

namespace simenc {

/// Deterministic fold assignment: indices shuffled by seed, then dealt
/// round-robin. fold_of[i] in [0, folds).
std::vector<int> cv_folds(std::size_t n, int folds, std::uint64_t seed);

/// Coefficient of determination, 1 - SS_res / SS_tot. A constant target
/// scores 1 when predicted exactly and 0 otherwise.
double r2_score(const Vector& y_true, const Vector& y_pred);

struct RidgeModel {
  Vector weights;
  double intercept = 0.0;
  double chosen_lambda = 0.0;
  std::vector<double> lambda_grid;
  int cv_folds = 3;
};

inline std::vector<double> default_lambda_grid() { return {0.1, 1.0, 10.0}; }

/// Closed-form ridge with an unpenalized intercept; the regularization is
/// picked by seeded internal cross-validation on mean validation R^2
/// (ties go to the larger lambda).
RidgeModel ridge_fit(const Matrix& X, const Vector& y,
                     const std::vector<double>& lambda_grid = default_lambda_grid(),
                     int folds = 3, std::uint64_t seed = 0);

Vector ridge_predict(const RidgeModel& model, const Matrix& X);

enum class ClassWeighting { None, InverseFrequency };

struct LogisticModel {
  Matrix weights;      // p x n_classes
  Vector intercepts;   // n_classes
  double chosen_reg = 0.0;
  std::vector<std::string> classes;  // sorted
  ClassWeighting weighting = ClassWeighting::None;
};

struct LogisticOptions {
  int max_iter = 500;
  double step = 0.1;      // halved whenever the loss increases
  double tol = 1e-6;      // on the loss delta
  int folds = 3;
  ClassWeighting weighting = ClassWeighting::None;
};

/// L2-regularized multinomial logistic regression by deterministic full-batch
/// gradient descent; the regularization strength is picked by seeded internal
/// cross-validation on accuracy.
LogisticModel logistic_fit(const Matrix& X, const std::vector<std::string>& y,
                           const std::vector<double>& reg_grid = default_lambda_grid(),
                           std::uint64_t seed = 0,
                           const LogisticOptions& opts = {});

/// Softmax of affine scores; rows sum to 1.
Matrix logistic_predict_proba(const LogisticModel& model, const Matrix& X);

std::vector<std::string> logistic_predict(const LogisticModel& model,
                                          const Matrix& X);

/// Loss and gradient of the regularized multinomial objective at (W, b);
/// exposed so the gradient can be checked against finite differences.
double logistic_loss_grad(const Matrix& X, const std::vector<int>& y_idx,
                          const Vector& sample_weights, int n_classes,
                          const Matrix& W, const Vector& b, double reg,
                          Matrix* grad_W, Vector* grad_b);

}  // namespace simenc

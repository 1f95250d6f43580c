#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace simenc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense row-major view of encoded samples with per-column provenance labels.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> columns;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

}  // namespace simenc

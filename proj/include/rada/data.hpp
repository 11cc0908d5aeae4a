#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rada/manifold.hpp"

namespace rada {

/// d-by-N matrix of i.i.d. standard Gaussian entries (one point per column),
/// filled column by column so the stream of draws is reproducible.
inline Matrix gen_gaussian_points(int d, int N, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix A(d, N);
  for (Eigen::Index j = 0; j < A.cols(); ++j)
    for (Eigen::Index i = 0; i < A.rows(); ++i) A(i, j) = nd(gen);
  return A;
}

/// A labeled point set: one feature column per point, integer class labels.
struct Dataset {
  Matrix X;                 ///< d-by-N feature columns
  std::vector<int> labels;  ///< size N
};

/// Reads a CSV of numeric feature columns with the label in the last column.
/// A single non-numeric header line is skipped if present.  Labels (numeric
/// or string) are mapped to 0..c-1 in order of first appearance.  With
/// drop_duplicates, rows whose features and label exactly repeat an earlier
/// row are removed (first occurrence kept).
inline Dataset load_dataset_csv(const std::string& path,
                                bool drop_duplicates = true) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_dataset_csv: cannot open " + path);
  std::vector<std::vector<double>> feats;
  std::vector<int> labels;
  std::map<std::string, int> label_ids;
  std::string line;
  bool first = true;
  size_t width = 0;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
      line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2)
      throw std::runtime_error("load_dataset_csv: need >= 2 columns");
    if (first) {
      first = false;
      width = cells.size();
      try {
        std::stod(cells[0]);
      } catch (const std::exception&) {
        continue;  // header line
      }
    }
    if (cells.size() != width)
      throw std::runtime_error("load_dataset_csv: ragged row in " + path);
    std::vector<double> row;
    for (size_t j = 0; j + 1 < cells.size(); ++j) {
      try {
        row.push_back(std::stod(cells[j]));
      } catch (const std::exception&) {
        throw std::runtime_error("load_dataset_csv: non-numeric feature '" +
                                 cells[j] + "'");
      }
    }
    auto it = label_ids.find(cells.back());
    if (it == label_ids.end())
      it = label_ids.emplace(cells.back(), int(label_ids.size())).first;
    feats.push_back(std::move(row));
    labels.push_back(it->second);
  }
  if (feats.empty()) throw std::runtime_error("load_dataset_csv: no rows");
  if (drop_duplicates) {
    std::vector<std::vector<double>> fu;
    std::vector<int> lu;
    for (size_t i = 0; i < feats.size(); ++i) {
      bool dup = false;
      for (size_t j = 0; j < fu.size() && !dup; ++j)
        dup = (lu[j] == labels[i] && fu[j] == feats[i]);
      if (!dup) {
        fu.push_back(feats[i]);
        lu.push_back(labels[i]);
      }
    }
    feats.swap(fu);
    labels.swap(lu);
  }
  Dataset ds;
  ds.X.resize(Eigen::Index(feats[0].size()), Eigen::Index(feats.size()));
  for (size_t i = 0; i < feats.size(); ++i)
    for (size_t j = 0; j < feats[i].size(); ++j)
      ds.X(Eigen::Index(j), Eigen::Index(i)) = feats[i][j];
  ds.labels = std::move(labels);
  return ds;
}

/// Min-max scales each feature column to [0, 1]; constant columns map to 0.
inline Matrix minmax_scale(const Matrix& X) {
  Matrix out = X;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double mn = X.col(j).minCoeff(), mx = X.col(j).maxCoeff();
    const double span = (mx > mn) ? (mx - mn) : 1.0;
    out.col(j) = (X.col(j).array() - mn) / span;
  }
  return out;
}

/// Gaussian affinity W_ij = exp(-||x_i - x_j||^2 / kappa) between feature
/// rows; the unit diagonal is kept.
inline Matrix affinity_gaussian(const Matrix& Xrows, double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("affinity_gaussian: need kappa > 0");
  const Eigen::Index N = Xrows.rows();
  Matrix W(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    W(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < N; ++j) {
      const double d2 = (Xrows.row(i) - Xrows.row(j)).squaredNorm();
      W(i, j) = W(j, i) = std::exp(-d2 / kappa);
    }
  }
  return W;
}

/// Symmetric normalized Laplacian L = I - D^{-1/2} W D^{-1/2} of a
/// nonnegative affinity matrix with positive degrees, re-symmetrized to
/// guard against round-off.
inline Matrix normalized_laplacian(const Matrix& W) {
  if (W.rows() != W.cols())
    throw std::invalid_argument("normalized_laplacian: W must be square");
  Vector deg = W.rowwise().sum();
  if (!(deg.minCoeff() > 0.0))
    throw std::runtime_error("normalized_laplacian: nonpositive degree");
  Vector dri = deg.array().rsqrt();
  Matrix L = Matrix::Identity(W.rows(), W.cols()) -
             dri.asDiagonal() * W * dri.asDiagonal();
  return (L + L.transpose()) * 0.5;
}

/// Basis of the m smallest-eigenvalue eigenvectors of a symmetric matrix,
/// in ascending eigenvalue order.  Each column is sign-fixed so that its
/// largest-magnitude entry (first such index on ties) is positive.
inline Matrix spectral_init(const Matrix& L, int m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es((L + L.transpose()) * 0.5);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral_init: eigendecomposition failed");
  Matrix X = es.eigenvectors().leftCols(m);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    Eigen::Index imax = 0;
    X.col(j).cwiseAbs().maxCoeff(&imax);
    if (X(imax, j) < 0.0) X.col(j) = -X.col(j);
  }
  return X;
}

/// Synthetic clustering affinity: N Gaussian points in feat_dim dimensions,
/// W = |P' P| (absolute correlation), returned as its normalized Laplacian.
/// Absolute inner-product affinity W_ij = |<a_i, a_j>| between the columns
/// of a d-by-N point matrix; the diagonal carries the squared norms.
inline Matrix affinity_inner_abs(const Matrix& points) {
  return (points.transpose() * points).cwiseAbs();
}

inline Matrix synthetic_ssc_laplacian(int N, int feat_dim, std::uint64_t seed) {
  Matrix P = gen_gaussian_points(feat_dim, N, seed);
  return normalized_laplacian(affinity_inner_abs(P));
}

}  // namespace rada

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "rada/manifold.hpp"

namespace rada {

/// Fraction of data variance captured by the subspace spanned by Xhat,
/// relative to the best rank-r subspace:
///   ||A' Xhat||_F^2 / (sum of the r largest eigenvalues of A A').
inline double normalized_variance(const Matrix& A_data, const Matrix& Xhat,
                                  int r) {
  if (r <= 0 || r > std::min(A_data.rows(), A_data.cols()))
    throw std::invalid_argument("normalized_variance: bad rank");
  const double num = (A_data.transpose() * Xhat).squaredNorm();
  Eigen::SelfAdjointEigenSolver<Matrix> es(A_data.transpose() * A_data);
  const Vector& w = es.eigenvalues();  // ascending; shares nonzero spectrum
  double den = 0.0;                    // of A A'
  for (int i = 0; i < r; ++i) den += w(w.size() - 1 - i);
  return num / den;
}

/// Percentage of entries with magnitude below the threshold.
inline double sparsity_percent(const Matrix& X, double threshold = 1e-5) {
  const double cnt = double((X.cwiseAbs().array() < threshold).count());
  return 100.0 * cnt / double(X.size());
}

/// Lloyd k-means with k-means++ seeding and a fixed number of restarts,
/// keeping the labeling with the smallest within-cluster sum of squares.
/// Rows are scaled to unit norm before clustering (zero rows left as-is).
inline std::vector<int> kmeans(const Matrix& points, int k, int restarts,
                               std::uint64_t seed) {
  const Eigen::Index N = points.rows();
  if (k <= 0 || Eigen::Index(k) > N)
    throw std::invalid_argument("kmeans: bad cluster count");
  Matrix X = points;
  for (Eigen::Index i = 0; i < N; ++i) {
    const double nrm = X.row(i).norm();
    if (nrm > 0.0) X.row(i) /= nrm;
  }
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> best_labels(size_t(N), 0);
  double best_sse = std::numeric_limits<double>::infinity();
  for (int rep = 0; rep < restarts; ++rep) {
    // k-means++ seeding by cumulative-sum sampling of squared distances.
    Matrix C(k, X.cols());
    std::vector<double> d2(size_t(N),
                           std::numeric_limits<double>::infinity());
    {
      const Eigen::Index first = Eigen::Index(unif(gen) * double(N)) % N;
      C.row(0) = X.row(first);
    }
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < N; ++i) {
        const double d = (X.row(i) - C.row(c - 1)).squaredNorm();
        d2[size_t(i)] = std::min(d2[size_t(i)], d);
        total += d2[size_t(i)];
      }
      Eigen::Index chosen = N - 1;
      if (total > 0.0) {
        const double target = unif(gen) * total;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < N; ++i) {
          acc += d2[size_t(i)];
          if (acc >= target) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = Eigen::Index(unif(gen) * double(N)) % N;
      }
      C.row(c) = X.row(chosen);
    }
    std::vector<int> labels(size_t(N), 0);
    for (int it = 0; it < 100; ++it) {
      bool changed = false;
      for (Eigen::Index i = 0; i < N; ++i) {
        int arg = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          const double d = (X.row(i) - C.row(c)).squaredNorm();
          if (d < bd) {
            bd = d;
            arg = c;
          }
        }
        if (labels[size_t(i)] != arg) {
          labels[size_t(i)] = arg;
          changed = true;
        }
      }
      Matrix Cn = Matrix::Zero(k, X.cols());
      std::vector<long> cnt(size_t(k), 0);
      for (Eigen::Index i = 0; i < N; ++i) {
        Cn.row(labels[size_t(i)]) += X.row(i);
        ++cnt[size_t(labels[size_t(i)])];
      }
      for (int c = 0; c < k; ++c) {
        if (cnt[size_t(c)] > 0) {
          C.row(c) = Cn.row(c) / double(cnt[size_t(c)]);
        } else {
          // Re-seed an empty cluster at the point farthest from its center.
          Eigen::Index far = 0;
          double fd = -1.0;
          for (Eigen::Index i = 0; i < N; ++i) {
            const double d =
                (X.row(i) - C.row(labels[size_t(i)])).squaredNorm();
            if (d > fd) {
              fd = d;
              far = i;
            }
          }
          C.row(c) = X.row(far);
          changed = true;
        }
      }
      if (!changed) break;
    }
    double sse = 0.0;
    for (Eigen::Index i = 0; i < N; ++i)
      sse += (X.row(i) - C.row(labels[size_t(i)])).squaredNorm();
    if (sse < best_sse) {
      best_sse = sse;
      best_labels = labels;
    }
  }
  return best_labels;
}

/// Normalized mutual information between two labelings with the geometric
/// normalization I(a,b) / sqrt(H(a) H(b)), natural logarithms.  Identical
/// labelings (up to renaming) score 1; if exactly one side is constant the
/// score is 0; two constant labelings are identical partitions and score 1.
inline double nmi(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("nmi: labelings must be non-empty, same size");
  const double n = double(a.size());
  std::map<int, double> ca, cb;
  std::map<std::pair<int, int>, double> cab;
  for (size_t i = 0; i < a.size(); ++i) {
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
    cab[{a[i], b[i]}] += 1.0;
  }
  auto entropy = [&](const std::map<int, double>& c) {
    double hsum = 0.0;
    for (const auto& kv : c) {
      const double p = kv.second / n;
      hsum -= p * std::log(p);
    }
    return hsum;
  };
  const double ha = entropy(ca), hb = entropy(cb);
  if (ha == 0.0 && hb == 0.0) return 1.0;
  if (ha == 0.0 || hb == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& kv : cab) {
    const double pab = kv.second / n;
    const double pa = ca[kv.first.first] / n;
    const double pb = cb[kv.first.second] / n;
    mi += pab * std::log(pab / (pa * pb));
  }
  mi = std::max(mi, 0.0);  // guard the fp round-off of a zero MI
  return mi / std::sqrt(ha * hb);
}

/// Cluster labels from a subspace solution: k-means on the rows of Xhat
/// (row-normalized inside kmeans), best of `restarts` seedings.
inline std::vector<int> cluster_from_solution(const Matrix& Xhat, int k,
                                              int restarts = 10,
                                              std::uint64_t seed = 0) {
  return kmeans(Xhat, k, restarts, seed);
}

}  // namespace rada

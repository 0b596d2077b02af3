#include "hadamux/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hadamux {
namespace {

// Passive-set least-squares subproblem over the Gram matrix.
class DenseFactor {
 public:
  explicit DenseFactor(const Matrix& gram) : gram_(gram), l_(gram.rows(), gram.rows()) {}

  // Appends index t; returns false if its column is numerically dependent on
  // the current passive set.
  bool append(const std::vector<int>& passive, int t) {
    const int p = static_cast<int>(passive.size());
    Vector r(p);
    for (int i = 0; i < p; ++i) r(i) = gram_(passive[i], t);
    if (p > 0) l_.topLeftCorner(p, p).triangularView<Eigen::Lower>().solveInPlace(r);
    const double d2 = gram_(t, t) - r.squaredNorm();
    if (!(d2 > 1e-12 * gram_(t, t))) return false;
    if (p > 0) l_.row(p).head(p) = r.transpose();
    l_(p, p) = std::sqrt(d2);
    return true;
  }

  void rebuild(const std::vector<int>& passive) {
    const int p = static_cast<int>(passive.size());
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = gram_(passive[i], passive[j]);
        for (int q = 0; q < j; ++q) s -= l_(i, q) * l_(j, q);
        if (i == j) {
          l_(i, i) = std::sqrt(std::max(s, std::numeric_limits<double>::min()));
        } else {
          l_(i, j) = s / l_(j, j);
        }
      }
    }
  }

  Vector solve(const std::vector<int>& passive, const Vector& atb) const {
    const int p = static_cast<int>(passive.size());
    Vector z(p);
    for (int i = 0; i < p; ++i) z(i) = atb(passive[i]);
    const auto l = l_.topLeftCorner(p, p);
    l.triangularView<Eigen::Lower>().solveInPlace(z);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(z);
    return z;
  }

 private:
  const Matrix& gram_;
  Matrix l_;
};

}  // namespace

NnlsSolver::NnlsSolver(Matrix a, NnlsOptions options) : a_(std::move(a)), options_(options) {
  if (a_.rows() == 0 || a_.cols() == 0) throw InvalidArgument("nnls: empty system matrix");
  if (!(options_.tolerance >= 0.0)) throw InvalidArgument("nnls: tolerance must be >= 0");
  if (options_.max_iterations < 0) throw InvalidArgument("nnls: max_iterations must be >= 0");
  if (options_.max_iterations == 0) options_.max_iterations = 3 * static_cast<int>(a_.cols());
  gram_ = a_.transpose() * a_;
  max_column_norm_ = std::sqrt(gram_.diagonal().maxCoeff());

  if (options_.exploit_structure) {
    const Eigen::Index n = gram_.rows();
    const double d = gram_(0, 0);
    const double o = n > 1 ? gram_(0, 1) : 0.0;
    const double eps = 1e-13 * std::abs(d);
    bool ok = true;
    for (Eigen::Index i = 0; i < n && ok; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(gram_(i, j) - (i == j ? d : o)) > eps) {
          ok = false;
          break;
        }
      }
    }
    // a I + b J with a > 0, b >= 0 is positive definite for every passive set.
    if (ok && d - o > 0.0 && o >= 0.0) structured_ = DiagPlusConstant{d - o, o};
  }
}

NnlsResult NnlsSolver::solve(const Vector& b) const {
  if (b.size() != a_.rows()) throw InvalidArgument("nnls: right-hand side length mismatch");
  return solve_normal(a_.transpose() * b, b.norm(), b);
}

std::vector<NnlsResult> NnlsSolver::solve_columns(const Matrix& b) const {
  if (b.rows() != a_.rows()) throw InvalidArgument("nnls: right-hand side row count mismatch");
  const Matrix atb = a_.transpose() * b;
  std::vector<NnlsResult> out;
  out.reserve(static_cast<std::size_t>(b.cols()));
  for (Eigen::Index c = 0; c < b.cols(); ++c) {
    out.push_back(solve_normal(atb.col(c), b.col(c).norm(), b.col(c)));
  }
  return out;
}

NnlsResult NnlsSolver::solve_normal(const Vector& atb, double b_norm, const Vector& b) const {
  const int n = static_cast<int>(gram_.rows());
  NnlsResult result;
  result.x = Vector::Zero(n);
  result.dual_tolerance = options_.tolerance * max_column_norm_ * b_norm;
  const double tol = result.dual_tolerance;

  Vector& x = result.x;
  Vector w = atb;  // negative gradient of 0.5 ||Ax - b||^2
  std::vector<char> in_passive(n, 0);
  std::vector<char> blocked(n, 0);
  std::vector<int> passive;
  passive.reserve(n);
  std::optional<DenseFactor> factor;
  if (!structured_) factor.emplace(gram_);

  Vector z(n);
  // Fills z.head(p) with the passive-set least-squares solution.
  auto solve_passive = [&]() {
    const auto p = static_cast<Eigen::Index>(passive.size());
    if (structured_) {
      double sum = 0.0;
      for (int i : passive) sum += atb(i);
      const double shift = structured_->fill * sum / (structured_->diag + structured_->fill * static_cast<double>(p));
      for (Eigen::Index i = 0; i < p; ++i) z(i) = (atb(passive[static_cast<std::size_t>(i)]) - shift) / structured_->diag;
      return;
    }
    z.head(p) = factor->solve(passive, atb);
  };

  auto update_gradient = [&]() {
    if (structured_) {
      double sum = 0.0;
      for (int i : passive) sum += x(i);
      w = atb - structured_->diag * x;
      w.array() -= structured_->fill * sum;
      return;
    }
    w = atb;
    for (int i : passive) w.noalias() -= x(i) * gram_.col(i);
  };

  while (true) {
    int t = -1;
    double best = tol;
    for (int j = 0; j < n; ++j) {
      if (!in_passive[j] && !blocked[j] && w(j) > best) {
        best = w(j);
        t = j;
      }
    }
    if (t < 0) break;
    if (result.iterations >= options_.max_iterations) {
      result.converged = false;
      break;
    }
    ++result.iterations;

    if (factor && !factor->append(passive, t)) {
      blocked[t] = 1;
      continue;
    }
    passive.push_back(t);
    in_passive[t] = 1;

    bool first = true;
    while (true) {
      solve_passive();
      const auto p = static_cast<Eigen::Index>(passive.size());
      bool feasible = true;
      for (Eigen::Index i = 0; i < p; ++i) {
        if (!(z(i) > 0.0)) {
          feasible = false;
          break;
        }
      }
      if (feasible) {
        for (std::size_t i = 0; i < passive.size(); ++i) x(passive[i]) = z(static_cast<Eigen::Index>(i));
        break;
      }
      if (first && !(z(p - 1) > 0.0)) {
        // The entering coordinate cannot move off its bound; this only
        // happens through rounding. Undo the step and exclude t for now.
        passive.pop_back();
        in_passive[t] = 0;
        blocked[t] = 1;
        if (factor) factor->rebuild(passive);
        break;
      }
      first = false;

      // Step from x toward z until the first passive coordinate hits zero.
      double step = 1.0;
      int hit = -1;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const double zi = z(static_cast<Eigen::Index>(i));
        if (zi <= 0.0) {
          const double xi = x(passive[i]);
          const double s = xi / (xi - zi);
          if (s < step) {
            step = s;
            hit = static_cast<int>(i);
          }
        }
      }
      for (std::size_t i = 0; i < passive.size(); ++i) {
        x(passive[i]) += step * (z(static_cast<Eigen::Index>(i)) - x(passive[i]));
      }
      if (hit >= 0) x(passive[static_cast<std::size_t>(hit)]) = 0.0;

      std::erase_if(passive, [&](int i) {
        if (x(i) > 0.0) return false;
        x(i) = 0.0;
        in_passive[i] = 0;
        return true;
      });
      if (factor) factor->rebuild(passive);
      if (passive.empty()) break;
    }

    if (!blocked[t]) std::fill(blocked.begin(), blocked.end(), 0);
    update_gradient();
  }

  result.residual_norm = (a_ * x - b).norm();
  return result;
}

NnlsResult nnls(const Matrix& a, const Vector& b, const NnlsOptions& options) {
  return NnlsSolver(a, options).solve(b);
}

}  // namespace hadamux

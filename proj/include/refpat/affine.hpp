#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace refpat {

/// Affine map x -> A x + B between parametric spaces of dimension 0..3.
///
/// Dimension-0 spaces are legal: a transform with cols()==0 is a constant
/// map and one with rows()==0 maps everything to the empty vector. Storage
/// is a fixed 3x3 block, so transforms are cheap values.
class AffineTransform {
public:
  AffineTransform() = default;

  AffineTransform(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 0 || rows > 3 || cols < 0 || cols > 3)
      throw std::invalid_argument("AffineTransform: dimensions must be in 0..3");
  }

  static AffineTransform identity(int dim) {
    AffineTransform t(dim, dim);
    for (int i = 0; i < dim; ++i) t.coef(i, i) = 1.0;
    return t;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& coef(int r, int c) { return a_[static_cast<std::size_t>(3 * r + c)]; }
  double coef(int r, int c) const { return a_[static_cast<std::size_t>(3 * r + c)]; }
  double& shift(int r) { return b_[static_cast<std::size_t>(r)]; }
  double shift(int r) const { return b_[static_cast<std::size_t>(r)]; }

  std::vector<double> apply(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != cols_)
      throw std::invalid_argument("AffineTransform::apply: vector length != cols");
    std::vector<double> y(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) {
      double v = shift(r);
      for (int c = 0; c < cols_; ++c) v += coef(r, c) * x[static_cast<std::size_t>(c)];
      y[static_cast<std::size_t>(r)] = v;
    }
    return y;
  }

  bool almost_equal(const AffineTransform& o, double tol = 1e-10) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (int r = 0; r < rows_; ++r) {
      if (std::abs(shift(r) - o.shift(r)) > tol) return false;
      for (int c = 0; c < cols_; ++c)
        if (std::abs(coef(r, c) - o.coef(r, c)) > tol) return false;
    }
    return true;
  }

private:
  int rows_ = 0;
  int cols_ = 0;
  std::array<double, 9> a_{};
  std::array<double, 3> b_{};
};

/// compose(f, g): the map applying g first, then f.
inline AffineTransform compose(const AffineTransform& outer, const AffineTransform& inner) {
  if (outer.cols() != inner.rows())
    throw std::invalid_argument("compose: outer.cols != inner.rows");
  AffineTransform t(outer.rows(), inner.cols());
  for (int r = 0; r < outer.rows(); ++r) {
    double s = outer.shift(r);
    for (int k = 0; k < outer.cols(); ++k) {
      s += outer.coef(r, k) * inner.shift(k);
      for (int c = 0; c < inner.cols(); ++c)
        t.coef(r, c) += outer.coef(r, k) * inner.coef(k, c);
    }
    t.shift(r) = s;
  }
  return t;
}

namespace detail {

/// Cyclic Jacobi eigendecomposition of a symmetric n x n matrix, n <= 4.
/// m is row-major and gets destroyed; columns of v are the eigenvectors.
inline void jacobi_eigen(int n, std::array<double, 16>& m, std::array<double, 16>& v,
                         std::array<double, 4>& eig) {
  for (int i = 0; i < 16; ++i) v[static_cast<std::size_t>(i)] = 0.0;
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i * 4 + i)] = 1.0;
  auto A = [&](int r, int c) -> double& { return m[static_cast<std::size_t>(r * 4 + c)]; };
  auto V = [&](int r, int c) -> double& { return v[static_cast<std::size_t>(r * 4 + c)]; };
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-300) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * A(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  for (int i = 0; i < n; ++i) eig[static_cast<std::size_t>(i)] = A(i, i);
}

/// Minimum-norm solution of the symmetric system G x = rhs via eigen
/// pseudoinverse. G is n x n row-major in a 4x4 block, n <= 4.
inline std::array<double, 4> pinv_solve(int n, std::array<double, 16> g,
                                        const std::array<double, 4>& rhs) {
  std::array<double, 16> v{};
  std::array<double, 4> eig{};
  jacobi_eigen(n, g, v, eig);
  double emax = 0.0;
  for (int i = 0; i < n; ++i) emax = std::max(emax, std::abs(eig[static_cast<std::size_t>(i)]));
  const double cutoff = emax * 1e-12;
  std::array<double, 4> x{};
  for (int i = 0; i < n; ++i) {
    if (std::abs(eig[static_cast<std::size_t>(i)]) <= cutoff) continue;
    double proj = 0.0;
    for (int k = 0; k < n; ++k)
      proj += v[static_cast<std::size_t>(k * 4 + i)] * rhs[static_cast<std::size_t>(k)];
    proj /= eig[static_cast<std::size_t>(i)];
    for (int k = 0; k < n; ++k)
      x[static_cast<std::size_t>(k)] += proj * v[static_cast<std::size_t>(k * 4 + i)];
  }
  return x;
}

}  // namespace detail

/// One least-squares observation: source point and its image.
using AffineSample = std::pair<std::vector<double>, std::vector<double>>;

/// Fits x -> A x + B minimizing sum_i |y_i - (A x_i + B)|^2.
///
/// Rank-deficient sample sets (points that do not affinely span the source
/// space) yield the minimum-norm solution. With samples generated by an
/// affine map and a spanning source set the map is recovered to round-off.
inline AffineTransform fit_l2(const std::vector<AffineSample>& samples) {
  if (samples.empty())
    throw std::invalid_argument("fit_l2: at least one sample required");
  const int n = static_cast<int>(samples.front().first.size());
  const int m = static_cast<int>(samples.front().second.size());
  if (n > 3 || m > 3) throw std::invalid_argument("fit_l2: dimensions must be in 0..3");
  for (const auto& s : samples)
    if (static_cast<int>(s.first.size()) != n || static_cast<int>(s.second.size()) != m)
      throw std::invalid_argument("fit_l2: inconsistent sample dimensions");

  // Normal equations over the homogeneous unknowns (row of A, entry of B).
  const int u = n + 1;
  std::array<double, 16> g{};
  for (const auto& s : samples) {
    std::array<double, 4> z{};
    for (int c = 0; c < n; ++c) z[static_cast<std::size_t>(c)] = s.first[static_cast<std::size_t>(c)];
    z[static_cast<std::size_t>(n)] = 1.0;
    for (int r = 0; r < u; ++r)
      for (int c = 0; c < u; ++c)
        g[static_cast<std::size_t>(r * 4 + c)] += z[static_cast<std::size_t>(r)] * z[static_cast<std::size_t>(c)];
  }

  AffineTransform t(m, n);
  for (int r = 0; r < m; ++r) {
    std::array<double, 4> rhs{};
    for (const auto& s : samples) {
      const double y = s.second[static_cast<std::size_t>(r)];
      for (int c = 0; c < n; ++c)
        rhs[static_cast<std::size_t>(c)] += s.first[static_cast<std::size_t>(c)] * y;
      rhs[static_cast<std::size_t>(n)] += y;
    }
    const auto sol = detail::pinv_solve(u, g, rhs);
    for (int c = 0; c < n; ++c) t.coef(r, c) = sol[static_cast<std::size_t>(c)];
    t.shift(r) = sol[static_cast<std::size_t>(n)];
  }
  return t;
}

/// Orthogonal left inverse of an injective affine map t: y -> A+ (y - B),
/// where A+ is the Moore-Penrose pseudoinverse of A. Composing the result
/// with t gives the identity on t's source space; composing the other way
/// gives the orthogonal projection onto t's image.
inline AffineTransform least_squares_inverse(const AffineTransform& t) {
  const int m = t.rows(), n = t.cols();
  // G = A^T A, solved column-by-column for A+ = G+ A^T.
  std::array<double, 16> g{};
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += t.coef(k, r) * t.coef(k, c);
      g[static_cast<std::size_t>(r * 4 + c)] = s;
    }
  AffineTransform inv(n, m);
  for (int col = 0; col < m; ++col) {
    std::array<double, 4> rhs{};
    for (int r = 0; r < n; ++r) rhs[static_cast<std::size_t>(r)] = t.coef(col, r);
    const auto sol = detail::pinv_solve(n, g, rhs);
    for (int r = 0; r < n; ++r) inv.coef(r, col) = sol[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int c = 0; c < m; ++c) s += inv.coef(r, c) * t.shift(c);
    inv.shift(r) = -s;
  }
  return inv;
}

}  // namespace refpat

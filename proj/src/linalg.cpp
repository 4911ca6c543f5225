#include "germlab/linalg.hpp"

#include <stdexcept>

namespace germlab {

namespace {

void require_square(const RationalMatrix& m) {
  for (const auto& row : m)
    if (row.size() != m.size()) throw std::invalid_argument("matrix is not square");
}

struct Echelon {
  RationalMatrix rows;
  std::vector<std::size_t> pivots;
  int swaps = 0;
};

// Gauss-Jordan on a copy; columns beyond `columns` (augmented part) never pivot.
Echelon reduce(RationalMatrix m, std::size_t columns) {
  Echelon e;
  std::size_t r = 0;
  for (std::size_t c = 0; c < columns && r < m.size(); ++c) {
    std::size_t pivot = r;
    while (pivot < m.size() && m[pivot][c] == 0) ++pivot;
    if (pivot == m.size()) continue;
    if (pivot != r) {
      std::swap(m[pivot], m[r]);
      ++e.swaps;
    }
    Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = 0; j < m[i].size(); ++j) m[i][j] -= f * m[r][j];
    }
    e.pivots.push_back(c);
    ++r;
  }
  e.rows = std::move(m);
  return e;
}

}  // namespace

RationalMatrix identity_matrix(std::size_t n) {
  RationalMatrix m(n, RationalVector(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

RationalMatrix multiply(const RationalMatrix& a, const RationalMatrix& b) {
  std::size_t inner = b.size();
  std::size_t cols = inner ? b[0].size() : 0;
  RationalMatrix out(a.size(), RationalVector(cols, 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner) throw std::invalid_argument("matrix dimension mismatch");
    for (std::size_t k = 0; k < inner; ++k)
      if (a[i][k] != 0)
        for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
  }
  return out;
}

RationalVector multiply(const RationalMatrix& a, const RationalVector& x) {
  RationalVector out(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw std::invalid_argument("matrix dimension mismatch");
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
  }
  return out;
}

Rational determinant(const RationalMatrix& m) {
  require_square(m);
  RationalMatrix a = m;
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && a[pivot][c] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != c) {
      std::swap(a[pivot], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rational f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return det;
}

RationalMatrix adjugate(const RationalMatrix& m) {
  require_square(m);
  const std::size_t n = m.size();
  if (n == 0) return {};
  if (n == 1) return {{1}};
  RationalMatrix adj(n, RationalVector(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      RationalMatrix minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == i) continue;
        RationalVector row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != j) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Rational cof = determinant(minor);
      adj[j][i] = (i + j) % 2 ? Rational(-cof) : cof;
    }
  return adj;
}

std::size_t rank(const RationalMatrix& m) {
  if (m.empty()) return 0;
  return reduce(m, m[0].size()).pivots.size();
}

std::vector<RationalVector> kernel(const RationalMatrix& m, std::size_t columns) {
  for (const auto& row : m)
    if (row.size() != columns) throw std::invalid_argument("matrix dimension mismatch");
  Echelon e = reduce(m, columns);
  std::vector<bool> is_pivot(columns, false);
  for (std::size_t c : e.pivots) is_pivot[c] = true;
  std::vector<RationalVector> basis;
  for (std::size_t free = 0; free < columns; ++free) {
    if (is_pivot[free]) continue;
    RationalVector v(columns, 0);
    v[free] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<RationalVector> solve(const RationalMatrix& m, const RationalVector& rhs) {
  if (m.size() != rhs.size()) throw std::invalid_argument("right-hand side dimension mismatch");
  if (m.empty()) return RationalVector{};
  const std::size_t columns = m[0].size();
  RationalMatrix aug = m;
  for (std::size_t i = 0; i < aug.size(); ++i) {
    if (aug[i].size() != columns) throw std::invalid_argument("matrix dimension mismatch");
    aug[i].push_back(rhs[i]);
  }
  Echelon e = reduce(std::move(aug), columns);
  for (std::size_t r = e.pivots.size(); r < e.rows.size(); ++r)
    if (e.rows[r][columns] != 0) return std::nullopt;
  RationalVector x(columns, 0);
  for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.rows[r][columns];
  return x;
}

bool is_upper_triangular(const RationalMatrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < i && j < m[i].size(); ++j)
      if (m[i][j] != 0) return false;
  return true;
}

std::string to_csv(const RationalMatrix& m) {
  std::string out;
  for (const auto& row : m) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ",";
      out += to_string(row[j]);
    }
    out += "\n";
  }
  return out;
}

}  // namespace germlab

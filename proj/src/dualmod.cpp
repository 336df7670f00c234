#include "canlift/dualmod.hpp"

namespace canlift {

std::vector<std::size_t> k_rref(KMat& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  std::size_t nrows = m.size(), ncols = m[0].size();
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < nrows; ++col) {
    std::size_t sel = nrows;
    for (std::size_t r = row; r < nrows; ++r) {
      if (!m[r][col].is_zero()) {
        sel = r;
        break;
      }
    }
    if (sel == nrows) continue;
    std::swap(m[row], m[sel]);
    FieldElement inv = m[row][col].inv();
    for (std::size_t c = col; c < ncols; ++c) m[row][c] = m[row][c] * inv;
    for (std::size_t r = 0; r < nrows; ++r) {
      if (r == row || m[r][col].is_zero()) continue;
      FieldElement factor = m[r][col];
      for (std::size_t c = col; c < ncols; ++c) m[r][c] = m[r][c] - factor * m[row][c];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

KMat k_kernel(const FieldSpec* s, KMat m, std::size_t ncols) {
  for (const auto& r : m)
    if (r.size() != ncols) throw precondition_error("ragged matrix");
  std::vector<std::size_t> pivots = k_rref(m);
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : pivots) is_pivot[c] = true;
  KMat basis;
  for (std::size_t j = 0; j < ncols; ++j) {
    if (is_pivot[j]) continue;
    KVec v(ncols, FieldElement::zero(s));
    v[j] = FieldElement::one(s);
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m[i][j];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<KVec> k_solve(const FieldSpec* s, KMat m, KVec rhs) {
  if (m.size() != rhs.size()) throw precondition_error("rhs size != row count");
  std::size_t ncols = m.empty() ? 0 : m[0].size();
  for (std::size_t r = 0; r < m.size(); ++r) {
    if (m[r].size() != ncols) throw precondition_error("ragged matrix");
    m[r].push_back(rhs[r]);
  }
  std::vector<std::size_t> pivots = k_rref(m);
  if (!pivots.empty() && pivots.back() == ncols) return std::nullopt;
  KVec x(ncols, FieldElement::zero(s));
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = m[i][ncols];
  return x;
}

W2Vec w2_matvec(const W2Mat& m, const W2Vec& x) {
  if (x.empty()) throw precondition_error("empty vector in matvec");
  W2Vec y;
  y.reserve(m.size());
  for (const auto& row : m) {
    if (row.size() != x.size()) throw precondition_error("matrix and vector sizes differ");
    Witt2 acc = Witt2::zero(x[0].spec());
    for (std::size_t j = 0; j < x.size(); ++j) acc = acc + row[j] * x[j];
    y.push_back(acc);
  }
  return y;
}

namespace {

KMat w2_reduce(const W2Mat& m) {
  KMat r;
  r.reserve(m.size());
  for (const auto& row : m) {
    KVec kr;
    kr.reserve(row.size());
    for (const auto& v : row) kr.push_back(v.reduce());
    r.push_back(std::move(kr));
  }
  return r;
}

W2Vec teich_lift(const KVec& v) {
  W2Vec w;
  w.reserve(v.size());
  for (const auto& e : v) w.push_back(Witt2::teichmuller(e));
  return w;
}

/* Columns of the correction matrix: M * lift(b_j) lands in p*W2^rows; divide
   out p. Also reused by solve_w2 for its augmented consistency system. */
KMat correction_columns(const W2Mat& m, const KMat& kernel_rows) {
  KMat cols;
  for (const auto& b : kernel_rows) {
    W2Vec y = w2_matvec(m, teich_lift(b));
    KVec c;
    c.reserve(y.size());
    for (const auto& v : y) {
      if (!v.a0().is_zero()) throw crosscheck_error("kernel lift image not divisible by p");
      c.push_back(witt_div_p(v));
    }
    cols.push_back(std::move(c));
  }
  return cols;
}

KMat augment_columns(const KMat& mbar, const KMat& cols, std::size_t nrows) {
  KMat aug = mbar;
  aug.resize(nrows);
  for (std::size_t r = 0; r < nrows; ++r)
    for (const auto& c : cols) aug[r].push_back(c[r]);
  return aug;
}

}  // namespace

std::vector<W2Vec> howell_kernel(const FieldSpec* s, const W2Mat& m, std::size_t ncols) {
  for (const auto& r : m)
    if (r.size() != ncols) throw precondition_error("ragged matrix");
  KMat mbar = w2_reduce(m);
  KMat kernel_rows = k_kernel(s, mbar, ncols);
  std::size_t r = kernel_rows.size();
  if (r == 0) return {};
  KMat cols = correction_columns(m, kernel_rows);
  KMat aug = augment_columns(mbar, cols, m.size());
  KMat aug_kernel = k_kernel(s, aug, ncols + r);

  // Row-reduce the [s | w] pairs so independent s-parts come out first.
  KMat sw;
  for (const auto& v : aug_kernel) {
    KVec row(v.begin() + static_cast<std::ptrdiff_t>(ncols), v.end());
    row.insert(row.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(ncols));
    sw.push_back(std::move(row));
  }
  std::vector<std::size_t> pivots = k_rref(sw);
  std::size_t rank_s = 0;
  for (auto c : pivots) rank_s += c < r ? 1 : 0;

  std::vector<W2Vec> gens;
  for (std::size_t i = 0; i < rank_s; ++i) {
    W2Vec g(ncols, Witt2::zero(s));
    for (std::size_t j = 0; j < r; ++j) {
      if (sw[i][j].is_zero()) continue;
      for (std::size_t c = 0; c < ncols; ++c)
        g[c] = g[c] + Witt2::teichmuller(sw[i][j]) * Witt2::teichmuller(kernel_rows[j][c]);
    }
    for (std::size_t c = 0; c < ncols; ++c)
      g[c] = g[c] + Witt2::times_p(sw[i][r + c]);
    gens.push_back(std::move(g));
  }
  if (rank_s < r) {
    for (const auto& b : kernel_rows) {
      W2Vec g;
      g.reserve(ncols);
      for (const auto& e : b) g.push_back(Witt2::times_p(e));
      gens.push_back(std::move(g));
    }
  }
  return gens;
}

std::optional<W2Vec> solve_w2(const FieldSpec* s, const W2Mat& m, const W2Vec& rhs) {
  if (m.size() != rhs.size()) throw precondition_error("rhs size != row count");
  std::size_t ncols = m.empty() ? 0 : m[0].size();
  for (const auto& r : m)
    if (r.size() != ncols) throw precondition_error("ragged matrix");
  KMat mbar = w2_reduce(m);
  KVec rbar;
  rbar.reserve(rhs.size());
  for (const auto& v : rhs) rbar.push_back(v.reduce());
  auto x0 = k_solve(s, mbar, rbar);
  if (!x0) return std::nullopt;

  W2Vec lifted = teich_lift(*x0);
  KVec resid;
  resid.reserve(rhs.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    Witt2 d = rhs[i] - w2_matvec(W2Mat{m[i]}, lifted)[0];
    if (!d.a0().is_zero()) throw crosscheck_error("residual not divisible by p");
    resid.push_back(witt_div_p(d));
  }

  KMat kernel_rows = k_kernel(s, mbar, ncols);
  KMat cols = correction_columns(m, kernel_rows);
  KMat aug = augment_columns(mbar, cols, m.size());
  auto fix = k_solve(s, aug, resid);
  if (!fix) return std::nullopt;

  W2Vec x = lifted;
  for (std::size_t j = 0; j < kernel_rows.size(); ++j) {
    const FieldElement& sj = (*fix)[ncols + j];
    if (sj.is_zero()) continue;
    for (std::size_t c = 0; c < ncols; ++c)
      x[c] = x[c] + Witt2::teichmuller(sj) * Witt2::teichmuller(kernel_rows[j][c]);
  }
  for (std::size_t c = 0; c < ncols; ++c) x[c] = x[c] + Witt2::times_p((*fix)[c]);
  return x;
}

}  // namespace canlift

/*
 * Exact sparse rational elimination, solve, verification, and the
 * system/solution text formats.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/linalg.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gfc {

/* ------------------------------------------------------------------ */
/* SparseRationalMatrix                                                */
/* ------------------------------------------------------------------ */

void SparseRationalMatrix::ensure() {
  if (static_cast<int>(data_.size()) != rows_) data_.resize(rows_);
}

std::int64_t SparseRationalMatrix::nnz() const {
  std::int64_t n = 0;
  for (const auto &row : data_) n += static_cast<std::int64_t>(row.size());
  return n;
}

void SparseRationalMatrix::add(int r, int c, const Rat &v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::out_of_range("matrix entry out of range");
  if (v == 0) return;
  ensure();
  auto &row = data_[r];
  auto it = row.find(c);
  if (it == row.end()) {
    Rat cv = v;
    cv.canonicalize(); // two-argument mpq construction may be non-canonical
    row.emplace(c, std::move(cv));
  } else {
    it->second += v;
    if (it->second == 0) row.erase(it);
  }
}

void SparseRationalMatrix::set(int r, int c, const Rat &v) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
    throw std::out_of_range("matrix entry out of range");
  ensure();
  auto &row = data_[r];
  if (v == 0) {
    row.erase(c);
  } else {
    Rat cv = v;
    cv.canonicalize();
    row[c] = std::move(cv);
  }
}

Rat SparseRationalMatrix::get(int r, int c) const {
  if (r < 0 || r >= static_cast<int>(data_.size())) return Rat(0);
  const auto &row = data_[r];
  auto it = row.find(c);
  return it == row.end() ? Rat(0) : it->second;
}

std::vector<Triplet> SparseRationalMatrix::triplets() const {
  std::vector<Triplet> out;
  for (int r = 0; r < static_cast<int>(data_.size()); ++r)
    for (const auto &[c, v] : data_[r]) out.push_back({r, c, v});
  std::sort(out.begin(), out.end(), [](const Triplet &a, const Triplet &b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  return out;
}

bool SparseRationalMatrix::operator==(const SparseRationalMatrix &o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  auto a = triplets(), b = o.triplets();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].row != b[i].row || a[i].col != b[i].col || a[i].value != b[i].value)
      return false;
  return true;
}

/* ------------------------------------------------------------------ */
/* Elimination                                                         */
/* ------------------------------------------------------------------ */

namespace {

// Working state: row maps plus a column -> row-set index kept in sync.
struct Workspace {
  std::vector<std::map<int, Rat>> rows;
  std::vector<std::set<int>> colRows;
  std::int64_t nnz = 0;

  explicit Workspace(const SparseRationalMatrix &A, int extraCols)
      : rows(A.rows()), colRows(A.cols() + extraCols) {
    for (const auto &t : A.triplets()) {
      rows[t.row].emplace(t.col, t.value);
      colRows[t.col].insert(t.row);
      ++nnz;
    }
  }

  void setEntry(int r, int c, const Rat &v) {
    auto &row = rows[r];
    auto it = row.find(c);
    if (v == 0) {
      if (it != row.end()) {
        row.erase(it);
        colRows[c].erase(r);
        --nnz;
      }
      return;
    }
    if (it == row.end()) {
      row.emplace(c, v);
      colRows[c].insert(r);
      ++nnz;
    } else {
      it->second = v;
    }
  }

  // row[target] -= factor * row[src]
  void axpyRow(int target, const Rat &factor, int src) {
    for (const auto &[c, v] : rows[src]) {
      Rat nv = rows[target].count(c) ? rows[target][c] - factor * v
                                     : Rat(-factor * v);
      nv.canonicalize();
      setEntry(target, c, nv);
    }
  }
};

// |a| < |b| for rationals.
bool absLess(const Rat &a, const Rat &b) {
  Rat aa = abs(a), bb = abs(b);
  return aa < bb;
}

} // namespace

static EchelonResult eliminateImpl(const SparseRationalMatrix &A,
                                   PivotStrategy strategy, std::int64_t fillCap,
                                   const SparseVector *rhs,
                                   SparseVector *rhsOut) {
  const int R = A.rows();
  const int C = A.cols();
  // The rhs, if provided, rides along as virtual column C (never a pivot).
  Workspace w(A, rhs ? 1 : 0);
  if (rhs)
    for (const auto &[r, v] : *rhs) w.setEntry(r, C, v);

  std::vector<bool> rowDone(R, false);
  std::vector<bool> colDone(C, false);
  EchelonResult res;
  res.maxFill = w.nnz;

  while (true) {
    int pr = -1, pc = -1;
    if (strategy == PivotStrategy::FirstNonzero) {
      for (int c = 0; c < C && pr < 0; ++c) {
        if (colDone[c]) continue;
        for (int r : w.colRows[c]) {
          if (!rowDone[r]) {
            pr = r;
            pc = c;
            break;
          }
        }
      }
    } else if (strategy == PivotStrategy::MinFill) {
      // Markowitz-style: pick the active column with the fewest active rows,
      // then within it the active row with the fewest entries, then the
      // entry of minimal |value|. Keeps fill-in (and fraction growth) low.
      std::size_t bestColDeg = 0;
      for (int c = 0; c < C; ++c) {
        if (colDone[c]) continue;
        std::size_t deg = 0;
        for (int r : w.colRows[c])
          if (!rowDone[r]) ++deg;
        if (deg == 0) continue;
        if (pc >= 0 && deg >= bestColDeg) continue;
        pc = c;
        bestColDeg = deg;
        if (deg == 1) break;
      }
      if (pc >= 0) {
        std::size_t bestRowLen = 0;
        for (int r : w.colRows[pc]) {
          if (rowDone[r]) continue;
          std::size_t len = w.rows[r].size();
          if (pr < 0 || len < bestRowLen ||
              (len == bestRowLen &&
               absLess(w.rows[r].at(pc), w.rows[pr].at(pc)))) {
            pr = r;
            bestRowLen = len;
          }
        }
      }
    } else {
      // SmallestPivot: scan the whole active submatrix for the entry of
      // minimal absolute value (keeps intermediate fractions small).
      for (int r = 0; r < R; ++r) {
        if (rowDone[r]) continue;
        for (const auto &[c, v] : w.rows[r]) {
          if (c >= C || colDone[c]) continue;
          if (pr < 0 || absLess(v, w.rows[pr].at(pc)) ||
              (!absLess(w.rows[pr].at(pc), v) &&
               (c < pc || (c == pc && r < pr)))) {
            pr = r;
            pc = c;
          }
        }
      }
    }
    if (pr < 0) break;

    const Rat pivot = w.rows[pr].at(pc);
    // Eliminate pc from every other active row.
    std::vector<int> targets(w.colRows[pc].begin(), w.colRows[pc].end());
    for (int r : targets) {
      if (r == pr || rowDone[r]) continue;
      Rat factor = w.rows[r].at(pc) / pivot;
      factor.canonicalize();
      w.axpyRow(r, factor, pr);
    }
    rowDone[pr] = true;
    colDone[pc] = true;
    res.pivotCols.push_back(pc);
    res.rowPermutation.push_back(pr);
    ++res.rank;
    res.maxFill = std::max(res.maxFill, w.nnz);
    if (w.nnz > fillCap) {
      res.fillCapExceeded = true;
      break;
    }
  }

  res.echelon = SparseRationalMatrix(R, C);
  for (int r = 0; r < R; ++r)
    for (const auto &[c, v] : w.rows[r])
      if (c < C) res.echelon.set(r, c, v);
  if (rhsOut) {
    rhsOut->clear();
    for (int r = 0; r < R; ++r) {
      auto it = w.rows[r].find(C);
      if (it != w.rows[r].end()) (*rhsOut)[r] = it->second;
    }
  }
  return res;
}

EchelonResult eliminate(const SparseRationalMatrix &A, PivotStrategy strategy,
                        std::int64_t fillCap) {
  return eliminateImpl(A, strategy, fillCap, nullptr, nullptr);
}

SolveReport solve(const SparseRationalMatrix &A, const SparseVector &b,
                  PivotStrategy strategy, std::int64_t fillCap) {
  for (const auto &[r, v] : b) {
    (void)v;
    if (r < 0 || r >= A.rows()) throw std::invalid_argument("rhs row out of range");
  }
  SolveReport rep;
  SparseVector bred;
  EchelonResult ech = eliminateImpl(A, strategy, fillCap, &b, &bred);
  rep.rank = ech.rank;
  rep.pivotLog = std::string("strategy=") +
                 (strategy == PivotStrategy::FirstNonzero  ? "first"
                  : strategy == PivotStrategy::MinFill     ? "minfill"
                                                           : "smallest") +
                 " pivots=" + std::to_string(ech.rank) +
                 " maxFill=" + std::to_string(ech.maxFill) +
                 (ech.fillCapExceeded ? " FILL_CAP_EXCEEDED" : "");
  if (ech.fillCapExceeded) {
    rep.feasible = false;
    rep.augmentedRank = rep.rank;
    return rep;
  }

  // Infeasibility: a row with zero matrix part but nonzero reduced rhs.
  std::vector<bool> isPivotRow(A.rows(), false);
  for (int r : ech.rowPermutation) isPivotRow[r] = true;
  bool infeasible = false;
  for (const auto &[r, v] : bred) {
    if (!isPivotRow[r] && v != 0) {
      infeasible = true;
      rep.infeasibleRows.push_back(r);
    }
  }
  if (infeasible) {
    rep.feasible = false;
    rep.augmentedRank = rep.rank + 1;
    return rep;
  }
  rep.augmentedRank = rep.rank;
  rep.feasible = true;

  // Back-substitution in reverse pivot-selection order; free variables zero.
  SparseVector x;
  for (int k = ech.rank - 1; k >= 0; --k) {
    int r = ech.rowPermutation[k];
    int c = ech.pivotCols[k];
    Rat acc = bred.count(r) ? bred.at(r) : Rat(0);
    for (const auto &[cc, v] : ech.echelon.rowEntries(r)) {
      if (cc == c) continue;
      auto it = x.find(cc);
      if (it != x.end()) acc -= v * it->second;
    }
    acc /= ech.echelon.get(r, c);
    acc.canonicalize();
    if (acc != 0) x[c] = acc;
  }
  rep.solution = x;
  rep.nonzeros = static_cast<std::int64_t>(x.size());
  rep.integersOnly = true;
  for (const auto &[c, v] : x) {
    (void)c;
    if (v.get_den() != 1) rep.integersOnly = false;
  }
  rep.residualExactZero = verify(A, x, b);
  return rep;
}

bool verify(const SparseRationalMatrix &A, const SparseVector &x,
            const SparseVector &b) {
  SparseVector res = b;
  for (const auto &t : A.triplets()) {
    auto it = x.find(t.col);
    if (it == x.end()) continue;
    Rat &slot = res[t.row];
    slot -= t.value * it->second;
    if (slot == 0) res.erase(t.row);
  }
  return res.empty();
}

int bareissRank(const SparseRationalMatrix &A) {
  const int R = A.rows(), C = A.cols();
  // Clear denominators row-wise, then run fraction-free elimination on mpz.
  std::vector<std::vector<mpz_class>> M(R, std::vector<mpz_class>(C, 0));
  for (int r = 0; r < R; ++r) {
    mpz_class l = 1;
    for (int c = 0; c < C; ++c) {
      Rat v = A.get(r, c);
      mpz_class d = v.get_den();
      l = l / gcd(l, d) * d;
    }
    for (int c = 0; c < C; ++c) {
      Rat v = A.get(r, c);
      M[r][c] = v.get_num() * (l / v.get_den());
    }
  }
  mpz_class prev = 1;
  int rank = 0;
  for (int c = 0; c < C && rank < R; ++c) {
    int pr = -1;
    for (int r = rank; r < R; ++r)
      if (M[r][c] != 0) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(M[rank], M[pr]);
    for (int r = rank + 1; r < R; ++r) {
      for (int cc = c + 1; cc < C; ++cc)
        M[r][cc] = (M[rank][c] * M[r][cc] - M[r][c] * M[rank][cc]) / prev;
      M[r][c] = 0;
    }
    prev = M[rank][c];
    ++rank;
  }
  return rank;
}

/* ------------------------------------------------------------------ */
/* File formats                                                        */
/* ------------------------------------------------------------------ */

std::string ratToString(const Rat &v) {
  Rat c = v;
  c.canonicalize();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

Rat ratFromString(const std::string &s) {
  Rat v(s);
  v.canonicalize();
  return v;
}

std::string writeSystem(const SystemFile &s) {
  std::ostringstream out;
  out << "case " << s.caseName << "\n";
  out << "rows " << s.matrix.rows() << "\n";
  out << "cols " << s.matrix.cols() << "\n";
  out << "nnz " << s.matrix.nnz() << "\n";
  for (const auto &t : s.matrix.triplets())
    out << t.row << " " << t.col << " " << ratToString(t.value) << "\n";
  for (const auto &[r, v] : s.rhs)
    out << "rhs " << r << " " << ratToString(v) << "\n";
  return out.str();
}

SystemFile parseSystem(const std::string &text) {
  std::istringstream in(text);
  std::string kw;
  SystemFile s;
  int rows = 0, cols = 0;
  std::int64_t nnz = 0;
  if (!(in >> kw >> s.caseName) || kw != "case")
    throw std::runtime_error("system file: missing 'case' header");
  if (!(in >> kw >> rows) || kw != "rows")
    throw std::runtime_error("system file: missing 'rows' header");
  if (!(in >> kw >> cols) || kw != "cols")
    throw std::runtime_error("system file: missing 'cols' header");
  if (!(in >> kw >> nnz) || kw != "nnz")
    throw std::runtime_error("system file: missing 'nnz' header");
  s.matrix = SparseRationalMatrix(rows, cols);
  for (std::int64_t i = 0; i < nnz; ++i) {
    int r, c;
    std::string val;
    if (!(in >> r >> c >> val)) throw std::runtime_error("system file: bad triplet");
    s.matrix.set(r, c, ratFromString(val));
  }
  std::string tok;
  while (in >> tok) {
    if (tok != "rhs") throw std::runtime_error("system file: expected 'rhs'");
    int r;
    std::string val;
    if (!(in >> r >> val)) throw std::runtime_error("system file: bad rhs line");
    s.rhs[r] = ratFromString(val);
  }
  return s;
}

std::string writeSolution(const std::string &caseName, int cols,
                          const SparseVector &x) {
  std::ostringstream out;
  out << "solution " << caseName << "\n";
  out << "cols " << cols << "\n";
  for (const auto &[c, v] : x) out << c << " " << ratToString(v) << "\n";
  return out.str();
}

std::pair<std::string, SparseVector> parseSolution(const std::string &text,
                                                   int *colsOut) {
  std::istringstream in(text);
  std::string kw, caseName;
  int cols = 0;
  if (!(in >> kw >> caseName) || kw != "solution")
    throw std::runtime_error("solution file: missing 'solution' header");
  if (!(in >> kw >> cols) || kw != "cols")
    throw std::runtime_error("solution file: missing 'cols' header");
  if (colsOut) *colsOut = cols;
  SparseVector x;
  int c;
  std::string val;
  while (in >> c >> val) x[c] = ratFromString(val);
  return {caseName, x};
}

} // namespace gfc

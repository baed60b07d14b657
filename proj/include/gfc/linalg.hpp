/*
 * Exact sparse linear algebra over arbitrary-precision rationals:
 * row-echelon elimination with selectable pivot strategy, exact solve
 * with infeasibility certificate, and independent residual verification.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gfc {

// Exact rational scalar. mpq_class keeps gcd(|num|, den) = 1 and den > 0
// canonical after every operation (canonicalize() is invoked internally).
using Rat = mpq_class;

enum class PivotStrategy {
  SmallestPivot, // scan the active submatrix for the minimal |num|*|den| entry
  FirstNonzero,  // first nonzero in the leftmost active column (sparse path)
  MinFill,       // min-degree column, then sparsest row (Markowitz heuristic)
};

struct Triplet {
  int row = 0;
  int col = 0;
  Rat value;
};

// Sparse rectangular matrix; one entry per (row, col), no stored zeros.
class SparseRationalMatrix {
public:
  SparseRationalMatrix() = default;
  SparseRationalMatrix(int rows, int cols) : rows_(rows), cols_(cols) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t nnz() const;

  // Adds v to entry (r, c); removes the entry if the sum is zero.
  void add(int r, int c, const Rat &v);
  void set(int r, int c, const Rat &v);
  Rat get(int r, int c) const;

  // All nonzero triplets in (col, row) order (deterministic).
  std::vector<Triplet> triplets() const;

  // Row-major access used by the eliminator.
  const std::map<int, Rat> &rowEntries(int r) const { return data_.at(r); }

  bool operator==(const SparseRationalMatrix &o) const;

private:
  int rows_ = 0;
  int cols_ = 0;
  // row -> (col -> value)
  std::vector<std::map<int, Rat>> data_;
  void ensure();
};

using SparseVector = std::map<int, Rat>; // index -> nonzero value

struct EchelonResult {
  SparseRationalMatrix echelon;     // row echelon form
  std::vector<int> pivotCols;       // pivot column per pivot row (rank entries)
  std::vector<int> rowPermutation;  // original row index per echelon row
  int rank = 0;
  std::int64_t maxFill = 0;         // peak nonzero count during elimination
  bool fillCapExceeded = false;     // bailed out at the fill-in cap
};

struct SolveReport {
  int rank = 0;                     // rank of A
  int augmentedRank = 0;            // rank of [A | b]
  bool feasible = false;
  SparseVector solution;            // valid iff feasible
  bool residualExactZero = false;   // verify(A, x, b), exact arithmetic
  std::int64_t nonzeros = 0;        // nonzeros in the returned solution
  bool integersOnly = false;        // all solution entries are integers
  std::string pivotLog;             // strategy + fill summary
  std::vector<int> infeasibleRows;  // rows with 0 = nonzero after reduction
};

// Exact row echelon form of A. The rank is strategy-independent.
EchelonResult eliminate(const SparseRationalMatrix &A, PivotStrategy strategy,
                        std::int64_t fillCap = 10000000);

// Solves A x = b exactly. Free variables are set to zero. If infeasible,
// report.feasible = false and augmentedRank = rank + 1 (the certificate).
SolveReport solve(const SparseRationalMatrix &A, const SparseVector &b,
                  PivotStrategy strategy, std::int64_t fillCap = 10000000);

// True iff A x - b is exactly zero; computed independently of eliminate().
bool verify(const SparseRationalMatrix &A, const SparseVector &x,
            const SparseVector &b);

// Dense fraction-free rank (Bareiss); test oracle for eliminate().
int bareissRank(const SparseRationalMatrix &A);

/* System file format (round-trips bit-exactly):
 *   case m|F
 *   rows L
 *   cols M
 *   nnz K
 *   <row> <col> <num>/<den>     (K lines, column-major order)
 *   rhs <row> <num>/<den>       (one line per rhs nonzero)
 */
struct SystemFile {
  std::string caseName; // "m" or "F"
  SparseRationalMatrix matrix;
  SparseVector rhs;
};

std::string writeSystem(const SystemFile &s);
SystemFile parseSystem(const std::string &text);

/* Solution file format:
 *   solution m|F
 *   cols M
 *   <col> <num>/<den>           (one line per nonzero)
 */
std::string writeSolution(const std::string &caseName, int cols,
                          const SparseVector &x);
std::pair<std::string, SparseVector> parseSolution(const std::string &text,
                                                   int *colsOut = nullptr);

std::string ratToString(const Rat &v);
Rat ratFromString(const std::string &s);

} // namespace gfc

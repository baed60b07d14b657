/*
 * Exact linear algebra tests.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/linalg.hpp"
#include "gfc/util.hpp"

#include <doctest.h>

using namespace gfc;

namespace {

SparseRationalMatrix randomMatrix(CounterRng &rng, int rows, int cols,
                                  int nnz) {
  SparseRationalMatrix A(rows, cols);
  for (int k = 0; k < nnz; ++k) {
    int r = static_cast<int>(rng.next() % rows);
    int c = static_cast<int>(rng.next() % cols);
    long num = static_cast<long>(rng.next() % 19) - 9;
    long den = 1 + static_cast<long>(rng.next() % 4);
    A.set(r, c, Rat(num, den));
  }
  return A;
}

} // namespace

TEST_SUITE("linalg") {

TEST_CASE("rational string round trip") {
  for (const char *s : {"0/1", "1/1", "-5/3", "12345678901234567890/7"}) {
    Rat v = ratFromString(s);
    CHECK(ratToString(v) == s);
  }
  CHECK(ratToString(Rat(4, 6)) == "2/3");
}

TEST_CASE("solve a small consistent system and verify") {
  // x + y = 3, 2x - y = 0 -> x = 1, y = 2
  SparseRationalMatrix A(2, 2);
  A.set(0, 0, Rat(1));
  A.set(0, 1, Rat(1));
  A.set(1, 0, Rat(2));
  A.set(1, 1, Rat(-1));
  SparseVector b{{0, Rat(3)}, {1, Rat(0)}};
  for (auto strat : {PivotStrategy::SmallestPivot, PivotStrategy::FirstNonzero,
        PivotStrategy::MinFill}) {
    SolveReport rep = solve(A, b, strat);
    CHECK(rep.feasible);
    CHECK(rep.rank == 2);
    CHECK(rep.solution.at(0) == Rat(1));
    CHECK(rep.solution.at(1) == Rat(2));
    CHECK(rep.residualExactZero);
    CHECK(verify(A, rep.solution, b));
  }
}

TEST_CASE("rank agrees with the dense Bareiss oracle") {
  CounterRng rng(11, 0);
  for (int it = 0; it < 40; ++it) {
    int rows = 2 + static_cast<int>(rng.next() % 7);
    int cols = 2 + static_cast<int>(rng.next() % 7);
    SparseRationalMatrix A =
        randomMatrix(rng, rows, cols, rows * cols / 2 + 1);
    int rkBareiss = bareissRank(A);
    for (auto strat :
         {PivotStrategy::SmallestPivot, PivotStrategy::FirstNonzero,
        PivotStrategy::MinFill}) {
      EchelonResult e = eliminate(A, strat);
      CHECK(e.rank == rkBareiss);
    }
  }
}

TEST_CASE("random consistent systems solve under both strategies") {
  CounterRng rng(12, 0);
  for (int it = 0; it < 25; ++it) {
    int rows = 3 + static_cast<int>(rng.next() % 6);
    int cols = 3 + static_cast<int>(rng.next() % 6);
    SparseRationalMatrix A = randomMatrix(rng, rows, cols, rows * cols / 2 + 2);
    // Construct b = A x0 so the system is consistent by construction.
    SparseVector x0;
    for (int c = 0; c < cols; ++c)
      if (rng.next() % 2) x0[c] = Rat(static_cast<long>(rng.next() % 9) - 4);
    SparseVector b;
    for (const auto &t : A.triplets()) {
      auto it2 = x0.find(t.col);
      if (it2 == x0.end()) continue;
      b[t.row] += t.value * it2->second;
    }
    for (auto it2 = b.begin(); it2 != b.end();)
      it2 = it2->second == 0 ? b.erase(it2) : std::next(it2);
    for (auto strat :
         {PivotStrategy::SmallestPivot, PivotStrategy::FirstNonzero,
        PivotStrategy::MinFill}) {
      SolveReport rep = solve(A, b, strat);
      CHECK(rep.feasible);
      CHECK(rep.residualExactZero);
      CHECK(verify(A, rep.solution, b));
    }
  }
}

TEST_CASE("infeasible system yields the rank certificate") {
  // x + y = 1 and x + y = 2 cannot both hold.
  SparseRationalMatrix A(2, 2);
  A.set(0, 0, Rat(1));
  A.set(0, 1, Rat(1));
  A.set(1, 0, Rat(1));
  A.set(1, 1, Rat(1));
  SparseVector b{{0, Rat(1)}, {1, Rat(2)}};
  SolveReport rep = solve(A, b, PivotStrategy::SmallestPivot);
  CHECK_FALSE(rep.feasible);
  CHECK(rep.augmentedRank == rep.rank + 1);
}

TEST_CASE("system file round trip is bit-exact") {
  CounterRng rng(13, 0);
  SparseRationalMatrix A = randomMatrix(rng, 6, 9, 20);
  SparseVector b{{1, Rat(2, 3)}, {4, Rat(-7)}};
  SystemFile sf{"m", A, b};
  std::string text = writeSystem(sf);
  SystemFile back = parseSystem(text);
  CHECK(back.caseName == "m");
  CHECK(back.matrix == A);
  CHECK(back.rhs == b);
  CHECK(writeSystem(back) == text);
}

TEST_CASE("solution file round trip") {
  SparseVector x{{0, Rat(-1824)}, {3, Rat(5, 2)}, {54, Rat(-12)}};
  std::string text = writeSolution("F", 100, x);
  int cols = 0;
  auto [name, back] = parseSolution(text, &cols);
  CHECK(name == "F");
  CHECK(cols == 100);
  CHECK(back == x);
  CHECK(writeSolution(name, cols, back) == text);
}

} // TEST_SUITE

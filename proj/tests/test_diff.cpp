/*
 * Differentiation and classification tests.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/diff.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace gfc;
using gfc::testing::randomTerm;

namespace {

Term singleEntry(IndexPair p, int pow = 1) {
  Term t;
  t.dQ = 2;
  t.factors[0].multiplyEntry(p, pow);
  return t;
}

} // namespace

TEST_SUITE("diff") {

TEST_CASE("entry derivative groups of dG_ij/dh_ab") {
  Term t = singleEntry({0, 1});
  auto out = diffTerm(t, {2, 3}, DiffMode::FullH);
  // Five groups: two substitutions, one delta term, two 1/N-sum terms.
  REQUIRE(out.size() == 5);
  // Substitution group: -s G_ia G_bj with i=0, j=1, a=2, b=3.
  CHECK(out[0].coeff.asScalarTimes(monoS(1)).value() == Rat(-1));
  CHECK(out[0].factors[0].entries.count(makePair(0, 2)) == 1);
  CHECK(out[0].factors[0].entries.count(makePair(3, 1)) == 1);
  CHECK(out[1].coeff.asScalarTimes(monoS(1)).value() == Rat(-1));
  // Delta group.
  CHECK(out[2].dDelta == 1);
  CHECK(out[2].coeff.asScalarTimes(monoS(1)).value() == Rat(1));
  // h-carrying 1/N-sum groups pick up a fresh index and an h prefactor.
  CHECK(out[3].coeff.asScalarTimes(monoS(2)).value() == Rat(4));
  CHECK(out[3].pH() == 1);
  CHECK(out[3].indexCount() == 5); // 0,1,2,3 and the fresh summation index
  CHECK(out[4].coeff.asScalarTimes(monoS(2)).value() == Rat(-2));
  CHECK(out[4].dDelta == 1);
}

TEST_CASE("Gaussian derivative has three groups with u^{1/2} prefactors") {
  Term t = singleEntry({0, 1});
  auto out = diffTerm(t, {2, 3}, DiffMode::GaussW);
  REQUIRE(out.size() == 3);
  CHECK(out[0].coeff.asScalarTimes(monoU(1)).value() == Rat(-1));
  CHECK(out[1].coeff.asScalarTimes(monoU(1)).value() == Rat(-1));
  CHECK(out[2].dDelta == 1);
  CHECK(out[2].coeff.asScalarTimes(monoU(1)).value() == Rat(1));
}

TEST_CASE("power rule scales the derivative by the entry power") {
  Term t = singleEntry({0, 1}, 3);
  auto out = diffTerm(t, {2, 3}, DiffMode::LeadingOnly);
  REQUIRE(out.size() == 2);
  CHECK(out[0].coeff.asScalar().value() == Rat(-3));
  // One power consumed, the substitution entries added.
  CHECK(out[0].factors[0].entries.at(makePair(0, 1)) == 2);
}

TEST_CASE("derivative differentiates the h prefactor") {
  Term t = singleEntry({0, 1});
  t.hPre.push_back({2, 3});
  t.hPre.push_back({2, 3});
  auto out = diffTerm(t, {2, 3}, DiffMode::FullH);
  // First output: d(h^2)/dh = 2h, leaving one prefactor.
  REQUIRE(!out.empty());
  CHECK(out[0].pH() == 1);
  CHECK(out[0].coeff.asScalar().value() == Rat(2));
}

TEST_CASE("F chain rule appends a Dim-factor") {
  Term t;
  t.withF = true;
  t.dQ = 2;
  t.factors[0].multiplyEntry({0, 1}, 1);
  auto out = diffTerm(t, {0, 1}, DiffMode::LeadingOnly);
  // Two substitution outputs plus one chain-rule output.
  REQUIRE(out.size() == 3);
  const Term &chain = out.back();
  CHECK(chain.fOrder() == 2);
  CHECK(chain.coeff.asScalar().value() == Rat(-2));
  CHECK(chain.factors.back().entries.count(makePair(0, 1)) == 1);
}

TEST_CASE("derivative index balance after repeated differentiation") {
  // Every substitution inserts the pair indices together, and the 1/N-sum
  // groups carry an h prefactor until a later h-derivative consumes it; so
  // any output free of h and delta has occ(a) = occ(b), bounded by k.
  CounterRng rng(31, 0);
  for (int it = 0; it < 40; ++it) {
    Term t = randomTerm(rng, 3, 3, false);
    for (int k = 1; k <= 2; ++k) {
      std::vector<Term> cur = {t};
      for (int d = 0; d < k; ++d) {
        std::vector<Term> next;
        for (const auto &x : cur) {
          auto ts = diffTerm(x, {4, 5}, DiffMode::FullH);
          next.insert(next.end(), ts.begin(), ts.end());
        }
        cur = std::move(next);
      }
      for (const auto &x : cur) {
        if (x.pH() > 0 || x.dDelta > 0) continue;
        auto occ = x.occurrences();
        int na = occ.count(4) ? occ.at(4) : 0;
        int nb = occ.count(5) ? occ.at(5) : 0;
        CHECK(na == nb);
        CHECK(na <= k);
      }
    }
  }
}

TEST_CASE("cumulant expansion bookkeeping") {
  Term t = singleEntry({0, 1});
  t.hPre.push_back({0, 1});
  auto out = cumulantExpand(t, {0, 1}, 4);
  CHECK(!out.empty());
  for (const auto &x : out) {
    CHECK(x.dN == 0); // the 1/N of the expansion
    // kappa_2 terms keep dQ, kappa_3 adds one power of 1/q, kappa_4 two.
    CHECK(x.dQ >= 2);
    CHECK(x.dQ <= 4);
  }
  // The k = 1 leading part must contain the pure substitution terms.
  bool foundSubstitution = false;
  for (const auto &x : out)
    if (x.pH() == 0 && x.dDelta == 0 && x.dQ == 2) foundSubstitution = true;
  CHECK(foundSubstitution);
}

TEST_CASE("classification of hand-built terms") {
  // Leading: matched, d_q = 2, no h, no delta.
  Term lead = singleEntry({0, 1}, 2);
  CHECK(classify(lead, CaseCtx::M) == Classification::Leading);
  CHECK(classify(lead, CaseCtx::M) == Classification::Leading);

  // d_q >= 4 with off-diagonal degree >= 2.
  Term c1 = singleEntry({0, 1}, 2);
  c1.dQ = 4;
  CHECK(classify(c1, CaseCtx::M) == Classification::TauG1_case1);

  // h-prefactor with an outside index occurring twice off-diagonally.
  Term c2 = singleEntry({0, 2}, 1);
  c2.factors[0].multiplyEntry({1, 2}, 1);
  c2.hPre.push_back({0, 1});
  CHECK(classify(c2, CaseCtx::M) == Classification::TauG1_case2);

  // h with d_q >= 1 but no such outside index.
  Term c3 = singleEntry({0, 1}, 1);
  c3.hPre.push_back({0, 1});
  CHECK(classify(c3, CaseCtx::M) == Classification::TauG1_case3);

  // delta term.
  Term c4 = singleEntry({0, 1}, 2);
  c4.dDelta = 1;
  CHECK(classify(c4, CaseCtx::M) == Classification::TauG1_case4);

  // unmatched.
  Term c5 = singleEntry({0, 1}, 1);
  CHECK(classify(c5, CaseCtx::M) == Classification::TauG1_case5);

  // edge marker.
  Term m = singleEntry({0, 1}, 2);
  m.edgeMarker = true;
  CHECK(classify(m, CaseCtx::M) == Classification::TauG2);
  Term mF = m;
  mF.withF = true;
  CHECK(classify(mF, CaseCtx::F) == Classification::TauF2);

  // Negligible beyond the truncation order.
  Term neg = singleEntry({0, 1}, 2);
  neg.dQ = 14;
  CHECK(classify(neg, CaseCtx::M) == Classification::Negligible);

  // F-case ordering: h beats delta beats d_q beats unmatched.
  Term f1 = singleEntry({0, 1}, 2);
  f1.withF = true;
  f1.hPre.push_back({0, 1});
  CHECK(classify(f1, CaseCtx::F) == Classification::TauF1_case1);
  Term f2 = singleEntry({0, 1}, 2);
  f2.withF = true;
  f2.dDelta = 1;
  CHECK(classify(f2, CaseCtx::F) == Classification::TauF1_case2);
  Term f3 = singleEntry({0, 1}, 2);
  f3.withF = true;
  f3.dQ = 4;
  CHECK(classify(f3, CaseCtx::F) == Classification::TauF1_case3);
  Term f4 = singleEntry({0, 1}, 1);
  f4.withF = true;
  CHECK(classify(f4, CaseCtx::F) == Classification::TauF1_case4);
}

TEST_CASE("derivative requires distinct indices") {
  Term t = singleEntry({0, 1});
  CHECK_THROWS_AS(diffTerm(t, {2, 2}, DiffMode::FullH), std::invalid_argument);
}

} // TEST_SUITE

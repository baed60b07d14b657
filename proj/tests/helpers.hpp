/*
 * Shared test helpers: deterministic random terms and matrices.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include "gfc/term.hpp"
#include "gfc/util.hpp"

namespace gfc::testing {

// Random term with p_h = dDelta = 0, at most `maxIdx` indices and
// `maxEntries` Green entries; optionally an F-term with up to 3 factors.
inline Term randomTerm(CounterRng &rng, int maxIdx, int maxEntries,
                       bool withF = false) {
  Term t;
  t.dQ = 2;
  t.withF = withF;
  int nf = withF ? 1 + static_cast<int>(rng.next() % 3) : 1;
  t.factors.assign(static_cast<std::size_t>(nf), GreenProduct{});
  int nEntries = 1 + static_cast<int>(rng.next() % maxEntries);
  for (int e = 0; e < nEntries; ++e) {
    int i = static_cast<int>(rng.next() % maxIdx);
    int j = static_cast<int>(rng.next() % maxIdx);
    int f = static_cast<int>(rng.next() % nf);
    t.factors[f].multiplyEntry(makePair(i, j), 1);
  }
  return t;
}

// A random relabeling of t's indices (not necessarily canonical).
inline Term randomRelabel(CounterRng &rng, const Term &t) {
  auto idxs = t.indexSet();
  std::vector<int> from(idxs.begin(), idxs.end());
  std::vector<int> to = from;
  for (std::size_t i = to.size(); i > 1; --i)
    std::swap(to[i - 1], to[rng.next() % i]);
  std::map<int, int> perm;
  for (std::size_t i = 0; i < from.size(); ++i) perm[from[i]] = to[i];
  return t.relabeled(perm);
}

} // namespace gfc::testing

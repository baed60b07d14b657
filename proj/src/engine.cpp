/*
 * Identity engine: start-term enumeration, expansion rules, generation,
 * assembly, target vectors, and cancellation verification.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/engine.hpp"

#include "gfc/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gfc {

/* ------------------------------------------------------------------ */
/* Start-term enumeration                                              */
/* ------------------------------------------------------------------ */

namespace {

// All products of Green entries on indices 0..n-1 realizing the occurrence
// profile `occ` exactly (diagonal entries count twice). Deterministic order.
void productsForProfile(int n, const std::vector<int> &occ,
                        std::vector<GreenProduct> &out) {
  std::vector<IndexPair> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);

  std::vector<int> remaining = occ;
  GreenProduct current;
  // Recursive choice of the power of each pair.
  auto rec = [&](auto &&self, std::size_t k) -> void {
    if (k == pairs.size()) {
      for (int r : remaining)
        if (r != 0) return;
      out.push_back(current);
      return;
    }
    auto [i, j] = pairs[k];
    int maxPow;
    if (i == j)
      maxPow = remaining[i] / 2;
    else
      maxPow = std::min(remaining[i], remaining[j]);
    for (int p = 0; p <= maxPow; ++p) {
      if (p > 0) {
        if (i == j) {
          remaining[i] -= 2;
        } else {
          remaining[i] -= 1;
          remaining[j] -= 1;
        }
        current.multiplyEntry({i, j}, 1);
      }
      self(self, k + 1);
    }
    // undo
    auto it = current.entries.find({i, j});
    int placed = it == current.entries.end() ? 0 : it->second;
    if (placed > 0) {
      current.multiplyEntry({i, j}, -placed);
      remaining[i] += (i == j) ? 2 * placed : placed;
      if (i != j) remaining[j] += placed;
    }
    (void)maxPow;
  };
  rec(rec, 0);
}

// Type-0/A/AB occurrence profiles on n indices (each 2 or 4, at most two 4s),
// in deterministic order.
std::vector<std::vector<int>> typeProfiles(int n) {
  std::vector<std::vector<int>> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    if (__builtin_popcount(static_cast<unsigned>(mask)) > 2) continue;
    std::vector<int> occ(n);
    for (int i = 0; i < n; ++i) occ[i] = (mask >> i) & 1 ? 4 : 2;
    out.push_back(std::move(occ));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// All unordered partitions of the expanded entry list into nonempty blocks
// (restricted-growth strings); duplicates from equal entries are removed
// later through canonical forms.
void partitionsOf(const std::vector<IndexPair> &items,
                  std::vector<std::vector<GreenProduct>> &out) {
  std::vector<int> block(items.size(), 0);
  auto rec = [&](auto &&self, std::size_t k, int maxUsed) -> void {
    if (k == items.size()) {
      std::vector<GreenProduct> fs(maxUsed + 1);
      for (std::size_t i = 0; i < items.size(); ++i)
        fs[block[i]].multiplyEntry(items[i], 1);
      out.push_back(std::move(fs));
      return;
    }
    for (int b = 0; b <= maxUsed + 1; ++b) {
      block[k] = b;
      self(self, k + 1, std::max(maxUsed, b));
    }
  };
  if (items.empty()) return;
  rec(rec, 0, -1);
}

} // namespace

std::vector<Term> enumerateStartTerms(int nMax, CaseCtx ctx) {
  if (nMax < 1) throw std::invalid_argument("nMax must be >= 1");
  std::vector<Term> result;
  std::set<std::string> seen; // canonical shape keys

  auto emit = [&](Term t) {
    t = canonicalize(t);
    std::string key = std::to_string(t.indexCount()) + "|" + t.shapeKey();
    if (seen.insert(key).second) result.push_back(std::move(t));
  };

  if (ctx == CaseCtx::F) {
    // The single empty-factor term with no indices.
    Term empty;
    empty.withF = true;
    empty.dQ = 2;
    empty.factors = {GreenProduct{}};
    emit(empty);
  }

  for (int n = 1; n <= nMax; ++n) {
    for (const auto &occ : typeProfiles(n)) {
      std::vector<GreenProduct> products;
      productsForProfile(n, occ, products);
      for (const auto &prod : products) {
        // Every index 0..n-1 is used by construction of the profiles.
        if (ctx == CaseCtx::M) {
          if (prod.degree() < 2) continue;
          Term t;
          t.dQ = 2;
          t.factors = {prod};
          emit(t);
        } else {
          // All partitions of the entries into Dim-factors, optionally
          // with one extra empty Dim-factor.
          std::vector<IndexPair> items;
          for (const auto &[p, pow] : prod.entries)
            for (int i = 0; i < pow; ++i) items.push_back(p);
          std::vector<std::vector<GreenProduct>> parts;
          partitionsOf(items, parts);
          for (const auto &fs : parts) {
            Term t;
            t.withF = true;
            t.dQ = 2;
            t.factors = fs;
            emit(t);
            Term te = t;
            te.factors.push_back(GreenProduct{});
            emit(te);
          }
        }
      }
    }
  }
  return result;
}

/* ------------------------------------------------------------------ */
/* Expansion rules                                                     */
/* ------------------------------------------------------------------ */

namespace {

CaseCtx ctxOf(const Term &t) { return t.withF ? CaseCtx::F : CaseCtx::M; }

// Adds one leading-expansion output to the identity entries, registering
// the canonical shape (coefficient normalized to 1) in the basis.
void accumulate(std::map<int, Rat> &acc, TermContainer &basis, const Term &t,
                const Rat &pref) {
  auto sc = t.coeff.asScalar();
  if (!sc)
    throw std::logic_error("non-scalar coefficient in leading expansion");
  Rat val = *sc * pref;
  if (val == 0) return;
  Term shape = t;
  shape.coeff = CoeffPoly::one();
  shape = canonicalize(shape);
  acc[basis.insert(shape)] += val;
}

void logClassified(std::map<std::string, long long> &dropLog, const Term &t,
                   CaseCtx ctx) {
  Term u = t;
  u.coeff = CoeffPoly::one();
  Classification c = classify(u, ctx);
  if (c != Classification::Leading) ++dropLog[classificationName(c)];
}

// Classifies and counts the non-leading output of the full k = 1
// differentiation (h- and Gaussian parts) at this expansion site.
void logDerivativeDrops(std::map<std::string, long long> &dropLog,
                        const Term &inserted, IndexPair pair, CaseCtx ctx) {
  for (DiffMode mode : {DiffMode::FullH, DiffMode::GaussW})
    for (const Term &t : diffTerm(inserted, pair, mode))
      logClassified(dropLog, t, ctx);
}

// The byproducts of the resolvent-identity rewriting: the kappa_4 part of
// (2 - z(t)) (d_q raised by 2) and the (x + i eta + chi) marker.
void logEdgeByproducts(std::map<std::string, long long> &dropLog,
                       const Term &augmented, CaseCtx ctx) {
  Term b = augmented;
  b.dQ += 2;
  b.coeff = CoeffPoly(Rat(-3), monoS(4) * monoKappa(4));
  logClassified(dropLog, b, ctx);
  Term m = augmented;
  m.edgeMarker = true;
  logClassified(dropLog, m, ctx);
}

void finishIdentity(Identity &id) {
  for (auto it = id.entries.begin(); it != id.entries.end();)
    it = it->second == 0 ? id.entries.erase(it) : std::next(it);
}

bool hasEmptyFactor(const Term &t) {
  for (const auto &f : t.factors)
    if (f.entries.empty()) return true;
  return false;
}

} // namespace

Identity rule1(const Term &start, int factorIdx, IndexPair entry,
               bool reflected, TermContainer &basis,
               std::map<std::string, long long> &dropLog) {
  if (entry.first == entry.second)
    throw std::invalid_argument("rule1 requires an off-diagonal entry");
  if (start.factors.at(factorIdx).entries.count(entry) == 0)
    throw std::invalid_argument("rule1: entry not present in the factor");
  const CaseCtx ctx = ctxOf(start);
  // G_{alpha beta} = (1/2) Sum_j h_{alpha j} G_{j beta} - delta/2 + ((2-z)/2) G
  const int alpha = reflected ? entry.second : entry.first;
  const int beta = reflected ? entry.first : entry.second;
  const int j = start.freshIndex();

  Term rest = start;
  rest.factors[factorIdx].multiplyEntry(entry, -1);
  Term inserted = rest;
  inserted.factors[factorIdx].multiplyEntry(makePair(j, beta), 1);

  Identity id;
  id.rule = reflected ? "R1'" : "R1";
  {
    std::ostringstream s;
    s << "factor " << factorIdx << " entry (" << entry.first << ","
      << entry.second << ")";
    id.site = s.str();
  }
  id.startClassId = basis.insert(start);
  id.entries[id.startClassId] += Rat(-1);
  for (const Term &t : diffTerm(inserted, makePair(alpha, j), DiffMode::LeadingOnly))
    accumulate(id.entries, basis, t, Rat(1, 2));

  // Dropped non-leading terms: -delta/2 byproduct, the (2-z)/2 byproducts,
  // and the delta/h-carrying groups of the full first derivative.
  Term bDelta = rest;
  bDelta.dDelta += 1;
  bDelta.coeff = CoeffPoly(Rat(-1, 2));
  logClassified(dropLog, bDelta, ctx);
  logEdgeByproducts(dropLog, start, ctx);
  logDerivativeDrops(dropLog, inserted, makePair(alpha, j), ctx);

  finishIdentity(id);
  return id;
}

Identity rule2(const Term &start, int factorIdx, TermContainer &basis,
               std::map<std::string, long long> &dropLog) {
  const CaseCtx ctx = ctxOf(start);
  // 1 = (1/N) Sum_{k,j} h_jk G_kj - (2/N) Sum_j G_jj + ((2-z)/N) Sum_j G_jj
  const int j = start.freshIndex();
  auto idxs = start.indexSet();
  idxs.insert(j);
  int k = 0;
  while (idxs.count(k)) ++k;

  Term inserted = start;
  inserted.factors[factorIdx].multiplyEntry(makePair(k, j), 1);

  Identity id;
  id.rule = "R2";
  id.site = "factor " + std::to_string(factorIdx);
  const bool zeroStart = hasEmptyFactor(start);
  if (!zeroStart) {
    id.startClassId = basis.insert(start);
    id.entries[id.startClassId] += Rat(-1);
  }
  for (const Term &t : diffTerm(inserted, makePair(j, k), DiffMode::LeadingOnly))
    accumulate(id.entries, basis, t, Rat(1));
  Term minus2 = start;
  minus2.factors[factorIdx].multiplyEntry(makePair(j, j), 1);
  minus2.coeff = CoeffPoly(Rat(-2));
  accumulate(id.entries, basis, minus2, Rat(1));

  Term edgeBase = start;
  edgeBase.factors[factorIdx].multiplyEntry(makePair(j, j), 1);
  logEdgeByproducts(dropLog, edgeBase, ctx);
  logDerivativeDrops(dropLog, inserted, makePair(j, k), ctx);

  finishIdentity(id);
  return id;
}

Identity rule3(const Term &start, int factorIdx, int existing,
               TermContainer &basis, std::map<std::string, long long> &dropLog) {
  if (!start.indexSet().count(existing))
    throw std::invalid_argument("rule3: index not in the index set");
  const CaseCtx ctx = ctxOf(start);
  // 1 = Sum_j h_{aj} G_{ja} - 2 G_aa + (2-z) G_aa, with a = existing
  const int j = start.freshIndex();

  Term inserted = start;
  inserted.factors[factorIdx].multiplyEntry(makePair(existing, j), 1);

  Identity id;
  id.rule = "R3-" + std::string(1, static_cast<char>('a' + existing));
  id.site = "factor " + std::to_string(factorIdx) + " index " +
            std::to_string(existing);
  const bool zeroStart = hasEmptyFactor(start);
  if (!zeroStart) {
    id.startClassId = basis.insert(start);
    id.entries[id.startClassId] += Rat(-1);
  }
  for (const Term &t :
       diffTerm(inserted, makePair(existing, j), DiffMode::LeadingOnly))
    accumulate(id.entries, basis, t, Rat(1));
  Term minus2 = start;
  minus2.factors[factorIdx].multiplyEntry(makePair(existing, existing), 1);
  minus2.coeff = CoeffPoly(Rat(-2));
  accumulate(id.entries, basis, minus2, Rat(1));

  Term edgeBase = start;
  edgeBase.factors[factorIdx].multiplyEntry(makePair(existing, existing), 1);
  logEdgeByproducts(dropLog, edgeBase, ctx);
  logDerivativeDrops(dropLog, inserted, makePair(existing, j), ctx);

  finishIdentity(id);
  return id;
}

/* ------------------------------------------------------------------ */
/* Generation mechanism                                                */
/* ------------------------------------------------------------------ */

GenerationResult generateAll(CaseCtx ctx, int nMax) {
  GenerationResult res;
  auto starts = enumerateStartTerms(nMax, ctx);
  res.startCount = static_cast<long long>(starts.size());

  std::map<std::vector<std::pair<int, Rat>>, int> seen;
  auto addIdentity = [&](Identity id) {
    if (id.entries.empty()) {
      ++res.trivialSkipped;
      return;
    }
    std::vector<std::pair<int, Rat>> key(id.entries.begin(), id.entries.end());
    auto [it, fresh] = seen.emplace(std::move(key),
                                    static_cast<int>(res.identities.size()));
    if (!fresh) {
      ++res.duplicatesRemoved;
      return;
    }
    res.identities.push_back(std::move(id));
  };

  for (const Term &start : starts) {
    const auto occ = start.occurrences();
    auto occOf = [&occ](int v) {
      auto it = occ.find(v);
      return it == occ.end() ? 0 : it->second;
    };
    const int nIdx = start.indexCount();
    const bool hasIdx0 = start.indexSet().count(0) > 0;
    const bool hasIdx1 = start.indexSet().count(1) > 0;

    // Locate the empty Dim-factor, if any (F-case zero start terms). Only
    // expansions through the empty factor give non-trivial identities.
    int emptyFi = -1;
    for (std::size_t fi = 0; fi < start.factors.size(); ++fi)
      if (start.factors[fi].entries.empty()) emptyFi = static_cast<int>(fi);

    if (emptyFi >= 0) {
      int skipped = 0;
      for (const auto &f : start.factors) skipped += 2 * f.degree() > 0;
      if (nIdx <= 3) {
        addIdentity(rule2(start, emptyFi, res.basis, res.dropLog));
        skipped += static_cast<int>(start.factors.size()) - 1;
      }
      if (hasIdx0 && occOf(0) <= 2) {
        addIdentity(rule3(start, emptyFi, 0, res.basis, res.dropLog));
        skipped += static_cast<int>(start.factors.size()) - 1;
      }
      if (hasIdx1 && occOf(1) <= 2) {
        addIdentity(rule3(start, emptyFi, 1, res.basis, res.dropLog));
        skipped += static_cast<int>(start.factors.size()) - 1;
      }
      res.trivialSkipped += skipped;
      continue;
    }

    // Rules 1 and 1' on every off-diagonal entry site.
    for (std::size_t fi = 0; fi < start.factors.size(); ++fi)
      for (const auto &[p, pow] : start.factors[fi].entries) {
        (void)pow;
        if (p.first == p.second) continue;
        addIdentity(rule1(start, static_cast<int>(fi), p, false, res.basis,
                          res.dropLog));
        addIdentity(rule1(start, static_cast<int>(fi), p, true, res.basis,
                          res.dropLog));
      }

    // Rule 2 when #I <= 3; in the F-case once per Dim-factor.
    if (nIdx <= 3) {
      if (ctx == CaseCtx::M) {
        addIdentity(rule2(start, 0, res.basis, res.dropLog));
      } else {
        for (std::size_t fi = 0; fi < start.factors.size(); ++fi)
          addIdentity(rule2(start, static_cast<int>(fi), res.basis, res.dropLog));
      }
    }

    // Rule 3 with indices that occur at most twice. In the one-factor
    // case the distinguished labels 0 and 1 suffice (the canonical
    // labeling puts the indices of highest occurrence first, so
    // type-A/AB fours sit at 0 and 1); with several Dim-factors the
    // labeling of the twice-occurring indices is not structurally
    // canonical, so the rule is applied with every eligible index.
    auto applyRule3 = [&](int idx) {
      if (ctx == CaseCtx::M) {
        addIdentity(rule3(start, 0, idx, res.basis, res.dropLog));
      } else {
        for (std::size_t fi = 0; fi < start.factors.size(); ++fi)
          addIdentity(
              rule3(start, static_cast<int>(fi), idx, res.basis, res.dropLog));
      }
    };
    if (hasIdx0 && occOf(0) < 4) applyRule3(0);
    if (hasIdx1 && occOf(1) < 4) applyRule3(1);
  }
  return res;
}

/* ------------------------------------------------------------------ */
/* Target vectors                                                      */
/* ------------------------------------------------------------------ */

namespace {

Term makeProductTerm(std::initializer_list<std::pair<IndexPair, int>> entries) {
  Term t;
  t.dQ = 2;
  GreenProduct g;
  for (const auto &[p, pow] : entries) g.multiplyEntry(makePair(p.first, p.second), pow);
  t.factors = {g};
  return t;
}

bool isLeadingShape(const Term &t) {
  return t.pH() == 0 && t.dDelta == 0 && t.dQ == 2 && t.dN == 1 && t.matched();
}

// Applies k full h-derivatives w.r.t. (0,1), extracts the leading part,
// strips the common kappa_4 e^{-t}(1-e^{-t}) prefactor, and adds the
// rational coefficients into `out` keyed by basis class.
void expandPiece(const Term &piece, int k, const TermContainer &basis,
                 SparseVector &out, std::vector<std::string> *missing) {
  std::vector<Term> cur = {piece};
  for (int d = 0; d < k; ++d) {
    std::vector<Term> next;
    for (const Term &t : cur) {
      auto ts = diffTerm(t, {0, 1}, DiffMode::FullH);
      next.insert(next.end(), ts.begin(), ts.end());
    }
    cur = std::move(next);
  }
  const Mono common = monoUS2() * monoKappa(4);
  for (const Term &t : cur) {
    if (!isLeadingShape(t)) continue;
    auto val = t.coeff.asScalarTimes(common);
    if (!val)
      throw std::logic_error("leading target term with unexpected prefactor: " +
                             termToLine(t));
    if (*val == 0) continue;
    Term shape = t;
    shape.coeff = CoeffPoly::one();
    shape = canonicalize(shape);
    auto id = basis.find(shape);
    if (!id) {
      if (missing) {
        missing->push_back(termToLine(shape));
        continue;
      }
      throw std::runtime_error("target term missing from basis: " +
                               termToLine(shape));
    }
    Rat &slot = out[*id];
    slot += *val;
    if (slot == 0) out.erase(*id);
  }
}

} // namespace

SparseVector targetVectorM(const TermContainer &basis) {
  // The nine leading terms (coefficients relative to kappa_4 e^{-t}(1-e^{-t})).
  struct Entry {
    int coeff;
    std::vector<std::pair<IndexPair, int>> entries;
  };
  const std::vector<Entry> targets = {
      {12, {{{0, 1}, 2}}},
      {24, {{{0, 1}, 1}, {{0, 2}, 1}, {{1, 2}, 1}}},
      {48, {{{0, 0}, 1}, {{1, 2}, 1}, {{1, 3}, 1}, {{2, 3}, 1}}},
      {72, {{{0, 1}, 1}, {{0, 3}, 1}, {{1, 2}, 1}, {{2, 3}, 1}}},
      {24, {{{0, 3}, 2}, {{1, 2}, 2}}},
      {12, {{{0, 0}, 2}, {{1, 1}, 1}, {{1, 2}, 2}}},
      {36, {{{0, 0}, 1}, {{0, 1}, 1}, {{0, 2}, 1}, {{1, 1}, 1}, {{1, 2}, 1}}},
      {36, {{{0, 0}, 1}, {{0, 1}, 2}, {{1, 2}, 2}}},
      {12, {{{0, 1}, 3}, {{0, 2}, 1}, {{1, 2}, 1}}},
  };
  SparseVector out;
  for (const auto &e : targets) {
    Term t;
    t.dQ = 2;
    GreenProduct g;
    for (const auto &[p, pow] : e.entries) g.multiplyEntry(p, pow);
    t.factors = {g};
    t = canonicalize(t);
    auto id = basis.find(t);
    if (!id)
      throw std::runtime_error("m-case target term missing from basis: " +
                               termToLine(t));
    out[*id] += Rat(e.coeff);
  }
  if (out.size() != 9)
    throw std::logic_error("m-case target does not have nine distinct classes");
  return out;
}

SparseVector targetVectorMRecomputed(const TermContainer &basis) {
  SparseVector out;
  // Fourth-order kappa_4 pieces of d/dt E[m(t, z(t))]:
  // (1/(2N^2)) Sum_{v,a,b} (-e^{-t}/sqrt(1-e^{-t})) (kappa_4/q^2)
  //   E[d^3 (G_va G_bv) / dh_ab^3]
  {
    Term p = makeProductTerm({{{2, 0}, 1}, {{1, 2}, 1}});
    p.coeff = CoeffPoly(Rat(-1, 2), monoU(2) * monoS(-1) * monoKappa(4));
    expandPiece(p, 3, basis, out, nullptr);
  }
  // (1/N) Sum_{v,j} 12 e^{-t}(1-e^{-t}) kappa_4/q^2 E[G_vj G_jv]
  {
    Term p = makeProductTerm({{{0, 1}, 2}});
    p.coeff = CoeffPoly(Rat(12), monoUS2() * monoKappa(4));
    expandPiece(p, 0, basis, out, nullptr);
  }
  // (1/N^3) Sum_{v,j,a,b} e^{-t} (kappa_4/q^2) E[d^3 (h_ab G_vj G_jv)/dh_ab^3]
  {
    Term p = makeProductTerm({{{2, 3}, 2}});
    p.coeff = CoeffPoly(Rat(1), monoU(2) * monoKappa(4));
    p.hPre.push_back({0, 1});
    expandPiece(p, 3, basis, out, nullptr);
  }
  return out;
}

SparseVector targetVectorF(const TermContainer &basis,
                           std::vector<std::string> *missingOut) {
  SparseVector out;
  // -(1/N) Sum_{a,b} (1/2)(e^{-t}/sqrt(1-e^{-t}))(kappa_4/q^2)
  //   E[d^3 (F'(X) Dim G_ab)/dh_ab^3]
  // The sign follows the m-case k-sum line: the h-part of F' dX/dt is
  // -(e^{-t}/(2 sqrt(1-e^{-t}))) Sum_{a,b} E[h_ab F'(X) Dim G_ab].
  {
    Term p;
    p.withF = true;
    p.dQ = 2;
    GreenProduct g;
    g.multiplyEntry({0, 1}, 1);
    p.factors = {g};
    p.coeff = CoeffPoly(Rat(-1, 2), monoU(2) * monoS(-1) * monoKappa(4));
    expandPiece(p, 3, basis, out, missingOut);
  }
  // (1/q^2) Sum_v 12 e^{-t}(1-e^{-t}) kappa_4 E[F'(X) Dim G_vv]
  {
    Term p;
    p.withF = true;
    p.dQ = 2;
    GreenProduct g;
    g.multiplyEntry({0, 0}, 1);
    p.factors = {g};
    p.coeff = CoeffPoly(Rat(12), monoUS2() * monoKappa(4));
    expandPiece(p, 0, basis, out, missingOut);
  }
  // (1/N^2) Sum_{v,a,b} e^{-t} (kappa_4/q^2) E[d^3 (h_ab F'(X) Dim G_vv)/dh_ab^3]
  {
    Term p;
    p.withF = true;
    p.dQ = 2;
    GreenProduct g;
    g.multiplyEntry({2, 2}, 1);
    p.factors = {g};
    p.coeff = CoeffPoly(Rat(1), monoU(2) * monoKappa(4));
    p.hPre.push_back({0, 1});
    expandPiece(p, 3, basis, out, missingOut);
  }
  return out;
}

/* ------------------------------------------------------------------ */
/* Assembly and verification                                           */
/* ------------------------------------------------------------------ */

AssembledSystem assemble(const GenerationResult &gen, CaseCtx ctx,
                         bool allowMissingTargets) {
  AssembledSystem sys;
  const int L = gen.basis.size();
  const int M = static_cast<int>(gen.identities.size());
  sys.matrix = SparseRationalMatrix(L, M);
  for (int m = 0; m < M; ++m)
    for (const auto &[l, c] : gen.identities[m].entries) sys.matrix.set(l, m, c);
  if (ctx == CaseCtx::M) {
    sys.rhs = targetVectorM(gen.basis);
  } else {
    std::vector<std::string> missing;
    sys.rhs = targetVectorF(gen.basis, &missing);
    sys.missingTargets = std::move(missing);
    if (!sys.missingTargets.empty() && !allowMissingTargets)
      throw std::runtime_error("F-case target terms missing from basis (" +
                               std::to_string(sys.missingTargets.size()) + ")");
  }
  return sys;
}

std::string CancellationReport::toJson() const {
  nlohmann::json j;
  j["case"] = caseName;
  j["rows"] = rows;
  j["cols"] = cols;
  j["nnz"] = nnz;
  j["rank"] = rank;
  j["solved"] = solved;
  j["verified"] = verified;
  j["nonzero_multipliers"] = nonzeroMultipliers;
  j["integers_only"] = integersOnly;
  j["wall_time_seconds"] = wallTimeSeconds;
  j["system_sha256"] = systemHash;
  j["solution_sha256"] = solutionHash;
  j["notes"] = notes;
  return j.dump(2);
}

std::string CancellationReport::toText() const {
  std::ostringstream s;
  s << "case " << caseName << ": " << rows << "x" << cols << ", nnz " << nnz
    << ", rank " << rank << ", solved " << (solved ? "yes" : "no")
    << ", verified " << (verified ? "yes" : "no") << ", multipliers "
    << nonzeroMultipliers << (integersOnly ? " (all integer)" : "")
    << ", wall " << wallTimeSeconds << "s";
  for (const auto &n : notes) s << "\n  note: " << n;
  return s.str();
}

CancellationReport verifyCancellation(CaseCtx ctx, int nMax,
                                      const std::string &outDir) {
  auto t0 = std::chrono::steady_clock::now();
  CancellationReport rep;
  rep.caseName = ctx == CaseCtx::M ? "m" : "F";

  GenerationResult gen = generateAll(ctx, nMax);
  AssembledSystem sys = assemble(gen, ctx, /*allowMissingTargets=*/true);
  for (const auto &m : sys.missingTargets)
    rep.notes.push_back("target term unreachable at this nMax: " + m);

  rep.rows = sys.matrix.rows();
  rep.cols = sys.matrix.cols();
  rep.nnz = sys.matrix.nnz();

  PivotStrategy strategy = sys.matrix.cols() <= 500 ? PivotStrategy::SmallestPivot
                                                    : PivotStrategy::MinFill;
  SolveReport sol = solve(sys.matrix, sys.rhs, strategy);
  rep.rank = sol.rank;
  rep.solved = sol.feasible;
  rep.verified = sol.feasible && sol.residualExactZero;
  rep.nonzeroMultipliers = sol.nonzeros;
  rep.integersOnly = sol.integersOnly;
  rep.notes.push_back(sol.pivotLog);
  if (!sol.feasible && sol.augmentedRank == sol.rank + 1)
    rep.notes.push_back("infeasible: rank(A|b) = rank(A) + 1");

  SystemFile sf{rep.caseName, sys.matrix, sys.rhs};
  std::string sysText = writeSystem(sf);
  std::string solText = writeSolution(rep.caseName, rep.cols, sol.solution);
  rep.systemHash = sha256Hex(sysText);
  rep.solutionHash = sha256Hex(solText);
  if (!outDir.empty()) {
    std::filesystem::create_directories(outDir);
    atomicWrite(outDir + "/system_" + rep.caseName + ".txt", sysText);
    atomicWrite(outDir + "/solution_" + rep.caseName + ".txt", solText);
    // Provenance sidecar: rule and site per identity column, basis lines.
    nlohmann::json prov;
    prov["case"] = rep.caseName;
    prov["drop_log"] = gen.dropLog;
    prov["duplicates_removed"] = gen.duplicatesRemoved;
    prov["trivial_skipped"] = gen.trivialSkipped;
    prov["start_terms"] = gen.startCount;
    nlohmann::json ids = nlohmann::json::array();
    for (const auto &id : gen.identities)
      ids.push_back({{"rule", id.rule},
                     {"site", id.site},
                     {"start_class", id.startClassId}});
    prov["identities"] = ids;
    nlohmann::json bs = nlohmann::json::array();
    for (int l = 0; l < gen.basis.size(); ++l)
      bs.push_back(termToLine(gen.basis.rep(l)));
    prov["basis"] = bs;
    atomicWrite(outDir + "/provenance_" + rep.caseName + ".json", prov.dump(2));
  }

  rep.wallTimeSeconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

/* ------------------------------------------------------------------ */
/* Worked-identity spot checks                                         */
/* ------------------------------------------------------------------ */

namespace {

std::vector<Rat> sortedCoefficients(const Identity &id) {
  std::vector<Rat> vals;
  for (const auto &[l, c] : id.entries) {
    (void)l;
    vals.push_back(c);
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

} // namespace

std::vector<Rat> spotcheckRule1Multiset() {
  // E[G_aa G_ab G_ac G_bb G_bc] expanded through the entry G_ac.
  Term start;
  start.dQ = 2;
  GreenProduct g;
  g.multiplyEntry({0, 0}, 1);
  g.multiplyEntry({0, 1}, 1);
  g.multiplyEntry({0, 2}, 1);
  g.multiplyEntry({1, 1}, 1);
  g.multiplyEntry({1, 2}, 1);
  start.factors = {g};
  start = canonicalize(start);
  TermContainer basis;
  std::map<std::string, long long> drops;
  Identity id = rule1(start, 0, {0, 2}, false, basis, drops);
  return sortedCoefficients(id);
}

std::vector<Rat> spotcheckRule3Multiset() {
  // Sum E[G_ab^2] expanded by Rule 3 through the index a.
  Term start;
  start.dQ = 2;
  GreenProduct g;
  g.multiplyEntry({0, 1}, 2);
  start.factors = {g};
  start = canonicalize(start);
  TermContainer basis;
  std::map<std::string, long long> drops;
  Identity id = rule3(start, 0, 0, basis, drops);
  return sortedCoefficients(id);
}

} // namespace gfc

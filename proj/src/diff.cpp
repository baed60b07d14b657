/*
 * Differentiation rules, cumulant expansion, and term classification.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/diff.hpp"

#include <algorithm>
#include <stdexcept>

namespace gfc {

std::string classificationName(Classification c) {
  switch (c) {
    case Classification::Leading: return "Leading";
    case Classification::TauG1_case1: return "TauG1-case1";
    case Classification::TauG1_case2: return "TauG1-case2";
    case Classification::TauG1_case3: return "TauG1-case3";
    case Classification::TauG1_case4: return "TauG1-case4";
    case Classification::TauG1_case5: return "TauG1-case5";
    case Classification::TauG2: return "TauG2";
    case Classification::TauF1_case1: return "TauF1-case1";
    case Classification::TauF1_case2: return "TauF1-case2";
    case Classification::TauF1_case3: return "TauF1-case3";
    case Classification::TauF1_case4: return "TauF1-case4";
    case Classification::TauF2: return "TauF2";
    case Classification::Negligible: return "Negligible";
  }
  return "?";
}

namespace {

// Base copy of t with one power of `p` removed from factor `fi` and the
// coefficient multiplied by the original power (product rule).
Term entryBase(const Term &t, std::size_t fi, IndexPair p, int pow) {
  Term r = t;
  r.coeff.mulScalar(Rat(pow));
  r.factors[fi].multiplyEntry(p, -1);
  return r;
}

void pushSubstitution(std::vector<Term> &out, const Term &base, std::size_t fi,
                      int i, int j, int a, int b, const Rat &scalar,
                      const Mono &mono, int deltaInc, bool addH,
                      IndexPair ab) {
  Term r = base;
  r.coeff.mulScalar(scalar);
  r.coeff.mulMono(mono);
  r.dDelta += deltaInc;
  if (addH) {
    r.hPre.push_back(ab);
    std::sort(r.hPre.begin(), r.hPre.end());
  }
  r.factors[fi].multiplyEntry(makePair(i, a));
  r.factors[fi].multiplyEntry(makePair(b, j));
  out.push_back(std::move(r));
}

// The 1/N Sum_u G_iu G_uj group: fresh index u, 1/N absorbed by the
// N^dN / N^#I normalization (dN unchanged, #I grows by one).
void pushFreshSum(std::vector<Term> &out, const Term &base, std::size_t fi,
                  int i, int j, const Rat &scalar, const Mono &mono,
                  int deltaInc, IndexPair ab) {
  Term r = base;
  // Fresh relative to everything still meaningful: the base indices may no
  // longer contain i, j (the differentiated entry was removed) or a, b.
  auto used = r.indexSet();
  used.insert({i, j, ab.first, ab.second});
  int u = 0;
  while (used.count(u)) ++u;
  r.coeff.mulScalar(scalar);
  r.coeff.mulMono(mono);
  r.dDelta += deltaInc;
  r.hPre.push_back(ab);
  std::sort(r.hPre.begin(), r.hPre.end());
  r.factors[fi].multiplyEntry(makePair(i, u));
  r.factors[fi].multiplyEntry(makePair(u, j));
  out.push_back(std::move(r));
}

// Appends a fresh Dim-factor and raises the F-derivative order by one.
Term fChainBase(const Term &t) {
  Term r = t;
  r.factors.push_back(GreenProduct{});
  return r;
}

} // namespace

std::vector<Term> diffTerm(const Term &t, IndexPair ab, DiffMode mode) {
  const int a = ab.first, b = ab.second;
  // a == b would need the delta-coincidence convention; the symbolic
  // pipelines always differentiate with two distinct index symbols.
  if (a == b) throw std::invalid_argument("diffTerm requires distinct indices");
  std::vector<Term> out;

  // d(h_ab^m)/dh_ab = m h_ab^{m-1}; only the h-derivative sees this.
  if (mode == DiffMode::FullH) {
    int m = static_cast<int>(std::count(t.hPre.begin(), t.hPre.end(), ab));
    if (m > 0) {
      Term r = t;
      r.hPre.erase(std::find(r.hPre.begin(), r.hPre.end(), ab));
      r.coeff.mulScalar(Rat(m));
      out.push_back(std::move(r));
    }
  }

  // Product rule over every Green entry in every Dim-factor (the derivative
  // commutes past Dim, so differentiating inside the factor is exact).
  for (std::size_t fi = 0; fi < t.factors.size(); ++fi) {
    for (const auto &[p, pow] : t.factors[fi].entries) {
      const int i = p.first, j = p.second;
      Term base = entryBase(t, fi, p, pow);
      switch (mode) {
        case DiffMode::FullH:
          // -(1-e^{-t})^{1/2} (G_ia G_bj + G_ib G_aj)
          pushSubstitution(out, base, fi, i, j, a, b, Rat(-1), monoS(1), 0, false, ab);
          pushSubstitution(out, base, fi, i, j, b, a, Rat(-1), monoS(1), 0, false, ab);
          // + (1-e^{-t})^{1/2} delta_ab G_ia G_bj
          pushSubstitution(out, base, fi, i, j, a, b, Rat(1), monoS(1), 1, false, ab);
          // + 4 (1-e^{-t}) h_ab (1/N) Sum_u G_iu G_uj
          pushFreshSum(out, base, fi, i, j, Rat(4), monoS(2), 0, ab);
          // - 2 (1-e^{-t}) delta_ab h_ab (1/N) Sum_u G_iu G_uj
          pushFreshSum(out, base, fi, i, j, Rat(-2), monoS(2), 1, ab);
          break;
        case DiffMode::GaussW:
          // -e^{-t/2} (G_ia G_bj + G_ib G_aj) + e^{-t/2} delta_ab G_ia G_bj
          pushSubstitution(out, base, fi, i, j, a, b, Rat(-1), monoU(1), 0, false, ab);
          pushSubstitution(out, base, fi, i, j, b, a, Rat(-1), monoU(1), 0, false, ab);
          pushSubstitution(out, base, fi, i, j, a, b, Rat(1), monoU(1), 1, false, ab);
          break;
        case DiffMode::LeadingOnly:
          pushSubstitution(out, base, fi, i, j, a, b, Rat(-1), Mono{}, 0, false, ab);
          pushSubstitution(out, base, fi, i, j, b, a, Rat(-1), Mono{}, 0, false, ab);
          break;
        case DiffMode::DOperator:
          pushSubstitution(out, base, fi, i, j, a, b, Rat(-1), Mono{}, 0, false, ab);
          pushSubstitution(out, base, fi, i, j, b, a, Rat(-1), Mono{}, 0, false, ab);
          pushSubstitution(out, base, fi, i, j, a, b, Rat(1), Mono{}, 1, false, ab);
          break;
      }
    }
  }

  // Chain rule through X(t): F^{(i0)} -> F^{(i0+1)} with the dX/dh (or
  // dX/dw) Dim-factor appended.
  if (t.withF && mode != DiffMode::DOperator) {
    Term base = fChainBase(t);
    std::size_t nf = base.factors.size() - 1;
    auto pushX = [&](const Rat &scalar, const Mono &mono, int deltaInc,
                     bool addH, IndexPair entry) {
      Term r = base;
      r.coeff.mulScalar(scalar);
      r.coeff.mulMono(mono);
      r.dDelta += deltaInc;
      if (addH) {
        r.hPre.push_back(ab);
        std::sort(r.hPre.begin(), r.hPre.end());
      }
      r.factors[nf].multiplyEntry(entry);
      out.push_back(std::move(r));
    };
    switch (mode) {
      case DiffMode::FullH: {
        // dX/dh_ab = -2 s Dim G_ab + s delta_ab Dim G_ab
        //            + 4 s^2 h_ab Dim G_vv - 2 s^2 delta_ab h_ab Dim G_vv
        pushX(Rat(-2), monoS(1), 0, false, ab);
        pushX(Rat(1), monoS(1), 1, false, ab);
        auto used = base.indexSet();
        used.insert({ab.first, ab.second});
        int v = 0;
        while (used.count(v)) ++v;
        pushX(Rat(4), monoS(2), 0, true, makePair(v, v));
        pushX(Rat(-2), monoS(2), 1, true, makePair(v, v));
        break;
      }
      case DiffMode::GaussW:
        // dX/dw_ab = -2 e^{-t/2} Dim G_ab + e^{-t/2} delta_ab Dim G_ab
        pushX(Rat(-2), monoU(1), 0, false, ab);
        pushX(Rat(1), monoU(1), 1, false, ab);
        break;
      case DiffMode::LeadingOnly:
        pushX(Rat(-2), Mono{}, 0, false, ab);
        break;
      case DiffMode::DOperator:
        break;
    }
  }

  return out;
}

std::vector<Term> cumulantExpand(const Term &t, IndexPair ab, int l) {
  if (l < 1) throw std::invalid_argument("cumulant order must be >= 1");
  auto it = std::find(t.hPre.begin(), t.hPre.end(), ab);
  if (it == t.hPre.end())
    throw std::invalid_argument("cumulantExpand: no h prefactor for this pair");
  Term f = t;
  f.hPre.erase(std::find(f.hPre.begin(), f.hPre.end(), ab));

  std::vector<Term> out;
  // E[h_ab f] = Sum_{k+1=2}^{l} kappa_{k+1}/(N q^{k-1}) E[d^k f / dh_ab^k];
  // kappa_1 = 0 kills the k = 0 term and kappa_2 = 1 is dimensionless.
  for (int k = 1; k + 1 <= l; ++k) {
    std::vector<Term> deriv = {f};
    for (int d = 0; d < k; ++d) {
      std::vector<Term> next;
      for (const auto &term : deriv) {
        auto ts = diffTerm(term, ab, DiffMode::FullH);
        next.insert(next.end(), ts.begin(), ts.end());
      }
      deriv = std::move(next);
    }
    for (Term &term : deriv) {
      term.dN -= 1; // the 1/N of the expansion formula
      term.dQ += k - 1;
      if (k + 1 >= 3) term.coeff.mulMono(monoKappa(k + 1));
      // (k+1)-th cumulant prefactor is kappa_{k+1} exactly; the (k-1)!-type
      // combinatorial factors are already in the c^{(k)} normalization.
      out.push_back(std::move(term));
    }
  }
  return out;
}

Classification classify(const Term &t, CaseCtx ctx) {
  if (t.edgeMarker)
    return ctx == CaseCtx::M ? Classification::TauG2 : Classification::TauF2;
  const bool ph = t.pH() > 0;
  const bool dd = t.dDelta > 0;
  const bool unmatched = !t.matched();

  if (!ph && !dd && t.dQ == 2 && t.dN == 1 && !unmatched)
    return Classification::Leading;
  if (t.dQ >= 14) return Classification::Negligible; // beyond l = 8 truncation

  if (ctx == CaseCtx::M) {
    if (t.dQ >= 4 && t.degree() >= 2) return Classification::TauG1_case1;
    if (ph) {
      // Case 2: an index v distinct from the h-pair indices occurring at
      // least twice among the off-diagonal entries.
      std::set<int> hIdx;
      for (const auto &p : t.hPre) {
        hIdx.insert(p.first);
        hIdx.insert(p.second);
      }
      for (const auto &[v, n] : t.offDiagOccurrences())
        if (!hIdx.count(v) && n >= 2) return Classification::TauG1_case2;
    }
    if (ph && t.dQ >= 1) return Classification::TauG1_case3;
    if (dd && t.dQ >= 1) return Classification::TauG1_case4;
    if (!ph && !dd && t.dQ >= 1 && unmatched) return Classification::TauG1_case5;
  } else {
    if (ph) return Classification::TauF1_case1;
    if (dd) return Classification::TauF1_case2;
    if (t.dQ >= 4) return Classification::TauF1_case3;
    if (unmatched) return Classification::TauF1_case4;
  }
  throw std::logic_error("classification error: no class fits term " +
                         termToLine(t));
}

} // namespace gfc

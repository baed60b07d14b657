/*
 * Term algebra implementation: coefficient polynomials, canonical forms,
 * the permutation-invariant auid key, exact equivalence, and the keyed
 * container of equivalence classes.
 *
 * SPDX-License-Identifier: MIT
 */
#include "gfc/term.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace gfc {

/* ------------------------------------------------------------------ */
/* Mono / CoeffPoly                                                    */
/* ------------------------------------------------------------------ */

Mono Mono::operator*(const Mono &o) const {
  Mono r = *this;
  r.uHalf += o.uHalf;
  r.sPow += o.sPow;
  for (const auto &[k, e] : o.kappa) {
    r.kappa[k] += e;
    if (r.kappa[k] == 0) r.kappa.erase(k);
  }
  return r;
}

std::string Mono::str() const {
  std::vector<std::string> parts;
  for (const auto &[k, e] : kappa) {
    std::string p = "k" + std::to_string(k);
    if (e != 1) p += "^" + std::to_string(e);
    parts.push_back(p);
  }
  if (uHalf != 0) {
    std::string p = "u";
    if (uHalf != 2) {
      if (uHalf % 2 == 0)
        p += "^" + std::to_string(uHalf / 2);
      else
        p += "^" + std::to_string(uHalf) + "/2";
    }
    parts.push_back(p);
  }
  if (sPow != 0) {
    std::string p = "s";
    if (sPow != 1) p += "^" + std::to_string(sPow);
    parts.push_back(p);
  }
  if (parts.empty()) return "1";
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += "*" + parts[i];
  return out;
}

CoeffPoly &CoeffPoly::operator+=(const CoeffPoly &o) {
  for (const auto &[m, c] : o.mono_) {
    auto it = mono_.find(m);
    if (it == mono_.end()) {
      mono_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == 0) mono_.erase(it);
    }
  }
  return *this;
}

CoeffPoly CoeffPoly::operator*(const CoeffPoly &o) const {
  CoeffPoly r;
  for (const auto &[m1, c1] : mono_)
    for (const auto &[m2, c2] : o.mono_) {
      Mono m = m1 * m2;
      Rat c = c1 * c2;
      auto it = r.mono_.find(m);
      if (it == r.mono_.end()) {
        if (c != 0) r.mono_.emplace(m, c);
      } else {
        it->second += c;
        if (it->second == 0) r.mono_.erase(it);
      }
    }
  return r;
}

CoeffPoly &CoeffPoly::operator*=(const CoeffPoly &o) {
  *this = *this * o;
  return *this;
}

CoeffPoly CoeffPoly::operator-() const {
  CoeffPoly r = *this;
  for (auto &[m, c] : r.mono_) c = -c;
  return r;
}

void CoeffPoly::mulScalar(const Rat &c) {
  if (c == 0) {
    mono_.clear();
    return;
  }
  for (auto &[m, v] : mono_) v *= c;
}

void CoeffPoly::mulMono(const Mono &m) {
  std::map<Mono, Rat> out;
  for (const auto &[m1, c] : mono_) out.emplace(m1 * m, c);
  mono_ = std::move(out);
}

std::optional<Rat> CoeffPoly::asScalarTimes(const Mono &m) const {
  if (mono_.empty()) return Rat(0);
  if (mono_.size() != 1) return std::nullopt;
  const auto &[mm, c] = *mono_.begin();
  if (!(mm == m)) return std::nullopt;
  return c;
}

std::string CoeffPoly::str() const {
  if (mono_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto &[m, c] : mono_) {
    if (!first) out << " + ";
    first = false;
    out << c.get_str();
    if (!(m == Mono{})) out << "*" << m.str();
  }
  return out.str();
}

Mono monoU(int halfPow) { return Mono{halfPow, 0, {}}; }
Mono monoS(int pow) { return Mono{0, pow, {}}; }
Mono monoKappa(int k, int e) {
  Mono m;
  if (e != 0) m.kappa[k] = e;
  return m;
}
Mono monoUS2() { return Mono{2, 2, {}}; }

/* ------------------------------------------------------------------ */
/* GreenProduct / Term basics                                          */
/* ------------------------------------------------------------------ */

int GreenProduct::entryCount() const {
  int n = 0;
  for (const auto &[p, pow] : entries) {
    (void)p;
    n += pow;
  }
  return n;
}

int GreenProduct::degree() const {
  int n = 0;
  for (const auto &[p, pow] : entries)
    if (p.first != p.second) n += pow;
  return n;
}

void GreenProduct::multiplyEntry(IndexPair p, int power) {
  if (power == 0) return;
  auto it = entries.find(p);
  if (it == entries.end()) {
    if (power < 0) throw std::logic_error("negative Green entry power");
    entries.emplace(p, power);
  } else {
    it->second += power;
    if (it->second == 0)
      entries.erase(it);
    else if (it->second < 0)
      throw std::logic_error("negative Green entry power");
  }
}

std::set<int> Term::indexSet() const {
  std::set<int> s;
  for (const auto &f : factors)
    for (const auto &[p, pow] : f.entries) {
      (void)pow;
      s.insert(p.first);
      s.insert(p.second);
    }
  for (const auto &p : hPre) {
    s.insert(p.first);
    s.insert(p.second);
  }
  return s;
}

int Term::degree() const {
  int d = 0;
  for (const auto &f : factors) d += f.degree();
  return d;
}

std::map<int, int> Term::occurrences() const {
  std::map<int, int> occ;
  for (const auto &f : factors)
    for (const auto &[p, pow] : f.entries) {
      occ[p.first] += pow;
      occ[p.second] += pow;
    }
  return occ;
}

std::map<int, int> Term::offDiagOccurrences() const {
  std::map<int, int> occ;
  for (const auto &f : factors)
    for (const auto &[p, pow] : f.entries)
      if (p.first != p.second) {
        occ[p.first] += pow;
        occ[p.second] += pow;
      }
  return occ;
}

bool Term::matched() const {
  for (const auto &[v, n] : occurrences())
    if (n % 2 != 0) {
      (void)v;
      return false;
    }
  return true;
}

bool Term::isType0() const {
  for (const auto &[v, n] : occurrences()) {
    (void)v;
    if (n != 2) return false;
  }
  return true;
}

static bool typeWithFours(const Term &t, int fours) {
  int count4 = 0;
  for (const auto &[v, n] : t.occurrences()) {
    (void)v;
    if (n == 4)
      ++count4;
    else if (n != 2)
      return false;
  }
  return count4 == fours;
}

bool Term::isTypeA() const { return typeWithFours(*this, 1); }
bool Term::isTypeAB() const { return typeWithFours(*this, 2); }

int Term::freshIndex() const {
  auto s = indexSet();
  int v = 0;
  while (s.count(v)) ++v;
  return v;
}

Term Term::relabeled(const std::map<int, int> &perm) const {
  auto mapIdx = [&perm](int v) {
    auto it = perm.find(v);
    return it == perm.end() ? v : it->second;
  };
  Term r = *this;
  r.factors.clear();
  for (const auto &f : factors) {
    GreenProduct g;
    for (const auto &[p, pow] : f.entries)
      g.multiplyEntry(makePair(mapIdx(p.first), mapIdx(p.second)), pow);
    r.factors.push_back(std::move(g));
  }
  r.hPre.clear();
  for (const auto &p : hPre)
    r.hPre.push_back(makePair(mapIdx(p.first), mapIdx(p.second)));
  std::sort(r.hPre.begin(), r.hPre.end());
  return r;
}

static void sortFactors(Term &t) {
  std::sort(t.factors.begin(), t.factors.end(),
            [](const GreenProduct &a, const GreenProduct &b) {
              int ca = a.entryCount(), cb = b.entryCount();
              if (ca != cb) return ca < cb;
              return a.entries < b.entries;
            });
}

std::string Term::shapeKey() const {
  std::ostringstream out;
  out << dDelta << (edgeMarker ? "E" : "e") << (withF ? "F" : "f") << "#";
  for (const auto &p : hPre) out << p.first << "," << p.second << ";";
  for (const auto &f : factors) {
    out << "[";
    for (const auto &[p, pow] : f.entries)
      out << p.first << "," << p.second << "^" << pow << ";";
    out << "]";
  }
  return out.str();
}

bool Term::operator==(const Term &o) const {
  return coeff == o.coeff && dN == o.dN && dQ == o.dQ && dDelta == o.dDelta &&
         hPre == o.hPre && edgeMarker == o.edgeMarker && withF == o.withF &&
         factors == o.factors;
}

/* ------------------------------------------------------------------ */
/* Canonicalization                                                    */
/* ------------------------------------------------------------------ */

namespace {

// Permutation-invariant per-index signature. Isomorphic indices must have
// equal signatures, so restricting bijections to signature classes loses
// nothing; the leading -occTotal forces higher-occurrence indices into
// smaller labels (the distinguished a, b of type-A/AB terms become 0, 1).
std::string indexSignature(const Term &t, int v) {
  int occ = 0, loops = 0, offd = 0, hocc = 0;
  std::vector<std::pair<int, int>> perFactor; // (n_i, occ in factor i)
  for (const auto &f : t.factors) {
    int focc = 0;
    for (const auto &[p, pow] : f.entries) {
      int c = (p.first == v) + (p.second == v);
      if (c == 0) continue;
      if (p.first == p.second) {
        occ += 2 * pow;
        focc += 2 * pow;
        loops += pow;
      } else {
        occ += c * pow;
        focc += c * pow;
        offd += c * pow;
      }
    }
    if (focc > 0) perFactor.emplace_back(f.entryCount(), focc);
  }
  for (const auto &p : t.hPre) hocc += (p.first == v) + (p.second == v);
  std::sort(perFactor.begin(), perFactor.end());
  std::ostringstream out;
  out << -(occ + hocc) << "|" << hocc << "|" << loops << "|" << offd << "|";
  for (const auto &[n, c] : perFactor) out << n << "," << c << ";";
  return out.str();
}

void validateTerm(const Term &t) {
  if (t.factors.empty()) throw std::invalid_argument("term has no Dim-factor");
  if (!t.withF && t.factors.size() != 1)
    throw std::invalid_argument("non-F term must have exactly one factor");
  for (const auto &f : t.factors)
    for (const auto &[p, pow] : f.entries) {
      (void)p;
      if (pow < 1) throw std::invalid_argument("non-positive entry power");
    }
}

// Enumerate all label assignments compatible with the signature classes;
// call fn(perm) for each.
template <typename Fn>
void forEachClassPermutation(const std::vector<std::vector<int>> &classes,
                             Fn &&fn) {
  std::vector<std::vector<int>> perms = classes; // mutated by next_permutation
  // Assign labels in class order: class 0 gets labels 0..|c0|-1, etc.
  std::vector<int> base(classes.size() + 1, 0);
  for (std::size_t i = 0; i < classes.size(); ++i)
    base[i + 1] = base[i] + static_cast<int>(classes[i].size());

  // Odometer over per-class permutations.
  for (auto &p : perms) std::sort(p.begin(), p.end());
  while (true) {
    std::map<int, int> perm;
    for (std::size_t i = 0; i < perms.size(); ++i)
      for (std::size_t j = 0; j < perms[i].size(); ++j)
        perm[perms[i][j]] = base[i] + static_cast<int>(j);
    fn(perm);
    // advance
    std::size_t i = 0;
    for (; i < perms.size(); ++i) {
      if (std::next_permutation(perms[i].begin(), perms[i].end())) break;
      // wrapped to sorted order; carry to next class
    }
    if (i == perms.size()) break;
  }
}

std::vector<std::vector<int>> signatureClasses(const Term &t) {
  std::map<std::string, std::vector<int>> bySig;
  for (int v : t.indexSet()) bySig[indexSignature(t, v)].push_back(v);
  // std::map orders by signature string; the -occ prefix sorts numerically
  // only within equal width, so order by a numeric-aware comparison.
  std::vector<std::pair<std::string, std::vector<int>>> cls(bySig.begin(),
                                                            bySig.end());
  std::sort(cls.begin(), cls.end(),
            [](const auto &a, const auto &b) {
              // Leading field is -(occ) as a decimal integer; parse it.
              long oa = std::stol(a.first.substr(0, a.first.find('|')));
              long ob = std::stol(b.first.substr(0, b.first.find('|')));
              if (oa != ob) return oa < ob;
              return a.first < b.first;
            });
  std::vector<std::vector<int>> out;
  for (auto &[sig, vs] : cls) {
    (void)sig;
    out.push_back(std::move(vs));
  }
  return out;
}

} // namespace

Term canonicalize(const Term &t) {
  validateTerm(t);
  auto classes = signatureClasses(t);

  Term best;
  std::string bestKey;
  bool have = false;
  forEachClassPermutation(classes, [&](const std::map<int, int> &perm) {
    Term cand = t.relabeled(perm);
    sortFactors(cand);
    std::string key = cand.shapeKey();
    if (!have || key < bestKey) {
      have = true;
      bestKey = std::move(key);
      best = std::move(cand);
    }
  });
  if (!have) { // no indices at all
    best = t;
    sortFactors(best);
  }
  return best;
}

/* ------------------------------------------------------------------ */
/* auid                                                                */
/* ------------------------------------------------------------------ */

CanonicalKey auid(const Term &t) {
  if (t.pH() != 0 || t.dDelta != 0)
    throw std::invalid_argument("auid requires p_h = d_delta = 0");
  auto idxSet = t.indexSet();
  std::vector<int> idx(idxSet.begin(), idxSet.end());
  CanonicalKey outer;
  for (int v1 : idx) {
    std::vector<std::vector<std::pair<int, int>>> mid;
    for (int v2 : idx) {
      std::vector<std::pair<int, int>> inner;
      IndexPair p = makePair(v1, v2);
      for (const auto &f : t.factors) {
        auto it = f.entries.find(p);
        inner.emplace_back(it == f.entries.end() ? 0 : it->second,
                           f.entryCount());
      }
      std::sort(inner.begin(), inner.end());
      mid.push_back(std::move(inner));
    }
    std::sort(mid.begin(), mid.end());
    outer.push_back(std::move(mid));
  }
  std::sort(outer.begin(), outer.end());
  return outer;
}

/* ------------------------------------------------------------------ */
/* Equivalence                                                         */
/* ------------------------------------------------------------------ */

namespace {

bool structuralPrecheck(const Term &t1, const Term &t2) {
  if (t1.withF != t2.withF || t1.fOrder() != t2.fOrder()) return false;
  if (t1.dN != t2.dN || t1.dQ != t2.dQ) return false;
  if (t1.edgeMarker != t2.edgeMarker) return false;
  if (!(t1.coeff == t2.coeff)) return false;
  if (t1.indexCount() != t2.indexCount()) return false;
  if (t1.degree() != t2.degree()) return false;
  return true;
}

// Same factor multiset after relabeling t1 by `perm`?
bool mappingWorks(const Term &t1, const Term &t2, const std::map<int, int> &perm) {
  Term r = t1.relabeled(perm);
  sortFactors(r);
  Term s = t2;
  sortFactors(s);
  return r.factors == s.factors && r.hPre == s.hPre;
}

bool backtrack(const std::vector<int> &idx1,
               const std::vector<std::vector<int>> &candidates, std::size_t k,
               std::map<int, int> &perm, std::set<int> &used, const Term &t1,
               const Term &t2) {
  if (k == idx1.size()) return mappingWorks(t1, t2, perm);
  for (int cand : candidates[k]) {
    if (used.count(cand)) continue;
    perm[idx1[k]] = cand;
    used.insert(cand);
    if (backtrack(idx1, candidates, k + 1, perm, used, t1, t2)) return true;
    used.erase(cand);
    perm.erase(idx1[k]);
  }
  return false;
}

} // namespace

bool equivalent(const Term &t1, const Term &t2) {
  if (t1.pH() != 0 || t2.pH() != 0 || t1.dDelta != 0 || t2.dDelta != 0)
    throw std::invalid_argument("equivalent requires p_h = d_delta = 0");
  if (!structuralPrecheck(t1, t2)) return false;
  if (auid(t1) != auid(t2)) return false;

  // Pruned backtracking: each index of t1 may only map to a t2 index with
  // the same occurrence signature (degree-sequence pruning).
  auto set1 = t1.indexSet(), set2 = t2.indexSet();
  std::vector<int> idx1(set1.begin(), set1.end());
  std::vector<int> idx2(set2.begin(), set2.end());
  std::vector<std::vector<int>> candidates;
  for (int v : idx1) {
    std::string sig = indexSignature(t1, v);
    std::vector<int> c;
    for (int w : idx2)
      if (indexSignature(t2, w) == sig) c.push_back(w);
    if (c.empty()) return false;
    candidates.push_back(std::move(c));
  }
  std::map<int, int> perm;
  std::set<int> used;
  return backtrack(idx1, candidates, 0, perm, used, t1, t2);
}

bool equivalentBruteForce(const Term &t1, const Term &t2) {
  if (!structuralPrecheck(t1, t2)) return false;
  auto set1 = t1.indexSet(), set2 = t2.indexSet();
  std::vector<int> idx1(set1.begin(), set1.end());
  std::vector<int> idx2(set2.begin(), set2.end());
  if (idx1.size() != idx2.size()) return false;
  std::sort(idx2.begin(), idx2.end());
  do {
    std::map<int, int> perm;
    for (std::size_t i = 0; i < idx1.size(); ++i) perm[idx1[i]] = idx2[i];
    if (mappingWorks(t1, t2, perm)) return true;
  } while (std::next_permutation(idx2.begin(), idx2.end()));
  return false;
}

/* ------------------------------------------------------------------ */
/* TermContainer                                                       */
/* ------------------------------------------------------------------ */

TermContainer::BucketKey TermContainer::bucketKey(const Term &t) {
  return BucketKey{t.dN, t.dQ, t.fOrder(), t.withF, auid(t)};
}

int TermContainer::insert(const Term &t) {
  BucketKey key = bucketKey(t);
  auto &bucket = buckets_[key];
  for (int id : bucket)
    if (equivalent(reps_[id], t)) return id;
  int id = static_cast<int>(reps_.size());
  reps_.push_back(t);
  bucket.push_back(id);
  return id;
}

std::optional<int> TermContainer::find(const Term &t) const {
  auto it = buckets_.find(bucketKey(t));
  if (it == buckets_.end()) return std::nullopt;
  for (int id : it->second)
    if (equivalent(reps_[id], t)) return id;
  return std::nullopt;
}

/* ------------------------------------------------------------------ */
/* Serialization                                                       */
/* ------------------------------------------------------------------ */

std::string termToLine(const Term &t) {
  std::ostringstream out;
  out << t.coeff.str() << " | " << t.dN << " | " << t.dQ << " | [";
  for (std::size_t i = 0; i < t.hPre.size(); ++i) {
    if (i) out << ",";
    out << "(" << t.hPre[i].first << "," << t.hPre[i].second << ")";
  }
  out << "] | F^(" << t.fOrder() << ") |";
  for (const auto &f : t.factors) {
    out << " {";
    bool first = true;
    for (const auto &[p, pow] : f.entries) {
      if (!first) out << ", ";
      first = false;
      out << "(" << p.first << "," << p.second << ")";
      if (pow != 1) out << "^" << pow;
    }
    out << "}";
  }
  if (t.dDelta > 0) out << " [delta^" << t.dDelta << "]";
  if (t.edgeMarker) out << " [edge]";
  return out.str();
}

std::string termToJson(const Term &t) {
  nlohmann::json j;
  j["F_derivative"] = t.fOrder();
  j["q_deg"] = t.dQ;
  j["N_deg"] = t.dN;
  j["coeff"] = t.coeff.str();
  j["d_delta"] = t.dDelta;
  nlohmann::json hs = nlohmann::json::array();
  for (const auto &p : t.hPre) hs.push_back({p.first, p.second});
  j["h_list"] = hs;
  nlohmann::json fs = nlohmann::json::array();
  for (const auto &f : t.factors) {
    nlohmann::json fj = nlohmann::json::array();
    for (const auto &[p, pow] : f.entries)
      fj.push_back({p.first, p.second, pow});
    fs.push_back(fj);
  }
  j["prod_dict"] = fs;
  return j.dump();
}

} // namespace gfc

#pragma once

// Exact c2 of classical knots: Gauss-diagram arrow count and half the second
// derivative of the normalized Alexander polynomial at 1.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "knotmu/error.hpp"

namespace knotmu {

// ---------------------------------------------------------------------------
// Laurent polynomials over the integers

struct LaurentPoly {
  int low = 0;                  // exponent of coeffs[0]
  std::vector<long long> coeffs;  // no leading or trailing zeros; empty is 0

  LaurentPoly() = default;
  LaurentPoly(long long c) {  // NOLINT: constants convert implicitly
    if (c) coeffs = {c};
  }
  static LaurentPoly monomial(long long c, int e) {
    LaurentPoly p(c);
    p.low = c ? e : 0;
    return p;
  }
  /// From {exponent: coefficient}.
  static LaurentPoly from_terms(const std::map<int, long long>& terms) {
    LaurentPoly p;
    if (terms.empty()) return p;
    p.low = terms.begin()->first;
    p.coeffs.assign(terms.rbegin()->first - p.low + 1, 0);
    for (auto [e, c] : terms) p.coeffs[e - p.low] += c;
    p.trim();
    return p;
  }

  bool is_zero() const { return coeffs.empty(); }
  int high() const { return low + static_cast<int>(coeffs.size()) - 1; }
  long long at(int e) const { return e < low || e > high() ? 0 : coeffs[e - low]; }
  long long eval_at_one() const { return std::accumulate(coeffs.begin(), coeffs.end(), 0LL); }

  void trim() {
    std::size_t a = 0, b = coeffs.size();
    while (a < b && coeffs[a] == 0) ++a;
    while (b > a && coeffs[b - 1] == 0) --b;
    if (a == b) {
      coeffs.clear();
      low = 0;
      return;
    }
    coeffs = std::vector<long long>(coeffs.begin() + a, coeffs.begin() + b);
    low += static_cast<int>(a);
  }

  friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
    return a.coeffs == b.coeffs && (a.coeffs.empty() || a.low == b.low);
  }

  friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    LaurentPoly r;
    r.low = std::min(a.low, b.low);
    r.coeffs.assign(std::max(a.high(), b.high()) - r.low + 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) r.coeffs[a.low - r.low + i] += a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) r.coeffs[b.low - r.low + i] += b.coeffs[i];
    r.trim();
    return r;
  }
  friend LaurentPoly operator-(const LaurentPoly& a) {
    LaurentPoly r = a;
    for (auto& c : r.coeffs) c = -c;
    return r;
  }
  friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return a + (-b); }
  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    LaurentPoly r;
    r.low = a.low + b.low;
    r.coeffs.assign(a.coeffs.size() + b.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs.size(); ++j) r.coeffs[i + j] += a.coeffs[i] * b.coeffs[j];
    r.trim();
    return r;
  }

  /// Exact quotient; throws DomainError when b does not divide a over Z[t, 1/t].
  friend LaurentPoly exact_div(const LaurentPoly& a, const LaurentPoly& b) {
    if (b.is_zero()) throw DomainError("division by the zero polynomial");
    if (a.is_zero()) return {};
    std::vector<long long> rem = a.coeffs;  // ordinary polynomials after stripping t^low
    const std::vector<long long>& den = b.coeffs;
    if (rem.size() < den.size()) throw DomainError("inexact polynomial division");
    std::vector<long long> q(rem.size() - den.size() + 1, 0);
    for (std::size_t k = q.size(); k-- > 0;) {
      const long long top = rem[k + den.size() - 1];
      if (top % den.back() != 0) throw DomainError("inexact polynomial division");
      q[k] = top / den.back();
      for (std::size_t j = 0; j < den.size(); ++j) rem[k + j] -= q[k] * den[j];
    }
    for (long long r : rem)
      if (r != 0) throw DomainError("inexact polynomial division");
    LaurentPoly out;
    out.low = a.low - b.low;
    out.coeffs = std::move(q);
    out.trim();
    return out;
  }
};

/// Human-readable form, highest exponent first: "t - 1 + t^-1".
inline std::string to_string(const LaurentPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int e = p.high(); e >= p.low; --e) {
    const long long c = p.at(e);
    if (!c) continue;
    const long long m = c < 0 ? -c : c;
    if (out.empty()) out += c < 0 ? "-" : "";
    else out += c < 0 ? " - " : " + ";
    if (m != 1 || e == 0) out += std::to_string(m);
    if (e != 0) out += e == 1 ? "t" : "t^" + std::to_string(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Planar diagram codes

/// One crossing: a is the incoming under edge, c the outgoing under edge and
/// b, d the over edges, counterclockwise from a. sign is +1 or -1.
struct PDCrossing {
  int a = 0, b = 0, c = 0, d = 0;
  int sign = 1;
};

struct PDCode {
  std::vector<PDCrossing> crossings;
};

namespace detail {

inline std::string strip_comment(std::string line) {
  if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
  return line;
}

inline int parse_sign(const std::string& s, const std::string& where) {
  if (s == "+" || s == "+1" || s == "1") return 1;
  if (s == "-" || s == "-1") return -1;
  throw ParseError(where + ": sign must be + or -, got '" + s + "'");
}

struct UnionFind {
  std::map<int, int> parent;
  int find(int x) {
    auto it = parent.find(x);
    if (it == parent.end()) return parent[x] = x;
    if (it->second == x) return x;
    return it->second = find(it->second);
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// One crossing per line: "a b c d s" with s in {+, -}. Blank lines and
/// '#' comments are ignored.
inline PDCode parse_pd(std::string_view text) {
  PDCode pd;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    std::istringstream ls(detail::strip_comment(line));
    PDCrossing x;
    std::string sign;
    if (!(ls >> x.a)) continue;
    const std::string where = "line " + std::to_string(n);
    if (!(ls >> x.b >> x.c >> x.d >> sign)) throw ParseError(where + ": expected 'a b c d sign'");
    std::string extra;
    if (ls >> extra) throw ParseError(where + ": trailing text '" + extra + "'");
    x.sign = detail::parse_sign(sign, where);
    pd.crossings.push_back(x);
  }
  std::map<int, int> seen;
  for (const auto& x : pd.crossings)
    for (int l : {x.a, x.b, x.c, x.d}) ++seen[l];
  for (auto [l, k] : seen)
    if (k != 2) throw ParseError("edge label " + std::to_string(l) + " occurs " + std::to_string(k) + " times");
  return pd;
}

inline std::string serialize_pd(const PDCode& pd) {
  std::string out;
  for (const auto& x : pd.crossings)
    out += std::to_string(x.a) + " " + std::to_string(x.b) + " " + std::to_string(x.c) + " " + std::to_string(x.d) +
           (x.sign > 0 ? " +\n" : " -\n");
  return out;
}

inline int pd_components(const PDCode& pd) {
  detail::UnionFind uf;
  for (const auto& x : pd.crossings) {
    uf.unite(x.a, x.c);
    uf.unite(x.b, x.d);
  }
  std::set<int> roots;
  for (const auto& x : pd.crossings) roots.insert(uf.find(x.a));
  return pd.crossings.empty() ? 1 : static_cast<int>(roots.size());
}

namespace detail {

inline LaurentPoly bareiss_det(std::vector<std::vector<LaurentPoly>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  LaurentPoly prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t r = k + 1;
      while (r < n && m[r][k].is_zero()) ++r;
      if (r == n) return {};
      std::swap(m[k], m[r]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = exact_div(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
    prev = m[k][k];
  }
  return sign > 0 ? m[n - 1][n - 1] : -m[n - 1][n - 1];
}

}  // namespace detail

/// Multiplies by a unit +-t^k so the result is symmetric with value 1 at t = 1.
inline LaurentPoly normalize_alexander(LaurentPoly p) {
  if (p.is_zero()) throw NormalizationError("zero polynomial has no normalized form");
  const int span = p.high() - p.low;
  if (span % 2 != 0) throw NormalizationError("odd degree span: " + to_string(p));
  p.low = -span / 2;
  if (p.eval_at_one() < 0) p = -p;
  if (p.eval_at_one() != 1) throw NormalizationError("value at 1 is " + std::to_string(p.eval_at_one()));
  for (int e = 1; e <= p.high(); ++e)
    if (p.at(e) != p.at(-e)) throw NormalizationError("not symmetric: " + to_string(p));
  return p;
}

/// Alexander polynomial from the Wirtinger presentation: Fox derivatives of
/// one relation per crossing, last row and column struck, exact Bareiss
/// determinant, then normalized.
inline LaurentPoly alexander_polynomial(const PDCode& pd) {
  if (pd_components(pd) != 1) throw UnsupportedInput("PD code describes a link, not a knot");
  const std::size_t n = pd.crossings.size();
  if (n == 0) return 1;
  detail::UnionFind uf;
  for (const auto& x : pd.crossings) {
    uf.find(x.a);
    uf.find(x.c);
    uf.unite(x.b, x.d);
  }
  std::map<int, std::size_t> arc;
  for (const auto& x : pd.crossings)
    for (int l : {x.a, x.b, x.c, x.d}) arc.emplace(uf.find(l), arc.size());
  if (arc.size() != n) throw StructuralError("PD code does not have one arc per crossing");
  const LaurentPoly t = LaurentPoly::monomial(1, 1);
  std::vector<std::vector<LaurentPoly>> m(n, std::vector<LaurentPoly>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& x = pd.crossings[r];
    const std::size_t k = arc.at(uf.find(x.b)), i = arc.at(uf.find(x.a)), j = arc.at(uf.find(x.c));
    // Positive: x_j = x_k x_i x_k^-1. Negative: x_j = x_k^-1 x_i x_k, scaled by t.
    if (x.sign > 0) {
      m[r][k] = m[r][k] + (1 - t);
      m[r][i] = m[r][i] + t;
      m[r][j] = m[r][j] - 1;
    } else {
      m[r][k] = m[r][k] + (t - 1);
      m[r][i] = m[r][i] + 1;
      m[r][j] = m[r][j] - t;
    }
  }
  m.pop_back();
  for (auto& row : m) row.pop_back();
  return normalize_alexander(detail::bareiss_det(std::move(m)));
}

/// Half the second derivative at 1; for a symmetric polynomial this is
/// sum(c_k k^2) / 2.
inline long long c2_alexander(const LaurentPoly& delta) {
  const LaurentPoly p = normalize_alexander(delta);
  long long twice = 0;
  for (int e = p.low; e <= p.high(); ++e) twice += p.at(e) * static_cast<long long>(e) * (e - 1);
  if (twice % 2 != 0) throw NormalizationError("second derivative at 1 is odd");
  return twice / 2;
}

// ---------------------------------------------------------------------------
// Gauss diagrams

/// A chord joins the over passage (position `over`) and the under passage
/// (position `under`) of one crossing on the based circle.
struct GaussChord {
  int over = 0;
  int under = 0;
  int sign = 1;
};

struct GaussDiagram {
  std::vector<GaussChord> chords;
  std::size_t n() const { return chords.size(); }

  void check() const {
    std::vector<int> hits(2 * n(), 0);
    for (const auto& c : chords) {
      for (int p : {c.over, c.under}) {
        if (p < 0 || p >= static_cast<int>(2 * n())) throw StructuralError("chord endpoint out of range");
        ++hits[p];
      }
      if (c.sign != 1 && c.sign != -1) throw StructuralError("chord sign must be +1 or -1");
    }
    for (int h : hits)
      if (h != 1) throw StructuralError("chord endpoints are not a permutation of 0..2n-1");
  }
};

/// "n; o1 u1 s1; o2 u2 s2; ..." with s in {+, -}; whitespace and newlines
/// are free, '#' starts a comment.
inline GaussDiagram parse_gauss(std::string_view text) {
  std::string flat;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) flat += detail::strip_comment(line) + " ";
  std::vector<std::string> parts;
  std::stringstream ss(flat);
  for (std::string part; std::getline(ss, part, ';');) parts.push_back(part);
  while (!parts.empty() && parts.back().find_first_not_of(" \t\r") == std::string::npos) parts.pop_back();
  if (parts.empty()) throw ParseError("missing chord count");
  GaussDiagram gd;
  int n = 0;
  {
    std::istringstream hs(parts[0]);
    if (!(hs >> n) || n < 0) throw ParseError("chord count must be a non-negative integer");
  }
  if (static_cast<int>(parts.size()) - 1 != n)
    throw ParseError("expected " + std::to_string(n) + " chords, found " + std::to_string(parts.size() - 1));
  for (int i = 1; i <= n; ++i) {
    std::istringstream cs(parts[i]);
    GaussChord c;
    std::string sign;
    if (!(cs >> c.over >> c.under >> sign)) throw ParseError("chord " + std::to_string(i) + ": expected 'over under sign'");
    c.sign = detail::parse_sign(sign, "chord " + std::to_string(i));
    gd.chords.push_back(c);
  }
  try {
    gd.check();
  } catch (const StructuralError& e) {
    throw ParseError(e.what());
  }
  return gd;
}

inline std::string serialize_gauss(const GaussDiagram& gd) {
  std::string out = std::to_string(gd.n()) + ";";
  for (const auto& c : gd.chords)
    out += "\n" + std::to_string(c.over) + " " + std::to_string(c.under) + (c.sign > 0 ? " +;" : " -;");
  return out + "\n";
}

/// Sum of sign products over chord pairs met from the base point as
/// over(x), under(y), under(x), over(y).
inline long long c2_gauss(const GaussDiagram& gd) {
  gd.check();
  long long total = 0;
  for (const auto& x : gd.chords)
    for (const auto& y : gd.chords)
      if (x.over < y.under && y.under < x.under && x.under < y.over) total += x.sign * y.sign;
  return total;
}

/// Moves the base point forward by k positions.
inline GaussDiagram rebase(const GaussDiagram& gd, int k) {
  const int m = static_cast<int>(2 * gd.n());
  GaussDiagram out = gd;
  if (m == 0) return out;
  for (auto& c : out.chords) {
    c.over = ((c.over - k) % m + m) % m;
    c.under = ((c.under - k) % m + m) % m;
  }
  return out;
}

/// Based connected sum: the second diagram follows the first.
inline GaussDiagram gauss_connect(const GaussDiagram& a, const GaussDiagram& b) {
  GaussDiagram out = a;
  const int shift = static_cast<int>(2 * a.n());
  for (auto c : b.chords) {
    c.over += shift;
    c.under += shift;
    out.chords.push_back(c);
  }
  return out;
}

namespace detail {

inline void open_gap(GaussDiagram& gd, int pos, int width) {
  for (auto& c : gd.chords) {
    if (c.over >= pos) c.over += width;
    if (c.under >= pos) c.under += width;
  }
}

}  // namespace detail

/// Reidemeister I: an isolated chord at position pos.
inline GaussDiagram add_kink(const GaussDiagram& gd, int pos, int sign, bool over_first = true) {
  GaussDiagram out = gd;
  detail::open_gap(out, pos, 2);
  out.chords.push_back(over_first ? GaussChord{pos, pos + 1, sign} : GaussChord{pos + 1, pos, sign});
  return out;
}

/// Reidemeister II: the strand at position p and the strand at q (p < q)
/// cross twice with opposite signs. `reversed` flips the order of the two
/// passages on the second strand (antiparallel strands); `first_over` puts
/// the first strand on top.
inline GaussDiagram add_bigon(const GaussDiagram& gd, int p, int q, bool reversed = false, bool first_over = true) {
  if (p >= q) throw DomainError("add_bigon expects p < q");
  GaussDiagram out = gd;
  detail::open_gap(out, q, 2);
  detail::open_gap(out, p, 2);
  const int q2 = q + 2;
  const int x2 = reversed ? q2 + 1 : q2, y2 = reversed ? q2 : q2 + 1;
  auto chord = [&](int a, int b, int sign) { return first_over ? GaussChord{a, b, sign} : GaussChord{b, a, sign}; };
  out.chords.push_back(chord(p, x2, 1));
  out.chords.push_back(chord(p + 1, y2, -1));
  return out;
}

}  // namespace knotmu

#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "lagfib/scalar.hpp"

namespace lagfib {

/// Sparse multivariate polynomial over K (exact Gaussian rationals or
/// complex doubles). Terms map exponent vectors to nonzero coefficients;
/// the map ordering makes iteration, printing and hashing deterministic.
template <class K>
class MVPoly {
 public:
  using exponents = std::vector<unsigned>;

  explicit MVPoly(int nvars) : nvars_(nvars) {
    if (nvars <= 0) throw std::invalid_argument("MVPoly: nvars must be positive");
  }

  static MVPoly constant(int nvars, const K& c) {
    MVPoly p(nvars);
    p.add_term(exponents(nvars, 0), c);
    return p;
  }

  /// The monomial z_i (0-based variable index).
  static MVPoly variable(int nvars, int i) {
    MVPoly p(nvars);
    exponents e(nvars, 0);
    p.check_var(i);
    e[i] = 1;
    p.add_term(e, scalar_traits<K>::one());
    return p;
  }

  static MVPoly monomial(int nvars, exponents e, const K& c) {
    MVPoly p(nvars);
    p.add_term(e, c);
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }

  int total_degree() const {
    int d = 0;
    for (const auto& [e, c] : terms_) {
      int s = 0;
      for (unsigned x : e) s += static_cast<int>(x);
      d = std::max(d, s);
    }
    return d;
  }

  const std::map<exponents, K>& terms() const { return terms_; }

  void add_term(const exponents& e, const K& c) {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("MVPoly: exponent vector length mismatch");
    if (scalar_traits<K>::is_zero(c)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (scalar_traits<K>::is_zero(it->second)) terms_.erase(it);
    }
  }

  K coefficient(const exponents& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? scalar_traits<K>::zero() : it->second;
  }

  MVPoly& operator+=(const MVPoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MVPoly& operator-=(const MVPoly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }
  MVPoly& operator*=(const K& s) {
    if (scalar_traits<K>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend MVPoly operator+(MVPoly a, const MVPoly& b) { return a += b; }
  friend MVPoly operator-(MVPoly a, const MVPoly& b) { return a -= b; }
  friend MVPoly operator*(MVPoly a, const K& s) { return a *= s; }
  friend MVPoly operator*(const K& s, MVPoly a) { return a *= s; }
  MVPoly operator-() const {
    MVPoly r(nvars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
  }

  friend MVPoly operator*(const MVPoly& a, const MVPoly& b) {
    a.check_same(b);
    MVPoly r(a.nvars_);
    exponents e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
        r.add_term(e, K(ca * cb));
      }
    }
    return r;
  }

  /// Formal partial derivative with respect to variable i (0-based).
  MVPoly diff(int i) const {
    check_var(i);
    MVPoly r(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[i] == 0) continue;
      exponents e2 = e;
      e2[i] -= 1;
      r.add_term(e2, K(c * scalar_traits<K>::from_int(static_cast<long>(e[i]))));
    }
    return r;
  }

  K eval(const std::vector<K>& z) const {
    if (static_cast<int>(z.size()) != nvars_)
      throw std::invalid_argument("MVPoly::eval: point dimension mismatch");
    // power tables per variable
    std::vector<unsigned> maxe(nvars_, 0);
    for (const auto& [e, c] : terms_)
      for (int i = 0; i < nvars_; ++i) maxe[i] = std::max(maxe[i], e[i]);
    std::vector<std::vector<K>> pow(nvars_);
    for (int i = 0; i < nvars_; ++i) {
      pow[i].reserve(maxe[i] + 1);
      pow[i].push_back(scalar_traits<K>::one());
      for (unsigned k = 1; k <= maxe[i]; ++k) pow[i].push_back(K(pow[i].back() * z[i]));
    }
    K acc = scalar_traits<K>::zero();
    for (const auto& [e, c] : terms_) {
      K t = c;
      for (int i = 0; i < nvars_; ++i)
        if (e[i] > 0) t *= pow[i][e[i]];
      acc += t;
    }
    return acc;
  }

  friend bool operator==(const MVPoly& a, const MVPoly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  void check_same(const MVPoly& o) const {
    if (nvars_ != o.nvars_) throw std::invalid_argument("MVPoly: variable count mismatch");
  }
  void check_var(int i) const {
    if (i < 0 || i >= nvars_) throw std::out_of_range("MVPoly: variable index out of range");
  }

  int nvars_;
  std::map<exponents, K> terms_;
};

}  // namespace lagfib

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lagfib/betti.hpp"
#include "lagfib/elliptic.hpp"
#include "lagfib/errors.hpp"

namespace lagfib {

using nlohmann::json;

/// Deterministic JSON emitter: keys appear in call order and every float is
/// printed with 17 significant digits, so identical runs produce
/// byte-identical report files.
class JsonWriter {
 public:
  JsonWriter& begin_object() {
    separate();
    out_ += '{';
    stack_.push_back('}');
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_object() { return close('}'); }
  JsonWriter& begin_array() {
    separate();
    out_ += '[';
    stack_.push_back(']');
    fresh_ = true;
    return *this;
  }
  JsonWriter& end_array() { return close(']'); }

  JsonWriter& key(const std::string& k) {
    separate();
    append_string(k);
    out_ += ':';
    pending_value_ = true;
    return *this;
  }

  JsonWriter& value(double x) {
    separate();
    if (!std::isfinite(x)) {
      out_ += "null";
      return *this;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out_ += buf;
    return *this;
  }
  JsonWriter& value(long x) {
    separate();
    out_ += std::to_string(x);
    return *this;
  }
  JsonWriter& value(int x) { return value(static_cast<long>(x)); }
  JsonWriter& value(bool b) {
    separate();
    out_ += b ? "true" : "false";
    return *this;
  }
  JsonWriter& value(const std::string& s) {
    separate();
    append_string(s);
    return *this;
  }
  JsonWriter& value(const char* s) { return value(std::string(s)); }
  JsonWriter& null() {
    separate();
    out_ += "null";
    return *this;
  }

  const std::string& str() const { return out_; }

 private:
  JsonWriter& close(char c) {
    out_ += c;
    stack_.pop_back();
    fresh_ = false;
    return *this;
  }
  void separate() {
    if (pending_value_) {
      pending_value_ = false;
      return;
    }
    if (!stack_.empty() && !fresh_) out_ += ',';
    fresh_ = false;
  }
  void append_string(const std::string& s) {
    out_ += '"';
    for (char c : s) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\r': out_ += "\\r"; break;
        case '\t': out_ += "\\t"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "\\u%04x", c);
            out_ += buf;
          } else {
            out_ += c;
          }
      }
    }
    out_ += '"';
  }

  std::string out_;
  std::vector<char> stack_;
  bool fresh_ = true;
  bool pending_value_ = false;
};

// ---------------------------------------------------------------------------
// Parsing. Exact mode encodes coefficients as rational strings "p/q"; float
// mode as JSON numbers. Mixed encodings are rejected.

namespace io_detail {

template <class K>
K scalar_from_json(const json& re, const json& im) {
  if constexpr (scalar_traits<K>::is_exact) {
    if (!re.is_string() || !im.is_string())
      throw parse_error("exact mode requires rational string coefficients (\"p/q\")");
    try {
      return GaussianRational(rational_from_string(re.get<std::string>()),
                              rational_from_string(im.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      throw parse_error(e.what());
    }
  } else {
    if (!re.is_number() || !im.is_number())
      throw parse_error("float mode requires numeric coefficients");
    return Complex(re.get<double>(), im.get<double>());
  }
}

inline const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw parse_error(std::string("missing field \"") + name + "\"");
  return *it;
}

}  // namespace io_detail

template <class K>
MVPoly<K> mvpoly_from_json(const json& j) {
  if (!j.is_object()) throw parse_error("polynomial must be an object");
  const json& jn = io_detail::field(j, "nvars");
  if (!jn.is_number_integer() || jn.get<int>() <= 0) throw parse_error("nvars must be a positive integer");
  int nvars = jn.get<int>();
  MVPoly<K> p(nvars);
  const json& terms = io_detail::field(j, "terms");
  if (!terms.is_array()) throw parse_error("terms must be an array");
  for (const json& t : terms) {
    const json& je = io_detail::field(t, "exp");
    if (!je.is_array() || static_cast<int>(je.size()) != nvars)
      throw parse_error("exp must be an array of length nvars");
    std::vector<unsigned> e(nvars);
    for (int i = 0; i < nvars; ++i) {
      if (!je[i].is_number_integer() || je[i].get<long>() < 0)
        throw parse_error("exponents must be nonnegative integers");
      e[i] = je[i].get<unsigned>();
    }
    p.add_term(e, io_detail::scalar_from_json<K>(io_detail::field(t, "re"), io_detail::field(t, "im")));
  }
  return p;
}

template <class K>
void write_mvpoly(JsonWriter& w, const MVPoly<K>& p) {
  w.begin_object();
  w.key("nvars").value(p.nvars());
  w.key("terms").begin_array();
  for (const auto& [e, c] : p.terms()) {
    w.begin_object();
    w.key("exp").begin_array();
    for (unsigned x : e) w.value(static_cast<long>(x));
    w.end_array();
    if constexpr (scalar_traits<K>::is_exact) {
      w.key("re").value(to_string(c.re));
      w.key("im").value(to_string(c.im));
    } else {
      w.key("re").value(c.real());
      w.key("im").value(c.imag());
    }
    w.end_object();
  }
  w.end_array();
  w.end_object();
}

template <class K>
Potential<K> potential_from_json(const json& j) {
  const json& jn = io_detail::field(j, "n");
  if (!jn.is_number_integer() || jn.get<int>() <= 0) throw parse_error("potential n must be a positive integer");
  MVPoly<K> g = mvpoly_from_json<K>(io_detail::field(j, "g"));
  if (g.nvars() != jn.get<int>()) throw parse_error("potential g must have n variables");
  return Potential<K>(jn.get<int>(), std::move(g));
}

template <class K>
Section<K> section_from_json(const json& j) {
  return Section<K>{mvpoly_from_json<K>(io_detail::field(j, "f"))};
}

inline Box box_from_json(const json& j) {
  const json& lo = io_detail::field(j, "lo");
  const json& hi = io_detail::field(j, "hi");
  if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty())
    throw parse_error("box lo/hi must be equal-length nonempty arrays");
  Box b;
  for (size_t i = 0; i < lo.size(); ++i) {
    if (!lo[i].is_number() || !hi[i].is_number()) throw parse_error("box bounds must be numbers");
    b.lo.push_back(lo[i].get<double>());
    b.hi.push_back(hi[i].get<double>());
  }
  b.validate();
  return b;
}

/// CubicForm from {"n": n, "entries": [{"ijk": [i,j,k] (1-based), "re": .., "im": ..}]};
/// each entry is symmetrized onto all index permutations. Listing the same
/// unordered triple twice is rejected.
template <class K>
CubicForm<K> cubic_from_json(const json& j) {
  const json& jn = io_detail::field(j, "n");
  if (!jn.is_number_integer() || jn.get<int>() <= 0) throw parse_error("cubic n must be a positive integer");
  int n = jn.get<int>();
  CubicForm<K> c(n);
  std::set<std::array<int, 3>> seen;
  const json& entries = io_detail::field(j, "entries");
  if (!entries.is_array()) throw parse_error("entries must be an array");
  for (const json& t : entries) {
    const json& ijk = io_detail::field(t, "ijk");
    if (!ijk.is_array() || ijk.size() != 3) throw parse_error("ijk must be an array of three indices");
    std::array<int, 3> idx{};
    for (int a = 0; a < 3; ++a) {
      if (!ijk[a].is_number_integer()) throw parse_error("ijk entries must be integers");
      idx[a] = ijk[a].get<int>() - 1;
      if (idx[a] < 0 || idx[a] >= n) throw parse_error("ijk index out of range (1-based)");
    }
    std::array<int, 3> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (!seen.insert(sorted).second) throw parse_error("duplicate cubic entry for an index triple");
    c.set_sym(idx[0], idx[1], idx[2],
              io_detail::scalar_from_json<K>(io_detail::field(t, "re"), io_detail::field(t, "im")));
  }
  return c;
}

inline EllipticFamily elliptic_family_from_json(const json& j) {
  MVPoly<Complex> tau = mvpoly_from_json<Complex>(io_detail::field(j, "tau"));
  MVPoly<Complex> s = mvpoly_from_json<Complex>(io_detail::field(j, "s"));
  Box box = box_from_json(io_detail::field(j, "box"));
  return make_elliptic_family(std::move(tau), std::move(s), std::move(box));
}

inline MonodromyProblem monodromy_from_json(const json& j) {
  const json& gens = io_detail::field(j, "generators");
  if (!gens.is_array() || gens.empty()) throw parse_error("generators must be a nonempty array");
  std::vector<DenseMatrix<Rational>> ms;
  for (const json& g : gens) {
    if (!g.is_array() || g.empty()) throw parse_error("generator must be a matrix (array of rows)");
    int d = static_cast<int>(g.size());
    DenseMatrix<Rational> m(d, d);
    for (int i = 0; i < d; ++i) {
      if (!g[i].is_array() || static_cast<int>(g[i].size()) != d)
        throw parse_error("generator rows must all have the matrix dimension");
      for (int k = 0; k < d; ++k) {
        const json& e = g[i][k];
        if (e.is_number_integer())
          m(i, k) = Rational(e.get<long>());
        else if (e.is_string())
          m(i, k) = rational_from_string(e.get<std::string>());
        else
          throw parse_error("generator entries must be integers or rational strings");
      }
    }
    ms.push_back(std::move(m));
  }
  return make_monodromy_problem(std::move(ms));
}

namespace io_detail {

inline bool find_re_encoding(const json& j, bool& is_string) {
  if (j.is_object()) {
    auto re = j.find("re");
    if (re != j.end()) {
      is_string = re->is_string();
      return true;
    }
    for (const auto& [k, v] : j.items()) {
      (void)k;
      if (find_re_encoding(v, is_string)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (find_re_encoding(v, is_string)) return true;
  }
  return false;
}

}  // namespace io_detail

/// Detects the scalar mode of a polynomial/cubic JSON payload from its
/// coefficient encoding: rational strings mean exact, numbers mean float.
inline bool json_uses_exact_scalars(const json& j) {
  bool is_string = false;
  io_detail::find_re_encoding(j, is_string);
  return is_string;
}

}  // namespace lagfib

#ifndef MOMENTFORGE_JSON_IO_HPP
#define MOMENTFORGE_JSON_IO_HPP

// Requires nlohmann_json on the include path.
#include <nlohmann/json.hpp>

#include "verify.hpp"

namespace momentforge::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::parse, what); }

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

inline Eigen::Index read_q(const json& j) {
  const json& q = field(j, "q");
  if (!q.is_number_integer() || q.get<long long>() < 1) fail("\"q\" must be a positive integer");
  return static_cast<Eigen::Index>(q.get<long long>());
}

}  // namespace detail

inline json to_json(const CMatrix& A) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      r.push_back(A(i, k).real());
      c.push_back(A(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

inline CMatrix matrix_from_json(const json& j) {
  const json& r = detail::field(j, "rows");
  const json& c = detail::field(j, "cols");
  if (!r.is_number_integer() || !c.is_number_integer() || r.get<long long>() < 0 || c.get<long long>() < 0)
    detail::fail("matrix \"rows\"/\"cols\" must be nonnegative integers");
  const auto rows = static_cast<Eigen::Index>(r.get<long long>()), cols = static_cast<Eigen::Index>(c.get<long long>());
  CMatrix A(rows, cols);
  const auto part = [&](const char* key, bool required) -> const json* {
    if (!j.contains(key)) {
      if (required) detail::fail(std::string("matrix missing \"") + key + "\"");
      return nullptr;
    }
    const json& p = j.at(key);
    if (!p.is_array() || static_cast<Eigen::Index>(p.size()) != rows) detail::fail(std::string("matrix \"") + key + "\" has wrong row count");
    for (const auto& row : p)
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
        detail::fail(std::string("matrix \"") + key + "\" has wrong column count");
    return &p;
  };
  const json* re = part("re", true);
  const json* im = part("im", false);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& x = (*re)[i][k];
      if (!x.is_number()) detail::fail("matrix entry is not a number");
      double y = 0.0;
      if (im) {
        if (!(*im)[i][k].is_number()) detail::fail("matrix entry is not a number");
        y = (*im)[i][k].get<double>();
      }
      A(i, k) = cplx(x.get<double>(), y);
    }
  return A;
}

namespace detail {

inline std::vector<CMatrix> matrix_list(const json& j, const char* key, Eigen::Index q) {
  const json& arr = field(j, key);
  if (!arr.is_array()) fail(std::string("\"") + key + "\" must be an array");
  std::vector<CMatrix> out;
  for (const auto& e : arr) {
    CMatrix A = matrix_from_json(e);
    if (A.rows() != q || A.cols() != q) throw Error(ErrorKind::dimension, std::string("entry of \"") + key + "\" is not q x q");
    out.push_back(std::move(A));
  }
  return out;
}

inline json matrix_array(const std::vector<CMatrix>& v) {
  json a = json::array();
  for (const auto& A : v) a.push_back(to_json(A));
  return a;
}

}  // namespace detail

inline json to_json(const MomentSequence& s) { return {{"q", s.q()}, {"moments", detail::matrix_array(s.moments())}}; }
inline MomentSequence sequence_from_json(const json& j) {
  const Eigen::Index q = detail::read_q(j);
  return MomentSequence(detail::matrix_list(j, "moments", q));
}

inline json to_json(const StieltjesParam& p) { return {{"q", p.q}, {"params", detail::matrix_array(p.params)}}; }
inline StieltjesParam sp_from_json(const json& j) {
  const Eigen::Index q = detail::read_q(j);
  StieltjesParam p{q, detail::matrix_list(j, "params", q)};
  p.validate();
  return p;
}

inline json to_json(const DSParams& d) {
  return {{"q", d.q}, {"lengths", detail::matrix_array(d.lengths)}, {"masses", detail::matrix_array(d.masses)}};
}
inline DSParams ds_from_json(const json& j) {
  const Eigen::Index q = detail::read_q(j);
  DSParams d{q, detail::matrix_list(j, "lengths", q), detail::matrix_list(j, "masses", q)};
  d.validate();
  return d;
}

inline json to_json(const MatrixPoly& p) { return {{"q", p.rows()}, {"coeffs", detail::matrix_array(p.coeffs())}}; }
inline MatrixPoly poly_from_json(const json& j) {
  const Eigen::Index q = detail::read_q(j);
  return MatrixPoly(detail::matrix_list(j, "coeffs", q));
}

inline json to_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms()) atoms.push_back({{"t", a.t}, {"w", to_json(a.w)}});
  return {{"q", mu.q()}, {"atoms", std::move(atoms)}};
}
inline AtomicMeasure measure_from_json(const json& j) {
  const Eigen::Index q = detail::read_q(j);
  const json& arr = detail::field(j, "atoms");
  if (!arr.is_array()) detail::fail("\"atoms\" must be an array");
  std::vector<Atom> atoms;
  for (const auto& a : arr) {
    const json& t = detail::field(a, "t");
    if (!t.is_number()) detail::fail("atom \"t\" must be a number");
    atoms.push_back({t.get<double>(), matrix_from_json(detail::field(a, "w"))});
  }
  return AtomicMeasure(q, std::move(atoms));
}

inline json to_json(const SequenceClass& c) {
  json j = {{"in_Kgg", c.in_Kgg}, {"in_Kgge", c.in_Kgge}, {"in_Kg", c.in_Kg}, {"degenerate_order", nullptr}};
  if (c.completely_degenerate) j["degenerate_order"] = *c.completely_degenerate;
  return j;
}

inline json to_json(const Report& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e = {{"suite", row.suite},
              {"name", row.name},
              {"residual", std::isfinite(row.residual) ? json(row.residual) : json("inf")},
              {"tolerance", row.tolerance},
              {"pass", row.pass}};
    if (!row.note.empty()) e["note"] = row.note;
    rows.push_back(std::move(e));
  }
  json timings = json::object();
  for (const auto& [k, v] : r.timings_ms) timings[k] = v;
  return {{"command", r.command},
          {"inputs_digest", r.digest},
          {"seed", r.seed ? json(*r.seed) : json(nullptr)},
          {"pass", r.pass()},
          {"checks", std::move(rows)},
          {"timings_ms", std::move(timings)}};
}

inline json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, e.what());
  }
}

}  // namespace momentforge::io

#endif  // MOMENTFORGE_JSON_IO_HPP

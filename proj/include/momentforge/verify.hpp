#ifndef MOMENTFORGE_VERIFY_HPP
#define MOMENTFORGE_VERIFY_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "measures.hpp"

namespace momentforge {

struct ReportRow {
  std::string suite;
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  std::string note;  // error message when the check could not be evaluated
};

struct Report {
  std::string command;
  std::string digest;
  std::optional<std::uint64_t> seed;
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> timings_ms;

  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
  }

  // repeated (suite, name) keeps the worst residual
  void add(const std::string& suite, const std::string& name, double residual, double tolerance,
           const std::string& note = {}) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    for (auto& r : rows)
      if (r.suite == suite && r.name == name) {
        if (residual > r.residual) {
          r.residual = residual;
          if (!note.empty()) r.note = note;
        }
        r.pass = r.residual <= r.tolerance;
        return;
      }
    rows.push_back({suite, name, residual, tolerance, residual <= tolerance, note});
  }

  void add_timing(const std::string& what, double ms) {
    for (auto& t : timings_ms)
      if (t.first == what) {
        t.second += ms;
        return;
      }
    timings_ms.emplace_back(what, ms);
  }
};

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = hex[h & 0xf];
  return out;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"sp", "ds", "schur", "omp", "resolvent", "measures"};
  return names;
}

namespace detail {

inline double max_list_residual(const std::vector<CMatrix>& a, const std::vector<CMatrix>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, rel_residual(a[i], b[i]));
  return r;
}

inline double flag(bool ok) { return ok ? 0.0 : 1.0; }

// Runs one check; an exception becomes a failing row carrying the message.
class SuiteRunner {
 public:
  SuiteRunner(Report& rep, std::string suite, double tol) : rep_(rep), suite_(std::move(suite)), tol_(tol) {}

  void value(const std::string& name, const std::function<double()>& f) { run(name, 0, f); }
  void exact(const std::string& name, const std::function<bool()>& f) {
    run(name, 1, [&] { return flag(f()); });
  }
  void residuals(const std::string& what, const std::function<Residuals()>& f) {
    try {
      const Residuals res = f();
      for (const auto& [n, v] : res.rows()) rep_.add(suite_, n, v, tol_);
    } catch (const std::exception& e) {
      rep_.add(suite_, what, std::numeric_limits<double>::infinity(), tol_, e.what());
    }
  }

 private:
  void run(const std::string& name, int exact, const std::function<double()>& f) {
    const double tol = exact ? 0.0 : tol_;
    try {
      rep_.add(suite_, name, f(), tol);
    } catch (const std::exception& e) {
      rep_.add(suite_, name, std::numeric_limits<double>::infinity(), tol, e.what());
    }
  }

  Report& rep_;
  std::string suite_;
  double tol_;
};

}  // namespace detail

/// Off-axis evaluation points, deterministic in the seed.
inline std::vector<cplx> sample_points(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed ^ 0x5bd1e995ull);
  std::uniform_real_distribution<double> re(-3.0, 3.0), im(0.2, 3.0);
  std::bernoulli_distribution flip;
  std::vector<cplx> z;
  for (int i = 0; i < count; ++i) z.emplace_back(re(rng), flip(rng) ? im(rng) : -im(rng));
  return z;
}

inline void verify_sp(const MomentSequence& s, const TolerancePolicy& tol, Report& rep) {
  detail::SuiteRunner run(rep, "sp", tol.rtol_identity);
  run.exact("moments in positive definite class", [&] { return classify_by_definition(s, tol).in_Kg; });
  run.value("moments to parameters to moments", [&] {
    return detail::max_list_residual(sp_inverse(sp_forward(s, tol), tol).moments(), s.moments());
  });
  run.value("parameters to moments to parameters", [&] {
    const StieltjesParam sp = sp_forward(s, tol);
    return detail::max_list_residual(sp_forward(sp_inverse(sp, tol), tol).params, sp.params);
  });
  run.exact("class from parameters agrees with definition", [&] {
    return classify_from_sp(sp_forward(s, tol), tol).in_Kg == classify_by_definition(s, tol).in_Kg;
  });
}

inline void verify_ds(const MomentSequence& s, const TolerancePolicy& tol, Report& rep) {
  detail::SuiteRunner run(rep, "ds", tol.rtol_identity);
  const std::size_t m = s.order();
  run.value("DS from moments vs from parameters", [&] {
    const DSParams a = ds_forward(s), b = ds_from_sp(sp_forward(s, tol));
    return std::max(detail::max_list_residual(a.lengths, b.lengths), detail::max_list_residual(a.masses, b.masses));
  });
  run.value("parameters to DS to parameters", [&] {
    const StieltjesParam sp = sp_forward(s, tol);
    return detail::max_list_residual(sp_from_ds(ds_from_sp(sp)).params, sp.params);
  });
  if (s.q() == 1)
    run.value("determinant parameters vs DS", [&] {
      const ScalarKsParams ks = scalar_ks_params(s);
      const DSParams ds = ds_forward(s);
      double r = 0.0;
      for (std::size_t k = 0; k < ks.l.size(); ++k) r = std::max(r, rel_residual(CMatrix::Constant(1, 1, ks.l[k]), ds.lengths[k]));
      for (std::size_t k = 0; k < ks.m.size(); ++k) r = std::max(r, rel_residual(CMatrix::Constant(1, 1, ks.m[k]), ds.masses[k]));
      return r;
    });
  if (m >= 1)
    run.value("DS of first transform by swap", [&] {
      const DSParams a = ds_forward(transform1(s, tol)), b = ds_of_transform(ds_forward(s), s[0]);
      return std::max(detail::max_list_residual(a.lengths, b.lengths), detail::max_list_residual(a.masses, b.masses));
    });
  for (std::size_t ell = 0; ell + 2 <= m; ++ell)
    for (std::size_t k = 0; ell + 2 * k + 2 <= m; ++k)
      for (std::size_t d = 0; d <= k; ++d)
        run.residuals("transformed DS closed forms", [&] { return ds_shift_check(s, ell, k, d, tol); });
}

inline void verify_schur(const MomentSequence& s, const TolerancePolicy& tol, Report& rep) {
  detail::SuiteRunner run(rep, "schur", tol.rtol_identity);
  const std::size_t m = s.order();
  for (std::size_t k = 1; k <= m; ++k)
    run.value("transform shifts the parametrization", [&] { return transform_shift_check(s, k, tol); });
  if (m >= 1)
    run.value("Schur complements of first transform swap", [&] {
      const MomentSequence t = transform1(s, tol);
      double r = 0.0;
      for (std::size_t k = 0; 2 * k <= t.order(); ++k) r = std::max(r, rel_residual(schur_L(t, k, tol), schur_Lambda(s, k, tol)));
      for (std::size_t k = 0; 2 * k + 1 <= t.order(); ++k)
        r = std::max(r, rel_residual(schur_Lambda(t, k, tol), schur_L(s, k + 1, tol)));
      return r;
    });
  for (std::size_t k = 0; k <= m; ++k) {
    run.exact("positivity preserved by transforms", [&] { return class_preservation_check(s, k, tol).positive_preserved; });
    run.exact("degenerate order preserved by transforms", [&] {
      const auto c = class_preservation_check(s, k, tol);
      return c.degenerate_order_ok && c.top_degenerate_ok;
    });
  }
}

inline void verify_omp(const MomentSequence& s, std::span<const cplx> z, const TolerancePolicy& tol, Report& rep) {
  detail::SuiteRunner run(rep, "omp", tol.rtol_identity);
  const std::size_t m = s.order();
  for (std::size_t n = 0; 2 * n <= m; ++n)
    run.residuals("transform polynomial identities", [&] { return transform_poly_identities(s, n, z, tol); });
  for (std::size_t k = 0; 2 * k + 2 <= m; ++k)
    for (std::size_t d = 0; d <= k; ++d)
      run.residuals("value-at-zero conjugations", [&] { return value_at_zero_conjugations(s, k, d, tol); });

  const auto orth = [&](bool second_kind) {
    const OmpQuadruple quad = omp_quadruple(s, m / 2 + 1);
    std::vector<MatrixPoly> a, b;
    std::vector<CMatrix> da, db;
    if (!second_kind) {
      for (std::size_t n = 0; n < quad.pH.size() && 2 * n <= m; ++n) {
        a.push_back(quad.pH[n]);
        da.push_back(schur_L(s, n, tol));
      }
      for (std::size_t n = 0; n < quad.pK.size() && 2 * n + 1 <= m; ++n) {
        b.push_back(quad.pK[n]);
        db.push_back(schur_Lambda(s, n, tol));
      }
      const auto [oa, ga] = hankel_orthogonality(a, s, 0, da);
      const auto [ob, gb] = hankel_orthogonality(b, s, 1, db);
      return std::max({oa, ga, ob, gb});
    }
    if (m == 0) return 0.0;
    const MomentSequence t = transform1(s, tol);
    const CMatrix s0inv = inverse(s[0], "s_0");
    for (std::size_t k = 0; k < quad.qK.size() && 2 * k <= t.order(); ++k) {
      a.push_back(quad.qK[k].left_mul(s0inv));
      da.push_back(schur_Lambda(s, k, tol));
    }
    for (std::size_t k = 0; k + 1 < quad.qH.size() && 2 * k + 1 <= t.order(); ++k) {
      b.push_back(quad.qH[k + 1].left_mul(s0inv));
      db.push_back(schur_L(s, k + 1, tol));
    }
    const auto [oa, ga] = hankel_orthogonality(a, t, 0, da);
    const auto [ob, gb] = hankel_orthogonality(b, t, 1, db);
    return std::max({oa, ga, ob, gb});
  };
  run.value("first-kind orthogonality with Schur complement norms", [&] { return orth(false); });
  run.value("second-kind orthogonality for the transform", [&] { return orth(true); });
  for (std::size_t k = 0; k <= m / 2; ++k)
    run.residuals("intertwining relations", [&] { return intertwine_check(s, k, m / 2, z.first(std::min<std::size_t>(z.size(), 4)), tol); });
}

inline void verify_resolvent(const MomentSequence& s, std::span<const cplx> z, const TolerancePolicy& tol,
                             Report& rep) {
  detail::SuiteRunner run(rep, "resolvent", tol.rtol_identity);
  const std::size_t m = s.order();
  for (std::size_t k = 0; k <= m; ++k)
    run.residuals("three representations of the resolvent", [&] { return three_way_check(s, k, z); });
  const auto zs = z.first(std::min<std::size_t>(z.size(), 5));
  for (std::size_t k = 1; k <= m; ++k)
    for (std::size_t ell = 0; ell < k; ++ell)
      run.residuals("splitting identities", [&] { return splitting_check(s, k, ell, zs, tol); });
  run.value("value at zero", [&] {
    const ResolventMatrix U = resolvent_direct(s, m);
    const DSParams ds = ds_forward(s);
    CMatrix expect = identity(2 * s.q());
    for (const auto& L : ds.lengths) expect.topRightCorner(s.q(), s.q()) += L;
    return rel_residual(U(0.0), expect);
  });
}

inline void verify_measures(const MomentSequence& s, std::span<const cplx> z, const TolerancePolicy& tol,
                            Report& rep) {
  detail::SuiteRunner run(rep, "measures", tol.rtol_identity);
  const std::size_t m = s.order();
  for (std::size_t k = 0; k <= std::min<std::size_t>(m, 7); ++k)
    run.value("continued fraction vs extremal transforms", [&] {
      const DSParams ds = ds_forward(s);
      const MomentSequence sk = s.truncated(k);
      const ExtremalTransforms ex = extremal_transforms(omp_quadruple(sk, k / 2 + 1), k);
      double r = 0.0;
      for (cplx w : z) {
        r = std::max(r, rel_residual(continued_fraction_eval(ds, k / 2, w, Extremal::min), ex.S_min(w)));
        r = std::max(r, rel_residual(continued_fraction_eval(ds, (k + 1) / 2, w, Extremal::max), ex.S_max(w)));
      }
      return r;
    });
  for (std::size_t n = 1; 2 * n <= m; ++n)
    run.residuals("extremal transforms of the first transform", [&] {
      return extremal_transform_relation_check(s, n, z, tol);
    });
  for (std::size_t k = 0; 2 * k <= m; ++k)
    run.value("canonical pairs give extremal transforms", [&] {
      const std::size_t mm = 2 * k;
      const ResolventMatrix U = resolvent_direct(s, mm);
      const ExtremalTransforms ex = extremal_transforms(omp_quadruple(s.truncated(mm), k + 1), mm);
      const Eigen::Index q = s.q();
      double r = 0.0;
      for (cplx w : z) {
        r = std::max(r, rel_residual(lft_constant_pair(U, {identity(q), zeros(q, q)}, w, tol), ex.S_min(w)));
        r = std::max(r, rel_residual(lft_constant_pair(U, {zeros(q, q), identity(q)}, w, tol), ex.S_max(w)));
      }
      return r;
    });
  if (s.q() == 1)
    for (std::size_t k = 0; k <= m; ++k)
      run.residuals("extremal measure moments", [&] { return extremal_moment_check(s, k, tol); });
}

/// Runs the named suite ("all" or one of suite_names()) on a sequence.
inline void verify_sequence(const MomentSequence& s, const std::string& suite, std::uint64_t seed,
                            const TolerancePolicy& tol, Report& rep) {
  const std::vector<cplx> z = sample_points(seed, 20);
  const std::vector<cplx> z_few(z.begin(), z.begin() + 4);
  const auto timed = [&](const std::string& name, const std::function<void()>& f) {
    if (suite != "all" && suite != name) return;
    const auto t0 = std::chrono::steady_clock::now();
    f();
    rep.add_timing(name, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  };
  if (suite != "all" && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw Error(ErrorKind::domain, "unknown suite " + suite);
  timed("sp", [&] { verify_sp(s, tol, rep); });
  timed("ds", [&] { verify_ds(s, tol, rep); });
  timed("schur", [&] { verify_schur(s, tol, rep); });
  timed("omp", [&] { verify_omp(s, z_few, tol, rep); });
  timed("resolvent", [&] { verify_resolvent(s, z, tol, rep); });
  timed("measures", [&] { verify_measures(s, z_few, tol, rep); });
}

}  // namespace momentforge

#endif  // MOMENTFORGE_VERIFY_HPP

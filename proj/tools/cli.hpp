#ifndef MOMENTFORGE_TOOLS_CLI_HPP
#define MOMENTFORGE_TOOLS_CLI_HPP

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include <momentforge/json_io.hpp>

namespace momentforge::cli {

using io::json;

enum Exit { ok = 0, verification_failed = 2, usage = 3 };

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_output(const std::string& path, const json& j, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path);
  f << j.dump(2) << "\n";
  if (!f) throw IoError("write failed for " + path);
}

inline std::string fmt_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(3) << std::scientific << v;
  return ss.str();
}

inline std::string fmt_matrix(const CMatrix& A) {
  std::ostringstream ss;
  ss << std::setprecision(6);
  ss << "[";
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    ss << (i ? "; " : "");
    for (Eigen::Index k = 0; k < A.cols(); ++k) {
      const cplx v = A(i, k);
      ss << (k ? ", " : "") << v.real();
      if (v.imag() != 0.0) ss << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
    }
  }
  ss << "]";
  return ss.str();
}

inline void print_table(const Report& r, std::ostream& out) {
  std::size_t w = 10;
  for (const auto& row : r.rows) w = std::max(w, row.suite.size() + row.name.size() + 3);
  out << std::left << std::setw(static_cast<int>(w)) << "check" << "  " << std::setw(10) << "residual" << "  "
      << std::setw(10) << "tolerance" << "  result\n";
  for (const auto& row : r.rows) {
    out << std::setw(static_cast<int>(w)) << (row.suite + " / " + row.name) << "  " << std::setw(10)
        << fmt_double(row.residual) << "  " << std::setw(10) << fmt_double(row.tolerance) << "  "
        << (row.pass ? "PASS" : "FAIL");
    if (!row.note.empty()) out << "  (" << row.note << ")";
    out << "\n";
  }
  for (const auto& [k, v] : r.timings_ms) out << "time " << k << ": " << std::fixed << std::setprecision(1) << v << " ms\n";
  out << std::defaultfloat << (r.pass() ? "all checks passed" : "verification FAILED") << "\n";
}

struct Options {
  std::optional<double> tol;
  bool json_out = false;
};

inline TolerancePolicy resolve_tolerance(const Options& o) {
  TolerancePolicy tol;
  if (const char* env = std::getenv("MOMENTFORGE_TOL"); env && *env) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0') throw IoError("MOMENTFORGE_TOL is not a number");
    tol.rtol_identity = v;
  }
  if (o.tol) tol.rtol_identity = *o.tol;
  tol.validate();
  return tol;
}

inline json cmd_gen(Eigen::Index q, std::size_t m, std::uint64_t seed) {
  return io::to_json(random_spd_sequence(q, m, seed));
}

inline json cmd_analyze(const std::string& text, const TolerancePolicy& tol, std::vector<std::string>& warnings) {
  const MomentSequence s = io::sequence_from_json(io::parse_text(text));
  json j = {{"command", "analyze"}, {"inputs_digest", fnv1a_hex(text)}, {"q", s.q()}, {"m", s.order()}};
  j["class"] = io::to_json(classify_by_definition(s, tol));
  const StieltjesParam sp = sp_forward(s, tol);
  j["Q"] = io::detail::matrix_array(sp.params);
  try {
    const DSParams ds = ds_forward(s);
    j["lengths"] = io::detail::matrix_array(ds.lengths);
    j["masses"] = io::detail::matrix_array(ds.masses);
  } catch (const Error& e) {
    j["lengths"] = nullptr;
    j["masses"] = nullptr;
    warnings.push_back(std::string("DS parameters unavailable: ") + e.what());
  }
  json cond = json::object();
  for (std::size_t n = 0; 2 * n <= s.order(); ++n) {
    const double c = condition_estimate(build_H(s, n));
    cond["H_" + std::to_string(n)] = std::isfinite(c) ? json(c) : json("inf");
    if (!(c <= 1e10)) warnings.push_back("H_" + std::to_string(n) + " is ill-conditioned (" + fmt_double(c) + ")");
  }
  for (std::size_t n = 0; 2 * n + 1 <= s.order(); ++n) {
    const double c = condition_estimate(build_K(s, n));
    cond["K_" + std::to_string(n)] = std::isfinite(c) ? json(c) : json("inf");
    if (!(c <= 1e10)) warnings.push_back("K_" + std::to_string(n) + " is ill-conditioned (" + fmt_double(c) + ")");
  }
  j["condition"] = std::move(cond);
  j["warnings"] = warnings;
  return j;
}

/// U_m(z) three ways with pairwise residuals and the factor chain.
inline json cmd_resolve(const MomentSequence& s, std::size_t m, cplx z, bool& pass, const TolerancePolicy& tol) {
  const CMatrix direct = resolvent_direct(s, m)(z);
  const FactorChain chain = elementary_factors(ds_forward(s.truncated(m)), m);
  const CMatrix factors = factor_product(chain, z);
  const CMatrix polys = resolvent_from_polys(omp_quadruple(s.truncated(m), m / 2 + 1), m, z);
  const double r1 = rel_residual(direct, factors), r2 = rel_residual(direct, polys), r3 = rel_residual(factors, polys);
  pass = std::max({r1, r2, r3}) <= tol.rtol_identity;
  json fac = json::array();
  for (const auto& f : chain)
    fac.push_back({{"kind", f.kind == Factor::mass ? "mass" : "length"}, {"k", f.k}, {"param", io::to_json(f.param)}});
  return {{"command", "resolve"},
          {"m", m},
          {"z", {z.real(), z.imag()}},
          {"U", io::to_json(direct)},
          {"U_from_factors", io::to_json(factors)},
          {"U_from_polynomials", io::to_json(polys)},
          {"residuals",
           {{"block formulas vs factors", r1}, {"block formulas vs polynomials", r2}, {"factors vs polynomials", r3}}},
          {"pass", pass},
          {"factors", std::move(fac)}};
}

inline json cmd_recover(const MomentSequence& s, const std::string& which) {
  const std::size_t m = s.order();
  const ExtremalTransforms ex = extremal_transforms(omp_quadruple(s, m / 2 + 1), m);
  const bool use_max = which == "max" || (which == "auto" && m % 2 == 1);
  const AtomicMeasure mu = recover_scalar_measure(use_max ? ex.S_max : ex.S_min);
  json j = io::to_json(mu);
  j["extremal"] = use_max ? "max" : "min";
  return j;
}

inline Report cmd_verify_random(Eigen::Index q, std::size_t m, std::uint64_t seed, std::size_t trials,
                                const std::string& suite, const TolerancePolicy& tol) {
  Report rep;
  rep.command = "verify";
  rep.seed = seed;
  rep.digest = fnv1a_hex("random q=" + std::to_string(q) + " m=" + std::to_string(m) + " seed=" +
                         std::to_string(seed) + " trials=" + std::to_string(trials) + " suite=" + suite);
  for (std::size_t t = 0; t < trials; ++t) verify_sequence(random_spd_sequence(q, m, seed + t), suite, seed + t, tol, rep);
  return rep;
}

inline Report cmd_verify_file(const std::string& text, const std::string& suite, std::uint64_t seed,
                              const TolerancePolicy& tol) {
  const MomentSequence s = io::sequence_from_json(io::parse_text(text));
  Report rep;
  rep.command = "verify";
  rep.seed = seed;
  rep.digest = fnv1a_hex(text);
  verify_sequence(s, suite, seed, tol, rep);
  return rep;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"momentforge: truncated matricial Stieltjes moment problem toolkit"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--tol", opt.tol, "override the identity tolerance (default 1e-8, env MOMENTFORGE_TOL)");
  app.add_flag("--json", opt.json_out, "machine-readable output");
  app.fallthrough();

  Eigen::Index q = 1;
  std::size_t m = 0, k = 0, trials = 1;
  std::uint64_t seed = 0;
  std::string in, out_path, suite = "all", which = "auto";
  double z_re = 0.0, z_im = 0.0;
  std::optional<std::size_t> m_opt;
  std::vector<std::string> random_args;

  auto* gen = app.add_subcommand("gen", "write a random positive definite moment sequence");
  gen->add_option("--q", q, "matrix size")->required()->check(CLI::PositiveNumber);
  gen->add_option("--m", m, "order")->required();
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("-o,--out", out_path, "output file (stdout if omitted)");

  auto* analyze = app.add_subcommand("analyze", "classify and parametrize a moment sequence");
  analyze->add_option("input", in, "MomentSequence JSON")->required();

  auto* transform = app.add_subcommand("transform", "k-th Schur transform of a moment sequence");
  transform->add_option("input", in, "MomentSequence JSON")->required();
  transform->add_option("--k", k, "number of transform steps")->required();
  transform->add_option("-o,--out", out_path, "output file (stdout if omitted)");

  auto* resolve = app.add_subcommand("resolve", "evaluate the resolvent matrix U_m(z)");
  resolve->add_option("input", in, "MomentSequence JSON")->required();
  resolve->add_option("--m", m_opt, "order (default: sequence order)");
  resolve->add_option("--z-re", z_re, "real part of z");
  resolve->add_option("--z-im", z_im, "imaginary part of z");

  auto* verify = app.add_subcommand("verify", "run the identity suites");
  auto* vin = verify->add_option("input", in, "MomentSequence JSON");
  auto* vrand = verify->add_option("--random", random_args, "q m seed trials")->expected(4);
  vin->excludes(vrand);
  verify->add_option("--suite", suite, "all|sp|ds|schur|omp|resolvent|measures")
      ->check(CLI::IsMember({"all", "sp", "ds", "schur", "omp", "resolvent", "measures"}));
  verify->add_option("--seed", seed, "seed for sample points (file mode)");

  auto* recover = app.add_subcommand("recover", "atoms of the extremal measure of a scalar sequence");
  recover->add_option("input", in, "MomentSequence JSON, q = 1")->required();
  recover->add_option("--which", which, "auto|min|max (auto: max for odd order, min for even)")
      ->check(CLI::IsMember({"auto", "min", "max"}));
  recover->add_option("-o,--out", out_path, "output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  try {
    const TolerancePolicy tol = resolve_tolerance(opt);
    if (gen->parsed()) {
      write_output(out_path, cmd_gen(q, m, seed), out);
      return ok;
    }
    if (analyze->parsed()) {
      std::vector<std::string> warnings;
      const json j = cmd_analyze(read_file(in), tol, warnings);
      for (const auto& w : warnings) err << "warning: " << w << "\n";
      if (opt.json_out) {
        out << j.dump(2) << "\n";
        return ok;
      }
      const auto& c = j["class"];
      out << "q = " << j["q"] << ", m = " << j["m"] << "\n";
      out << "nonnegative (Kgg): " << c["in_Kgg"] << "\nnonnegative extendable (Kgge): " << c["in_Kgge"]
          << "\npositive definite (Kg): " << c["in_Kg"] << "\ndegenerate order: " << c["degenerate_order"] << "\n";
      const auto list = [&](const char* name) {
        if (j[name].is_null()) return;
        std::size_t i = 0;
        for (const auto& A : j[name]) out << name << "[" << i++ << "] = " << fmt_matrix(io::matrix_from_json(A)) << "\n";
      };
      list("Q");
      list("masses");
      list("lengths");
      return ok;
    }
    if (transform->parsed()) {
      const MomentSequence s = io::sequence_from_json(io::parse_text(read_file(in)));
      write_output(out_path, io::to_json(transformK(s, k, tol)), out);
      return ok;
    }
    if (resolve->parsed()) {
      const MomentSequence s = io::sequence_from_json(io::parse_text(read_file(in)));
      bool pass = true;
      const json j = cmd_resolve(s, m_opt.value_or(s.order()), cplx(z_re, z_im), pass, tol);
      if (opt.json_out) {
        out << j.dump(2) << "\n";
      } else {
        out << "U_" << j["m"] << "(" << fmt_matrix(CMatrix::Constant(1, 1, cplx(z_re, z_im))) << ") = "
            << fmt_matrix(io::matrix_from_json(j["U"])) << "\n";
        for (const auto& [name, v] : j["residuals"].items()) out << name << ": " << fmt_double(v.get<double>()) << "\n";
        for (const auto& f : j["factors"])
          out << (f["kind"] == "mass" ? "M_" : "L_") << f["k"].get<std::size_t>() << " = "
              << fmt_matrix(io::matrix_from_json(f["param"])) << "\n";
      }
      return pass ? ok : verification_failed;
    }
    if (verify->parsed()) {
      Report rep;
      if (!random_args.empty()) {
        const auto num = [&](std::size_t i) -> unsigned long long {
          try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(random_args[i], &pos);
            if (pos != random_args[i].size()) throw std::invalid_argument("trailing");
            return v;
          } catch (const std::exception&) {
            throw IoError("--random expects four nonnegative integers: q m seed trials");
          }
        };
        if (num(0) < 1) throw IoError("--random: q must be positive");
        rep = cmd_verify_random(static_cast<Eigen::Index>(num(0)), num(1), num(2), num(3), suite, tol);
      } else if (!in.empty()) {
        rep = cmd_verify_file(read_file(in), suite, seed, tol);
      } else {
        err << "verify needs an input file or --random q m seed trials\n";
        return usage;
      }
      if (opt.json_out) out << io::to_json(rep).dump(2) << "\n";
      else print_table(rep, out);
      return rep.pass() ? ok : verification_failed;
    }
    if (recover->parsed()) {
      const MomentSequence s = io::sequence_from_json(io::parse_text(read_file(in)));
      write_output(out_path, cmd_recover(s, which), out);
      return ok;
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return usage;
  } catch (const Error& e) {
    const json j = {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    err << j.dump() << "\n";
    return e.kind() == ErrorKind::parse ? usage : verification_failed;
  }
  return usage;
}

}  // namespace momentforge::cli

#endif  // MOMENTFORGE_TOOLS_CLI_HPP

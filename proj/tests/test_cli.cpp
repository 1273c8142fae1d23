#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "cli.hpp"
#include "oracles.hpp"

using namespace momentforge;
using io::json;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "momentforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("momentforge_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    unsetenv("MOMENTFORGE_TOL");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const json& j) {
    const std::string p = (dir_ / name).string();
    std::ofstream(p) << j.dump();
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

json factorial_json(std::size_t m) { return io::to_json(oracle::factorial(m)); }

double scalar_at(const json& list, std::size_t i) { return io::matrix_from_json(list.at(i))(0, 0).real(); }

}  // namespace

TEST(JsonIo, RoundTrips) {
  std::mt19937_64 rng(3);
  const CMatrix A = oracle::random_matrix(2, 3, rng);
  EXPECT_EQ(io::matrix_from_json(io::to_json(A)), A);
  const auto s = random_spd_sequence(2, 4, 9);
  const auto s2 = io::sequence_from_json(json::parse(io::to_json(s).dump()));
  for (std::size_t j = 0; j <= 4; ++j) EXPECT_EQ(s2[j], s[j]);
  const auto sp = sp_forward(s);
  EXPECT_EQ(io::sp_from_json(io::to_json(sp)).params, sp.params);
  const auto ds = ds_forward(s);
  const auto ds2 = io::ds_from_json(io::to_json(ds));
  EXPECT_EQ(ds2.lengths, ds.lengths);
  EXPECT_EQ(ds2.masses, ds.masses);
  const auto p = omp_quadruple(s, 2).pH[2];
  EXPECT_EQ(io::poly_from_json(io::to_json(p)).coeffs(), p.coeffs());
  const AtomicMeasure mu(1, {{0.5, oracle::scalar(2.0)}, {3.0, oracle::scalar(1.0)}});
  const auto mu2 = io::measure_from_json(io::to_json(mu));
  ASSERT_EQ(mu2.atoms().size(), 2u);
  EXPECT_EQ(mu2.atoms()[1].t, 3.0);
}

TEST(JsonIo, ParseErrors) {
  const auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::domain;
  };
  EXPECT_EQ(kind_of([] { io::parse_text("{not json"); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { io::sequence_from_json(json{{"moments", json::array()}}); }), ErrorKind::parse);
  EXPECT_EQ(kind_of([] { io::matrix_from_json(json{{"rows", 2}, {"cols", 1}, {"re", {{1.0}}}}); }), ErrorKind::parse);
  const json wrong_q = {{"q", 2}, {"moments", {io::to_json(oracle::scalar(1.0))}}};
  EXPECT_EQ(kind_of([&] { io::sequence_from_json(wrong_q); }), ErrorKind::dimension);
  // imaginary part optional
  EXPECT_EQ(io::matrix_from_json(json{{"rows", 1}, {"cols", 1}, {"re", {{2.0}}}})(0, 0), cplx(2.0));
}

TEST_F(CliTest, GenIsDeterministic) {
  const auto a = run_cli({"gen", "--q", "1", "--m", "5", "--seed", "7"});
  const auto b = run_cli({"gen", "--q", "1", "--m", "5", "--seed", "7"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto s = io::sequence_from_json(json::parse(a.out));
  EXPECT_EQ(s.size(), 6u);
  EXPECT_EQ(s.q(), 1);
  EXPECT_TRUE(classify_by_definition(s).in_Kg);
  EXPECT_EQ(run_cli({"gen", "--q", "2", "--m", "3", "--seed", "1", "-o", path("g.json")}).code, 0);
  EXPECT_TRUE(classify_by_definition(io::sequence_from_json(json::parse(cli::read_file(path("g.json"))))).in_Kg);
}

TEST_F(CliTest, AnalyzeFactorial) {
  const auto r = run_cli({"analyze", write("f.json", factorial_json(5)), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const std::vector<double> Q{1, 1, 1, 2, 4, 12}, M{1, 1, 1}, L{1, 0.5, 1.0 / 3.0};
  for (std::size_t i = 0; i < Q.size(); ++i) EXPECT_NEAR(scalar_at(j["Q"], i), Q[i], 1e-10);
  for (std::size_t i = 0; i < M.size(); ++i) EXPECT_NEAR(scalar_at(j["masses"], i), M[i], 1e-10);
  for (std::size_t i = 0; i < L.size(); ++i) EXPECT_NEAR(scalar_at(j["lengths"], i), L[i], 1e-10);
  EXPECT_TRUE(j["class"]["in_Kg"].get<bool>());
  EXPECT_TRUE(j["class"]["degenerate_order"].is_null());
  EXPECT_EQ(run_cli({"analyze", path("f.json")}).code, 0);
}

TEST_F(CliTest, AnalyzeZeroAndNonHermitian) {
  const MomentSequence zero(std::vector<CMatrix>(4, CMatrix::Zero(2, 2)));
  const auto r = run_cli({"analyze", write("z.json", io::to_json(zero)), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["class"]["degenerate_order"], 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);

  CMatrix A(2, 2);
  A << 1.0, 2.0, 0.0, 1.0;
  const auto bad = run_cli({"analyze", write("n.json", io::to_json(MomentSequence({A})))});
  EXPECT_EQ(bad.code, 2);
  const json e = json::parse(bad.err);
  EXPECT_EQ(e["error"]["kind"], "structure");
}

TEST_F(CliTest, AnalyzeWarnsOnIllConditioning) {
  const auto s = MomentSequence::scalar({1.0, 1.0, 1.0 + 1e-12});
  const auto r = run_cli({"analyze", write("c.json", io::to_json(s)), "--json"});
  EXPECT_NE(r.err.find("ill-conditioned"), std::string::npos);
}

TEST_F(CliTest, Transform) {
  const std::string f = write("f.json", factorial_json(5));
  const auto r = run_cli({"transform", f, "--k", "1"});
  ASSERT_EQ(r.code, 0);
  const auto t = io::sequence_from_json(json::parse(r.out));
  EXPECT_NEAR(t[0](0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(t[1](0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(t[2](0, 0).real(), 3.0, 1e-12);
  const auto c = io::sequence_from_json(json::parse(run_cli({"transform", f, "--k", "0"}).out));
  for (std::size_t j = 0; j <= 5; ++j) EXPECT_EQ(c[j], oracle::factorial(5)[j]);
  const auto bad = run_cli({"transform", f, "--k", "6"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(json::parse(bad.err)["error"]["kind"], "length");
}

TEST_F(CliTest, Resolve) {
  const std::string f = write("f.json", factorial_json(5));
  const auto r = run_cli({"resolve", f, "--m", "1", "--z-re", "2", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  CMatrix expect(2, 2);
  expect << 1.0, 1.0, -2.0, -1.0;
  EXPECT_LT(rel_residual(io::matrix_from_json(j["U"]), expect), 1e-12);
  EXPECT_LT(rel_residual(io::matrix_from_json(j["U_from_factors"]), expect), 1e-12);
  EXPECT_LT(rel_residual(io::matrix_from_json(j["U_from_polynomials"]), expect), 1e-12);
  EXPECT_EQ(j["residuals"].size(), 3u);
  EXPECT_EQ(j["factors"].size(), 2u);
  const json j0 = json::parse(run_cli({"resolve", f, "--m", "0", "--json"}).out);
  EXPECT_LT(rel_residual(io::matrix_from_json(j0["U"]), CMatrix::Identity(2, 2)), 1e-15);
}

TEST_F(CliTest, VerifyFactorialAndCorrupted) {
  const auto good = run_cli({"verify", write("f.json", factorial_json(5)), "--json"});
  EXPECT_EQ(good.code, 0) << good.out;
  const json rep = json::parse(good.out);
  EXPECT_TRUE(rep["pass"].get<bool>());
  EXPECT_EQ(rep["inputs_digest"].get<std::string>().size(), 16u);
  for (const auto& s : suite_names()) EXPECT_TRUE(rep["timings_ms"].contains(s)) << s;

  json bad = factorial_json(5);
  bad["moments"][2]["re"][0][0] = -2.0;
  const auto r = run_cli({"verify", write("b.json", bad), "--json"});
  EXPECT_EQ(r.code, 2);
  const json b = json::parse(r.out);
  bool class_failed = false, roundtrip_ok = false;
  for (const auto& row : b["checks"]) {
    if (row["name"] == "moments in positive definite class") class_failed = !row["pass"].get<bool>();
    if (row["name"] == "moments to parameters to moments") roundtrip_ok = row["pass"].get<bool>();
  }
  EXPECT_TRUE(class_failed);
  EXPECT_TRUE(roundtrip_ok);
}

TEST_F(CliTest, VerifyRandomIsDeterministic) {
  const auto a = run_cli({"verify", "--random", "2", "8", "11", "25", "--json"});
  EXPECT_EQ(a.code, 0);
  const auto b = run_cli({"verify", "--random", "2", "8", "11", "25", "--json"});
  json ja = json::parse(a.out), jb = json::parse(b.out);
  ja.erase("timings_ms");
  jb.erase("timings_ms");
  EXPECT_EQ(ja, jb);
  EXPECT_EQ(ja["seed"], 11);
  const auto one = run_cli({"verify", "--random", "1", "6", "3", "2", "--suite", "measures", "--json"});
  EXPECT_EQ(one.code, 0);
  for (const auto& row : json::parse(one.out)["checks"]) EXPECT_EQ(row["suite"], "measures");
}

TEST_F(CliTest, ToleranceOverrides) {
  const std::string f = write("f.json", io::to_json(random_spd_sequence(2, 6, 4)));
  EXPECT_EQ(run_cli({"verify", f, "--suite", "resolvent"}).code, 0);
  EXPECT_EQ(run_cli({"verify", f, "--suite", "resolvent", "--tol", "1e-30"}).code, 2);
  setenv("MOMENTFORGE_TOL", "1e-30", 1);
  EXPECT_EQ(run_cli({"verify", f, "--suite", "resolvent"}).code, 2);
  EXPECT_EQ(run_cli({"verify", f, "--suite", "resolvent", "--tol", "1e-8"}).code, 0);
  setenv("MOMENTFORGE_TOL", "abc", 1);
  EXPECT_EQ(run_cli({"verify", f}).code, 3);
  unsetenv("MOMENTFORGE_TOL");
}

TEST_F(CliTest, Recover) {
  const auto r = run_cli({"recover", write("f.json", factorial_json(3))});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto mu = io::measure_from_json(json::parse(r.out));
  ASSERT_EQ(mu.atoms().size(), 2u);
  EXPECT_NEAR(mu.atoms()[0].t, 2.0 - std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(mu.atoms()[0].w(0, 0).real(), (2.0 + std::sqrt(2.0)) / 4.0, 1e-9);
  const auto q2 = run_cli({"recover", write("q2.json", io::to_json(random_spd_sequence(2, 3, 1)))});
  EXPECT_EQ(q2.code, 2);
  EXPECT_EQ(json::parse(q2.err)["error"]["kind"], "scope");
}

TEST_F(CliTest, UsageAndIoErrors) {
  EXPECT_EQ(run_cli({}).code, 3);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 3);
  EXPECT_EQ(run_cli({"analyze", path("missing.json")}).code, 3);
  EXPECT_EQ(run_cli({"verify"}).code, 3);
  EXPECT_EQ(run_cli({"verify", "--random", "2", "x", "1", "1"}).code, 3);
  EXPECT_EQ(run_cli({"verify", "--random", "1", "2", "1", "1", "--suite", "nope"}).code, 3);
  std::ofstream(path("junk.json")) << "{";
  EXPECT_EQ(run_cli({"analyze", path("junk.json")}).code, 3);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "fcep/cli.hpp"
#include "fcep/fcep.hpp"

#include "support/exact.hpp"
#include "support/random_matrices.hpp"
#include "support/worked_examples.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

using namespace fcep;
using fcep::testing::make;
using fcep::testing::vec;

const TolerancePolicy kTol = TolerancePolicy::defaults();

// Seeded suites mix nilpotent blocks with conditioned cores; a looser rank
// cutoff than n*eps is needed to see the nilpotent part as singular.
TolerancePolicy seeded_tol() {
  TolerancePolicy t;
  t.rank_rel_tol = 1e-10;
  return t;
}

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    if (!ok) ++failed_;
  }
  void info(const std::string& s) { notes_.push_back(s); }

  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::ostringstream os;
    os << count_ << " checks";
    if (failed_) os << ", " << failed_ << " failed";
    for (const auto& n : notes_) os << "; " << n;
    for (const auto& f : failures_) os << "\n      - " << f;
    return os.str();
  }

 private:
  int count_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
  return (a - b).cwiseAbs().maxCoeff();
}

bool fuzzy_close(const FuzzyNumber& got, double l0, double l1, double u0, double u1, double tol) {
  return fuzzy_eq(got, {{l0, l1}, {u0, u1}}, tol);
}

// ---- worked examples ----

void criterion1(Check& c) {
  const AssociatedSystem sys = build_associated(testing::example1());
  c.expect(max_abs_diff(core_inverse(sys.s, kTol), testing::example1_core_inverse()) <= 1e-9,
           "core inverse of S");
  const SolveReport rep = solve(testing::example1(), kTol);
  c.expect(rep.fuzzy_x.size() == 2, "two components");
  if (rep.fuzzy_x.size() == 2) {
    c.expect(fuzzy_close(rep.fuzzy_x[0], -0.75, 0.25, 0.25, -0.75, 1e-9), "x1");
    c.expect(fuzzy_close(rep.fuzzy_x[1], -0.5, 1.5, 1.5, -0.5, 1e-9), "x2");
  }
  c.expect(rep.classification.kind == Kind::ConsistentInfinite, "kind ConsistentInfinite");
  c.expect(rep.classification.rank_s == 2, "rank_s = 2");
  c.expect(rep.classification.rank_aug == 2, "rank_aug = 2");
  c.expect(rep.classification.index_s == 1, "index 1");
}

void criterion2(Check& c) {
  const FlsProblem p = testing::example2();
  const AssociatedSystem sys = build_associated(p);
  c.expect(matrix_index(sys.s, kTol) == 2, "index 2");
  c.expect(matrix_power(sys.s, 2) == testing::example2_s_squared(), "S^2 exact");
  c.expect(max_abs_diff(core_ep_via_formula(sys.s, kTol), testing::example2_core_ep()) <= 1e-9,
           "core-EP inverse");
  const RealMatrix s2 = matrix_power(sys.s, 2);
  c.expect(in_column_space(s2, sys.rhs(0.0), kTol), "Y(0) in R(S^2)");
  c.expect(in_column_space(s2, sys.rhs(1.0), kTol), "Y(1) in R(S^2)");
  const SolveReport rep = solve(p, kTol);
  // X(r) = (2r, 5 - r, 3, 4, 1 + r, 3)
  c.expect(max_abs_diff(rep.crisp_x0, vec({0, 5, 3, 4, 1, 3})) <= 1e-9, "crisp x0");
  c.expect(max_abs_diff(rep.crisp_x1, vec({2, -1, 0, 0, 1, 0})) <= 1e-9, "crisp x1");
  c.expect(!rep.verdicts.empty() &&
               rep.verdicts[0].violated == std::vector<Clause>{Clause::Ordered},
           "component 1 violates only the ordering clause");
  c.expect(!rep.strong(), "weak overall");
}

void criterion3(Check& c) {
  const FlsProblem p = testing::example3();
  const AssociatedSystem sys = build_associated(p);
  const Classification cls = classify(sys, kTol);
  c.expect(cls.kind == Kind::Inconsistent, "kind Inconsistent");
  c.expect(cls.rank_s == 2 && cls.rank_aug == 4, "rank 2 vs 4");
  c.expect(cls.index_s == 2, "index 2");
  c.expect(max_abs_diff(core_ep_via_formula(sys.s, kTol), RealMatrix::Constant(4, 4, 0.125)) <= 1e-9,
           "S core-EP = 0.125");
  const SolveReport a = solve(p, kTol, Method::Method2i);
  const SolveReport b = solve(p, kTol, Method::Method2ii);
  for (std::size_t i = 0; i < 2; ++i) {
    c.expect(fuzzy_close(a.fuzzy_x[i], 0.625, -1.125, -0.625, 1.125, 1e-9), "method2-i component");
    c.expect(fuzzy_close(b.fuzzy_x[i], 0.625, -1.125, -0.625, 1.125, 1e-9), "method2-ii component");
    c.expect(fuzzy_eq(a.fuzzy_x[i], b.fuzzy_x[i], 1e-12), "variants agree");
  }
  c.expect(a.is_generalized && b.is_generalized, "flagged generalized");
  const CoreEpDecomposition dec = core_ep_decompose(sys.s, kTol);
  c.expect(dec.t.rows() == 1 && std::abs(dec.t(0, 0) - 2.0) <= 1e-9, "T = [2]");
  c.expect(matrix_power(dec.n_block, 2).norm() <= 1e-9, "N^2 = 0");
}

// ---- randomized suites ----

std::vector<testing::SeededMatrix> seeded_suite(std::size_t count) {
  testing::Rng rng(20240401);
  std::vector<testing::SeededMatrix> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int n = testing::uniform_int(rng, 1, 6);
    const int k = testing::uniform_int(rng, 0, std::min(3, n));
    out.push_back(testing::seeded_matrix(rng, n, k, testing::uniform_int(rng, 0, 2)));
  }
  return out;
}

const std::vector<testing::SeededMatrix>& suite() {
  static const auto s = seeded_suite(240);
  return s;
}

void criterion4(Check& c) {
  const TolerancePolicy tol = seeded_tol();
  std::size_t by_index[4] = {0, 0, 0, 0};
  for (const auto& m : suite()) {
    ++by_index[m.index];
    const double bound = 1e-8 * (1.0 + spectral_norm(m.a));
    const std::size_t k = matrix_index(m.a, tol);
    c.expect(k == m.index, "index recovered");
    const RealMatrix x = core_ep_via_formula(m.a, tol);
    const auto ep = testing::core_ep_residuals(m.a, x, m.index);
    for (std::size_t i = 0; i < ep.size(); ++i)
      c.expect(ep[i] <= bound, "core-EP equation " + std::to_string(i + 1));
    const auto mp = testing::penrose_residuals(m.a, moore_penrose(m.a, tol));
    for (std::size_t i = 0; i < mp.size(); ++i)
      c.expect(mp[i] <= bound, "Penrose equation " + std::to_string(i + 1));
  }
  std::ostringstream os;
  os << suite().size() << " matrices, indices 0/1/2/3: " << by_index[0] << "/" << by_index[1]
     << "/" << by_index[2] << "/" << by_index[3];
  c.info(os.str());
}

AssociatedSystem assemble(const RealMatrix& d, const RealMatrix& e) {
  AssociatedSystem sys;
  sys.d = d;
  sys.e = e;
  sys.s.resize(2 * d.rows(), 2 * d.rows());
  sys.s << d, e, e, d;
  return sys;
}

// Half from the positive/negative split of a sparse integer matrix, half
// with D + E and D - E of prescribed (independent) indices.
AssociatedSystem random_pair(testing::Rng& rng) {
  const int n = testing::uniform_int(rng, 1, 4);
  if (testing::uniform_int(rng, 0, 1)) {
    const RealMatrix a = testing::random_integer_matrix(rng, n, n, -2, 2, 0.5);
    return build_associated({a, FuzzyVector(static_cast<std::size_t>(n))});
  }
  const auto plus = testing::seeded_matrix(rng, n, testing::uniform_int(rng, 0, std::min(n, 3)),
                                           testing::uniform_int(rng, 0, 1));
  const auto minus = testing::seeded_matrix(rng, n, testing::uniform_int(rng, 0, std::min(n, 3)),
                                            testing::uniform_int(rng, 0, 1));
  return assemble(0.5 * (plus.a + minus.a), 0.5 * (plus.a - minus.a));
}

void criterion5(Check& c) {
  testing::Rng rng(7);
  const TolerancePolicy tol = seeded_tol();
  const int count = 240;
  for (int i = 0; i < count; ++i) {
    const AssociatedSystem sys = random_pair(rng);
    const Eigen::Index n = sys.n();
    const RealMatrix direct = core_ep_via_formula(sys.s, tol);
    const double scale = std::max(1.0, direct.norm());
    c.expect((block_core_ep(sys, tol) - direct).norm() <= 1e-8 * scale, "block = direct");
    const RealMatrix h = direct.topLeftCorner(n, n);
    const RealMatrix z = direct.topRightCorner(n, n);
    c.expect((h + z - core_ep_via_formula(sys.d + sys.e, tol)).norm() <= 1e-8 * scale, "H + Z");
    c.expect((h - z - core_ep_via_formula(sys.d - sys.e, tol)).norm() <= 1e-8 * scale, "H - Z");
  }
  c.info(std::to_string(count) + " pairs");
}

void criterion6(Check& c) {
  testing::Rng rng(11);
  const int count = 300;
  int members = 0;
  for (int i = 0; i < count; ++i) {
    const int n = testing::uniform_int(rng, 1, 3);
    const RealMatrix a = testing::random_integer_matrix(rng, n, n, -2, 2, 0.5);
    const RealMatrix s = build_associated({a, FuzzyVector(static_cast<std::size_t>(n))}).s;
    const RealMatrix sk = testing::naive_power(s, testing::exact_index(s));
    RealVector y = testing::random_integer_matrix(rng, 2 * n, 1, -3, 3, 0.2);
    if (testing::uniform_int(rng, 0, 1)) y = sk * y;
    const bool oracle = testing::exact_in_column_space(sk, y);
    members += oracle;
    c.expect(in_column_space(sk, y, kTol) == oracle, "membership agrees with exact oracle");
    const RealVector back = s * core_ep_via_formula(s, kTol) * y;
    const bool reproduces = (back - y).norm() <= 1e-8 * std::max(1.0, y.norm());
    c.expect(reproduces == oracle, "S S^# y = y exactly when y in R(S^k)");
  }
  c.info(std::to_string(count) + " cases, " + std::to_string(members) + " in range");
}

void criterion7(Check& c) {
  testing::Rng rng(13);
  const int count = 150;
  for (int i = 0; i < count; ++i) {
    const int n = testing::uniform_int(rng, 1, 4);
    const RealMatrix d = testing::random_matrix(rng, n, n, -1.5, 1.5);
    const RealMatrix e = testing::random_matrix(rng, n, n, -1.5, 1.5);
    const RealMatrix s = assemble(d, e).s;
    for (std::size_t p = 1; p <= 5; ++p) {
      const RealMatrix plus = testing::naive_power(d + e, p);
      const RealMatrix minus = testing::naive_power(d - e, p);
      const RealMatrix blocks = assemble(0.5 * (plus + minus), 0.5 * (plus - minus)).s;
      const RealMatrix sp = matrix_power(s, p);
      c.expect((sp - blocks).norm() <= 1e-8 * std::max(1.0, sp.norm()),
               "block power identity p=" + std::to_string(p));
    }
  }
  c.info(std::to_string(count) + " pairs x 5 powers");
}

void criterion8(Check& c) {
  const TolerancePolicy tol = seeded_tol();
  int complex_cases = 0;
  for (const auto& m : suite()) {
    if (m.complex_pairs > 0) ++complex_cases;
    const RealMatrix a = core_ep_via_formula(m.a, tol);
    const RealMatrix b = core_ep_via_decomposition(m.a, tol);
    c.expect((a - b).norm() <= 1e-8 * std::max(1.0, a.norm()), "routes agree");
  }
  c.expect(complex_cases >= 20, "at least 20 matrices with complex pairs");
  c.info(std::to_string(suite().size()) + " matrices, " + std::to_string(complex_cases) +
         " with complex pairs");
}

// ---- CLI ----

std::string fixture(const char* name) { return std::string(FCEP_FIXTURES) + "/" + name; }

int run_binary(const std::string& args, const std::string& out_path) {
  const std::string cmd =
      std::string("\"") + FCEP_CLI_PATH + "\" " + args + " > \"" + out_path + "\" 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion9(Check& c) {
  const std::string out =
      (std::filesystem::temp_directory_path() / "fcep_acceptance_report.json").string();
  auto solve_fixture = [&](const char* name) {
    const int code = run_binary("solve --format json \"" + fixture(name) + "\"", out);
    c.expect(code == 0, std::string(name) + " exit 0");
    return io::report_from_json(io::read_json_file(out)).report;
  };

  const SolveReport r1 = solve_fixture("consistent_index1.json");
  c.expect(r1.classification.kind == Kind::ConsistentInfinite && r1.classification.rank_s == 2 &&
               r1.classification.rank_aug == 2 && r1.classification.index_s == 1,
           "index-1 classification");
  c.expect(r1.fuzzy_x.size() == 2 && fuzzy_close(r1.fuzzy_x[0], -0.75, 0.25, 0.25, -0.75, 1e-9) &&
               fuzzy_close(r1.fuzzy_x[1], -0.5, 1.5, 1.5, -0.5, 1e-9),
           "index-1 fuzzy solution");

  const SolveReport r2 = solve_fixture("consistent_index2.json");
  c.expect(r2.classification.index_s == 2, "index-2 index");
  c.expect(max_abs_diff(r2.crisp_x0, vec({0, 5, 3, 4, 1, 3})) <= 1e-9 &&
               max_abs_diff(r2.crisp_x1, vec({2, -1, 0, 0, 1, 0})) <= 1e-9,
           "index-2 crisp solution");
  c.expect(!r2.verdicts.empty() && r2.verdicts[0].violated == std::vector<Clause>{Clause::Ordered} &&
               !r2.strong(),
           "index-2 verdicts");

  const SolveReport r3 = solve_fixture("inconsistent.json");
  c.expect(r3.classification.kind == Kind::Inconsistent && r3.classification.rank_s == 2 &&
               r3.classification.rank_aug == 4 && r3.classification.index_s == 2,
           "inconsistent classification");
  c.expect(r3.is_generalized, "inconsistent flagged generalized");
  bool all = r3.fuzzy_x.size() == 2;
  for (const auto& f : r3.fuzzy_x) all = all && fuzzy_close(f, 0.625, -1.125, -0.625, 1.125, 1e-9);
  c.expect(all, "inconsistent generalized solution");

  const std::pair<const char*, int> malformed[] = {{"bad_nonsquare.json", 3},
                                                   {"bad_rhs_length.json", 3},
                                                   {"bad_syntax.json", 2},
                                                   {"bad_grid_encoding.json", 2}};
  for (const auto& [name, want] : malformed) {
    c.expect(run_binary("solve \"" + fixture(name) + "\"", out) == want,
             std::string(name) + " exit " + std::to_string(want));
    cli::SolveOptions opt;
    opt.input = fixture(name);
    std::ostringstream sink, err;
    c.expect(cli::cmd_solve(opt, sink, err) == want,
             std::string(name) + " in-process exit " + std::to_string(want));
  }
  std::filesystem::remove(out);
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Check&)> body;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "consistent index-1 system reproduction", 1.0, criterion1},
      {2, "consistent index-2 system reproduction", 1.0, criterion2},
      {3, "inconsistent system reproduction", 1.0, criterion3},
      {4, "defining equations of core-EP and Moore-Penrose inverses", 30.0, criterion4},
      {5, "block core-EP equivalence", 0.0, criterion5},
      {6, "range membership against exact oracle", 0.0, criterion6},
      {7, "block power identity", 0.0, criterion7},
      {8, "decomposition and formula routes agree", 0.0, criterion8},
      {9, "CLI end to end", 0.0, criterion9},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      cr.body(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cr.budget_s > 0)
      check.expect(secs < cr.budget_s, "runtime over " + std::to_string(cr.budget_s) + " s");
    const bool ok = check.ok();
    failed += !ok;
    std::printf("[%s] criterion %d: %s (%.3f s; %s)\n", ok ? "PASS" : "FAIL", cr.id, cr.title,
                secs, check.summary().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed;
}

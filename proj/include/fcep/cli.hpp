#pragma once

// Command-line front end: `solve` and `inverse` subcommands.
//
// Exit codes: 0 success, 2 parse/usage error, 3 dimension mismatch,
// 4 numerical failure (including a core inverse requested for index > 1).

#include "fcep/core.hpp"
#include "fcep/fls.hpp"
#include "fcep/ginv.hpp"
#include "fcep/io.hpp"

#include <CLI11.hpp>

#include <cstddef>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fcep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitDimension = 3,
  kExitNumerical = 4,
};

struct ToleranceFlags {
  std::optional<double> rank_tol;
  std::optional<double> residual_tol;
  std::optional<double> eq_tol;

  TolerancePolicy policy() const {
    TolerancePolicy tol;
    tol.rank_rel_tol = rank_tol;
    if (residual_tol) tol.residual_tol = *residual_tol;
    if (eq_tol) tol.equality_tol = *eq_tol;
    tol.validate();
    return tol;
  }
};

struct SolveOptions {
  std::string input;
  std::optional<std::string> output;
  std::string method = "auto";
  std::string format = "text";
  std::size_t grid = kDefaultGrid;
  ToleranceFlags tol;
};

struct InverseOptions {
  std::string input;
  std::string kind = "core-ep";
  bool show_decomposition = false;
  bool associated = false;
  int precision = 6;
  ToleranceFlags tol;
};

/// Runs `body`, translating library errors into exit codes with a one-line
/// diagnostic on `err`.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << "\n";
    return kExitDimension;
  } catch (const NumericalFailure& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IndexTooLarge& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IndexNonzero& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }
}

inline int cmd_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::optional<Method> method;
    if (opt.method != "auto") {
      method = method_from_string(opt.method);
      if (!method) throw Error("unknown method \"" + opt.method + "\"");
    }
    if (opt.format != "json" && opt.format != "text")
      throw Error("unknown format \"" + opt.format + "\"");

    const FlsProblem problem = io::problem_from_json(io::read_json_file(opt.input));
    io::ReportFile rf;
    rf.tol = opt.tol.policy();
    rf.grid = opt.grid;
    rf.report = solve(problem, rf.tol, method, opt.grid);

    const std::string body = opt.format == "json" ? io::report_to_json(rf).dump(2) + "\n"
                                                  : io::report_to_text(rf);
    if (opt.output) {
      std::ofstream file(*opt.output);
      if (!file) throw Error("cannot write " + *opt.output);
      file << body;
    } else {
      out << body;
    }
    return static_cast<int>(kExitOk);
  });
}

inline int cmd_inverse(const InverseOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const TolerancePolicy tol = opt.tol.policy();
    if (opt.precision < 1 || opt.precision > 17) throw Error("precision must be in 1..17");
    const io::json doc = io::read_json_file(opt.input);
    const RealMatrix m = opt.associated ? build_associated(io::problem_from_json(doc)).s
                                        : io::square_matrix_from_json(doc);

    RealMatrix x;
    if (opt.kind == "core-ep")
      x = core_ep_via_formula(m, tol);
    else if (opt.kind == "core")
      x = core_inverse(m, tol);
    else if (opt.kind == "moore-penrose")
      x = moore_penrose(m, tol);
    else
      throw Error("unknown kind \"" + opt.kind + "\"");

    out << "kind: " << opt.kind << "\n";
    out << "index: " << matrix_index(m, tol) << "\n";
    out << "inverse =\n" << io::format_matrix(x, opt.precision);
    if (opt.show_decomposition) {
      const CoreEpDecomposition dec = core_ep_decompose(m, tol);
      out << "U =\n" << io::format_matrix(dec.u, opt.precision);
      out << "T =\n" << io::format_matrix(dec.t, opt.precision);
      out << "S =\n" << io::format_matrix(dec.s_block, opt.precision);
      out << "N =\n" << io::format_matrix(dec.n_block, opt.precision);
    }
    return static_cast<int>(kExitOk);
  });
}

namespace detail {

inline void add_tolerance_flags(CLI::App* cmd, ToleranceFlags& flags) {
  cmd->add_option("--rank-tol", flags.rank_tol, "relative singular-value cutoff for rank");
  cmd->add_option("--residual-tol", flags.residual_tol, "membership/consistency residual bound");
  cmd->add_option("--eq-tol", flags.eq_tol, "equality tolerance");
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuzzy linear systems via core-EP inverses"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  auto* solve_cmd = app.add_subcommand("solve", "solve a fuzzy linear system");
  solve_cmd->add_option("input", solve_opt.input, "problem file (JSON)")->required();
  solve_cmd->add_option("--output,-o", solve_opt.output, "write the report here instead of stdout");
  solve_cmd->add_option("--method", solve_opt.method, "auto|inverse|core-ep|method2-i|method2-ii")
      ->check(CLI::IsMember({"auto", "inverse", "core-ep", "method2-i", "method2-ii"}));
  solve_cmd->add_option("--format", solve_opt.format, "json|text")
      ->check(CLI::IsMember({"json", "text"}));
  solve_cmd->add_option("--grid", solve_opt.grid, "r-grid points for residuals")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  detail::add_tolerance_flags(solve_cmd, solve_opt.tol);

  InverseOptions inv_opt;
  auto* inv_cmd = app.add_subcommand("inverse", "generalized inverse of a square matrix");
  inv_cmd->add_option("input", inv_opt.input, "matrix file (JSON)")->required();
  inv_cmd->add_option("--kind", inv_opt.kind, "core-ep|core|moore-penrose")
      ->check(CLI::IsMember({"core-ep", "core", "moore-penrose"}));
  inv_cmd->add_flag("--show-decomposition", inv_opt.show_decomposition,
                    "print the U, T, S, N factors of the core-EP decomposition");
  inv_cmd->add_flag("--associated", inv_opt.associated,
                    "read a problem file and use its associated matrix S");
  inv_cmd->add_option("--precision", inv_opt.precision, "significant digits (default 6)");
  detail::add_tolerance_flags(inv_cmd, inv_opt.tol);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? static_cast<int>(kExitOk) : static_cast<int>(kExitParse);
  }

  if (solve_cmd->parsed()) return cmd_solve(solve_opt, out, err);
  return cmd_inverse(inv_opt, out, err);
}

}  // namespace fcep::cli

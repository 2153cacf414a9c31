// ratmin command-line tool: fit, apply, matfun, matvec, psd, reproduce.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ratmin/errors.hpp"
#include "ratmin/harness.hpp"

namespace {

using ratmin::HarnessOptions;

struct RawFlags {
  std::string deg;
  std::string grid = "equidistant";
  std::string spectrum;
  std::string func;
  std::string table;
  std::string out, csv, approx, approx_out, matrix, vector, result, spectrum_file;
  bool positive = false;
  std::vector<std::size_t> bench_sizes;
};

void add_common(CLI::App* sub, HarnessOptions& o, RawFlags& raw) {
  sub->add_option("--func", raw.func, "test function: f1 f2 f3 f4 filter bell relu");
  sub->add_option("--table", raw.table, "CSV of x,f(x) samples (custom function)");
  sub->add_option("--deg", raw.deg, "numerator,denominator degrees, e.g. 4,5");
  sub->add_option("--lbound", o.lbound, "lower bound on q at fit points")->capture_default_str();
  sub->add_option("--ubound", o.ubound, "upper bound on q at fit points (default 1e6)");
  sub->add_flag("--positive", raw.positive, "require p >= 0 at fit points");
  sub->add_option("--eps", o.eps, "bisection tolerance")->capture_default_str();
  sub->add_option("--fit-points", o.fit_points, "fit grid size")->capture_default_str();
  sub->add_option("--eval-points", o.eval_points, "eval grid size")->capture_default_str();
  sub->add_option("--grid", raw.grid, "fit grid: equidistant|chebyshev")->capture_default_str();
  sub->add_option("--seed", o.seed, "seed for random matrices and vectors")->capture_default_str();
  sub->add_option("--filter-center", o.filter_center, "filter/bell center c");
  sub->add_option("--filter-width", o.filter_width, "filter/bell width R");
  sub->add_option("--filter-rise", o.filter_rise, "filter/bell rise rate rr");
  sub->add_option("--out", raw.out, "write the JSON run record here");
  sub->add_option("--csv", raw.csv, "write (x,f,r,error) plot data here");
  sub->add_option("--approx", raw.approx, "approximant JSON (or fit record) to use");
  sub->add_option("--approx-out", raw.approx_out, "write the fitted approximant JSON here");
  sub->add_option("--matrix", raw.matrix, "matrix file, .csv or .bin");
  sub->add_option("--vector", raw.vector, "vector file, one value per line");
  sub->add_option("--result", raw.result, "write the resulting matrix or vector here");
  sub->add_option("--spectrum", raw.spectrum, "chebyshev|uniform|clustered|file");
  sub->add_option("--spectrum-file", raw.spectrum_file, "eigenvalues for --spectrum file");
  sub->add_option("--size", o.size, "matrix dimension k");
  sub->add_flag("--refine", o.refine, "one step of iterative refinement");
  sub->add_flag("--bench", o.bench, "time r(A)v against explicit r(A)");
  sub->add_option("--bench-sizes", raw.bench_sizes, "matrix sizes for --bench");
  sub->add_option("--bench-reps", o.bench_reps, "repetitions per size")->capture_default_str();
}

void finish(HarnessOptions& o, const RawFlags& raw) {
  if (!raw.func.empty()) o.func = raw.func;
  if (!raw.table.empty()) o.table = raw.table;
  if (!raw.deg.empty()) {
    const auto comma = raw.deg.find(',');
    if (comma == std::string::npos) {
      throw ratmin::InvalidArgument("--deg expects n,m");
    }
    try {
      std::size_t used = 0;
      const std::string ns = raw.deg.substr(0, comma);
      const std::string ms = raw.deg.substr(comma + 1);
      o.num_degree = std::stoul(ns, &used);
      if (used != ns.size()) throw std::invalid_argument(ns);
      o.den_degree = std::stoul(ms, &used);
      if (used != ms.size()) throw std::invalid_argument(ms);
    } catch (const std::logic_error&) {
      throw ratmin::InvalidArgument("--deg expects two non-negative integers n,m");
    }
  }
  if (raw.positive) o.positive = true;
  o.grid = ratmin::parse_grid_kind(raw.grid);
  if (!raw.spectrum.empty()) o.spectrum = ratmin::parse_spectrum_kind(raw.spectrum);
  auto path = [](const std::string& s, std::optional<std::filesystem::path>& p) {
    if (!s.empty()) p = s;
  };
  path(raw.out, o.out);
  path(raw.csv, o.csv);
  path(raw.approx, o.approx);
  path(raw.approx_out, o.approx_out);
  path(raw.matrix, o.matrix);
  path(raw.vector, o.vector);
  path(raw.result, o.result);
  path(raw.spectrum_file, o.spectrum_file);
  if (!raw.bench_sizes.empty()) o.bench_sizes = raw.bench_sizes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constrained rational minimax fitting and matrix functions"};
  app.require_subcommand(1);
  app.fallthrough();
  HarnessOptions o;
  RawFlags raw;
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "print nothing but errors");

  auto* fit = app.add_subcommand("fit", "fit an approximant and report its error");
  auto* apply = app.add_subcommand("apply", "apply an approximant to a matrix file");
  auto* matfun = app.add_subcommand("matfun", "r(A) against the exact f(A)");
  auto* matvec = app.add_subcommand("matvec", "r(A) v against the exact f(A) v");
  auto* psd = app.add_subcommand("psd", "project a symmetric matrix toward the PSD cone");
  auto* repro = app.add_subcommand("reproduce", "run the reference experiments");
  for (CLI::App* sub : {fit, apply, matfun, matvec, psd, repro}) add_common(sub, o, raw);
  repro->add_option("--experiment", o.experiments, "experiment id (repeatable)");
  repro->add_flag("--list", o.list, "list experiments and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ratmin::kExitUsage;
  }

  try {
    finish(o, raw);
    ratmin::CommandResult res;
    if (fit->parsed()) {
      res = ratmin::cmd_fit(o);
    } else if (apply->parsed()) {
      res = ratmin::cmd_apply(o);
    } else if (matfun->parsed()) {
      res = ratmin::cmd_matfun(o);
    } else if (matvec->parsed()) {
      res = ratmin::cmd_matvec(o);
    } else if (psd->parsed()) {
      res = ratmin::cmd_psd(o);
    } else {
      res = ratmin::cmd_reproduce(o);
    }
    if (!quiet) {
      for (const std::string& line : res.summary) std::cout << line << '\n';
      if (!o.out && !repro->parsed()) std::cout << res.record.dump(2) << '\n';
    }
    return res.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "ratmin: " << e.what() << '\n';
    return ratmin::exit_code_for(e);
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ratmin/builtins.hpp"
#include "ratmin/matfun.hpp"
#include "ratmin/minimax.hpp"

namespace ratmin {

enum ExitCode : int {
  kExitOk = 0,
  kExitTolerance = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

enum class GridKind { Equidistant, Chebyshev };
enum class SpectrumKind { Chebyshev, Uniform, Clustered, File };

GridKind parse_grid_kind(const std::string& s);
SpectrumKind parse_spectrum_kind(const std::string& s);
std::string to_string(GridKind g);
std::string to_string(SpectrumKind s);

/// Everything the CLI can set. Unset optionals take per-command defaults
/// (e.g. matfun fits the filter at (10,10), u=1000 unless told otherwise).
struct HarnessOptions {
  std::optional<std::string> func;
  std::optional<std::filesystem::path> table;
  std::optional<std::size_t> num_degree;
  std::optional<std::size_t> den_degree;
  double lbound = 1.0;
  std::optional<double> ubound;
  std::optional<bool> positive;
  double eps = 1e-12;
  std::size_t fit_points = 400;
  std::size_t eval_points = 1000;
  GridKind grid = GridKind::Equidistant;
  std::uint64_t seed = 7;
  std::optional<double> filter_center;
  std::optional<double> filter_width;
  std::optional<double> filter_rise;

  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> approx;
  std::optional<std::filesystem::path> approx_out;
  std::optional<std::filesystem::path> matrix;
  std::optional<std::filesystem::path> vector;
  std::optional<std::filesystem::path> result;
  std::optional<SpectrumKind> spectrum;
  std::optional<std::filesystem::path> spectrum_file;
  std::optional<std::size_t> size;
  bool refine = false;

  bool bench = false;
  std::vector<std::size_t> bench_sizes{100, 500, 1000, 2500};
  std::size_t bench_reps = 10;

  std::vector<std::string> experiments;  ///< empty: run all
  bool list = false;
};

/// One measured quantity compared against a reference value.
struct Check {
  enum class Kind { Relative, AtMost, AtLeast, Holds };
  std::string quantity;
  Kind kind = Kind::Relative;
  double measured = 0.0;
  double target = 0.0;
  double tolerance = 0.0;  ///< relative for Kind::Relative, absolute slack otherwise
  bool pass = false;
};

Check check_relative(std::string quantity, double measured, double target,
                     double rel_tol);
Check check_at_most(std::string quantity, double measured, double limit,
                    double slack = 0.0);
Check check_at_least(std::string quantity, double measured, double limit,
                     double slack = 0.0);
Check check_holds(std::string quantity, bool ok);

nlohmann::json to_json(const Check& c);

struct CommandResult {
  nlohmann::json record;
  int exit_code = kExitOk;
  /// Human-readable lines for stdout.
  std::vector<std::string> summary;
};

/// A fit run the way every command runs it: sample on the fit grid, bisect,
/// measure on the eval grid.
struct FitRun {
  TestFunction func;
  FitProblem problem;
  FitReport report;
  Grid eval_grid;
  double uniform_error = 0.0;
  double c_r = 0.0;       ///< on the fit grid, where l <= q <= u is imposed
  double c_r_eval = 0.0;  ///< on the eval grid, for reference
  BoundReport bound_check;
  GridKind grid_kind = GridKind::Equidistant;
  double seconds = 0.0;
};

FitRun run_fit(const TestFunction& f, std::size_t n, std::size_t m,
               const BoundSpec& b, double eps = 1e-12,
               std::size_t fit_points = 400, std::size_t eval_points = 1000,
               GridKind grid = GridKind::Equidistant);

/// The RunRecord fragment for a fit: parameters, report, metrics, timing.
nlohmann::json fit_record(const FitRun& run);

/// (x, f, r, error) rows on the eval grid.
void write_plot_csv(const std::filesystem::path& p, const FitRun& run);

/// Resolves --func/--table plus filter parameters into a TestFunction.
TestFunction resolve_function(const HarnessOptions& o,
                              const std::string& default_id);

std::vector<double> make_spectrum(SpectrumKind kind, std::size_t k,
                                  std::uint64_t seed,
                                  const std::optional<std::filesystem::path>& file);

/// Reads a bare approximant JSON or a fit RunRecord that embeds one.
RationalApproximant load_any_approximant(const std::filesystem::path& p);

/// Bisection bookkeeping for a finished fit: step count, halving bracket,
/// feasibility of the final bracket ends per the level trace.
std::vector<Check> bisection_checks(const FitReport& rep, double epsilon,
                                    const std::string& label);

struct BenchRow {
  std::size_t k = 0;
  double matvec_seconds = 0.0;  ///< mean over reps, r(A) v path
  double full_seconds = 0.0;    ///< mean over reps, explicit r(A) then multiply
};

/// Times both r(A) v strategies on seeded uniform-spectrum matrices.
std::vector<BenchRow> bench_matvec(const RationalApproximant& r,
                                   const std::vector<std::size_t>& sizes,
                                   std::size_t reps, std::uint64_t seed);

struct ExperimentResult {
  std::string id;
  nlohmann::json record;
  std::vector<Check> checks;
  std::vector<FitRun> fits;
  std::vector<std::string> fit_labels;
  bool pass() const noexcept;
};

/// Runs one named reproduction experiment (see experiment_list()).
ExperimentResult run_experiment(const std::string& id, const HarnessOptions& o);

CommandResult cmd_fit(const HarnessOptions& o);
CommandResult cmd_apply(const HarnessOptions& o);
CommandResult cmd_matfun(const HarnessOptions& o);
CommandResult cmd_matvec(const HarnessOptions& o);
CommandResult cmd_psd(const HarnessOptions& o);
CommandResult cmd_reproduce(const HarnessOptions& o);

struct ExperimentInfo {
  std::string id;
  std::string description;
};
std::vector<ExperimentInfo> experiment_list();

/// Maps a caught exception to the documented exit code.
int exit_code_for(const std::exception& e) noexcept;

}  // namespace ratmin

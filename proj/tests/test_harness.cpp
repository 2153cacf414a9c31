#include <cmath>
#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "doctest.h"
#include "ratmin/errors.hpp"
#include "ratmin/harness.hpp"
#include "ratmin/matrix_io.hpp"
#include "ratmin/serialize.hpp"

using namespace ratmin;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("ratmin_harness_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json without_timings(json j) {
  if (j.is_object()) {
    j.erase("timings");
    for (auto& [k, v] : j.items()) v = without_timings(v);
  } else if (j.is_array()) {
    for (auto& v : j) v = without_timings(v);
  }
  return j;
}

HarnessOptions small_fit() {
  HarnessOptions o;
  o.func = "f1";
  o.num_degree = 3;
  o.den_degree = 3;
  o.ubound = 10.0;
  return o;
}

}  // namespace

TEST_CASE("fit record carries parameters, report and metrics") {
  const CommandResult res = cmd_fit(small_fit());
  CHECK(res.exit_code == kExitOk);
  const json& fit = res.record.at("fit");
  CHECK(fit.at("params").at("func") == "f1");
  CHECK(fit.at("params").at("deg") == json::array({3, 3}));
  CHECK(fit.at("params").at("bounds").at("upper") == 10.0);
  CHECK(fit.at("params").at("fit_points") == 400);
  CHECK(fit.at("params").at("grid") == "equidistant");
  CHECK(fit.at("metrics").at("bounds_ok") == true);
  CHECK(fit.at("metrics").at("C_r").get<double>() <= 10.0 + 1e-6);
  const json& report = fit.at("report");
  CHECK(report.at("level_trace").size() ==
        1 + report.at("doublings").get<std::size_t>() + report.at("iterations").get<std::size_t>());

  // the recorded error is exactly what the library reports for the stored approximant
  const RationalApproximant r = approximant_from_json(report.at("approximant"));
  const double ue = uniform_error(r, builtin("f1").f,
                                  equidistant_grid(Domain(0.0, 3.0), 1000));
  CHECK(fit.at("metrics").at("uniform_error").get<double>() == ue);
}

TEST_CASE("fit runs are deterministic apart from timings") {
  const CommandResult a = cmd_fit(small_fit());
  const CommandResult b = cmd_fit(small_fit());
  CHECK(without_timings(a.record) == without_timings(b.record));
}

TEST_CASE("fit writes the record, plot data and approximant") {
  TempDir tmp;
  HarnessOptions o = small_fit();
  o.out = tmp.path / "run.json";
  o.csv = tmp.path / "plot.csv";
  o.approx_out = tmp.path / "r.json";
  cmd_fit(o);
  std::ifstream in(*o.out);
  const json j = json::parse(in);
  CHECK(j.at("command") == "fit");
  CHECK(load_any_approximant(*o.out) == load_approximant(*o.approx_out));
  std::ifstream csv(*o.csv);
  std::string header;
  std::getline(csv, header);
  CHECK(header == "x,f,r,error");
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  CHECK(rows == 1000);
}

TEST_CASE("custom tables feed the fitter") {
  TempDir tmp;
  const fs::path table = tmp.path / "t.csv";
  {
    std::ofstream out(table);
    out << "x,f\n";
    for (int i = 0; i <= 2000; ++i) {
      const double x = -1.0 + i / 1000.0;
      out << x << ',' << std::exp(x) << '\n';
    }
  }
  HarnessOptions o;
  o.table = table;
  o.num_degree = 3;
  o.den_degree = 2;
  const CommandResult res = cmd_fit(o);
  CHECK(res.record.at("fit").at("metrics").at("uniform_error").get<double>() < 1e-4);
}

TEST_CASE("option errors are usage errors") {
  HarnessOptions o = small_fit();
  o.func = "nope";
  CHECK_THROWS_AS(cmd_fit(o), InvalidArgument);
  HarnessOptions a;
  CHECK_THROWS_AS(cmd_apply(a), InvalidArgument);
  CHECK_THROWS_AS(parse_grid_kind("random"), InvalidArgument);
  CHECK_THROWS_AS(parse_spectrum_kind("gaussian"), InvalidArgument);
  CHECK(parse_spectrum_kind("clustered") == SpectrumKind::Clustered);
  HarnessOptions r;
  r.experiments = {"nope"};
  CHECK_THROWS_AS(cmd_reproduce(r), InvalidArgument);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(InvalidArgument("x")) == kExitUsage);
  CHECK(exit_code_for(NumericalError("x")) == kExitNumerical);
  CHECK(exit_code_for(LpCyclingError("x", 10)) == kExitNumerical);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitNumerical);
}

TEST_CASE("reproduce --list names every experiment") {
  HarnessOptions o;
  o.list = true;
  const CommandResult res = cmd_reproduce(o);
  CHECK(res.exit_code == kExitOk);
  CHECK(res.record.at("experiments").size() == experiment_list().size());
  CHECK(experiment_list().size() == 10);
}

TEST_CASE("apply reads files and reproduces eval on c I") {
  TempDir tmp;
  const RationalApproximant r(Domain(0.0, 1.0), {1.0, 0.3}, {2.0, -0.5},
                              BoundSpec{1.0, 4.0, false});
  save_approximant(tmp.path / "r.json", r);
  save_matrix(tmp.path / "a.bin", 0.25 * DenseMatrix::identity(5));
  {
    std::ofstream v(tmp.path / "v.csv");
    v << "1\n2\n3\n4\n5\n";
  }
  HarnessOptions o;
  o.approx = tmp.path / "r.json";
  o.matrix = tmp.path / "a.bin";
  o.result = tmp.path / "ra.csv";
  cmd_apply(o);
  const DenseMatrix ra = load_matrix(*o.result);
  CHECK((ra - eval(r, 0.25) * DenseMatrix::identity(5)).max_abs() <= 1e-14);

  o.vector = tmp.path / "v.csv";
  o.result = tmp.path / "rv.csv";
  cmd_apply(o);
  const Vector rv = load_vector(*o.result);
  REQUIRE(rv.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(std::abs(rv[i] - eval(r, 0.25) * static_cast<double>(i + 1)) <= 1e-13);
  }
}

TEST_CASE("matfun on a constant spectrum gives r(c) I") {
  TempDir tmp;
  const fs::path spec = tmp.path / "eig.csv";
  {
    std::ofstream out(spec);
    for (int i = 0; i < 8; ++i) out << "0.4\n";
  }
  HarnessOptions o;
  o.spectrum = SpectrumKind::File;
  o.spectrum_file = spec;
  o.num_degree = 4;
  o.den_degree = 4;
  o.ubound = 100.0;
  o.result = tmp.path / "ra.csv";
  o.approx_out = tmp.path / "r.json";
  const CommandResult res = cmd_matfun(o);
  const RationalApproximant r = load_approximant(*o.approx_out);
  const DenseMatrix ra = load_matrix(*o.result);
  CHECK((ra - eval(r, 0.4) * DenseMatrix::identity(8)).max_abs() <= 1e-12);
  const double f = builtin("filter")(0.4);
  CHECK(res.record.at("metrics").at("frobenius_rel_error").get<double>() ==
        doctest::Approx(std::abs(eval(r, 0.4) - f) / std::abs(f)).epsilon(1e-10));
}

TEST_CASE("bisection checks accept a genuine fit and flag a tampered trace") {
  const FitRun run = run_fit(builtin("f4"), 3, 3, BoundSpec{1.0, 100.0, false}, 1e-8);
  for (const Check& c : bisection_checks(run.report, 1e-8, "f4")) CHECK_MESSAGE(c.pass, c.quantity);
  FitReport bad = run.report;
  bad.level_trace.back().feasible = !bad.level_trace.back().feasible;
  bool any_fail = false;
  for (const Check& c : bisection_checks(bad, 1e-8, "f4")) any_fail = any_fail || !c.pass;
  CHECK(any_fail);
}

TEST_CASE("check helpers") {
  CHECK(check_relative("a", 1.1, 1.0, 0.15).pass);
  CHECK_FALSE(check_relative("a", 1.2, 1.0, 0.15).pass);
  CHECK(check_at_most("b", 1.0, 1.0).pass);
  CHECK_FALSE(check_at_most("b", 1.0 + 1e-9, 1.0).pass);
  CHECK(check_at_least("c", -1e-10, 0.0, 1e-9).pass);
  CHECK_FALSE(check_holds("d", false).pass);
  CHECK(to_json(check_relative("a", 1.1, 1.0, 0.15)).at("pass") == true);
}

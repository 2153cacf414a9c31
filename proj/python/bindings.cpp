#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ratmin/builtins.hpp"
#include "ratmin/errors.hpp"
#include "ratmin/harness.hpp"
#include "ratmin/matfun.hpp"
#include "ratmin/serialize.hpp"

namespace py = pybind11;
using namespace ratmin;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DenseMatrix to_matrix(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw InvalidArgument("expected a square 2-d array");
  }
  const auto k = static_cast<std::size_t>(a.shape(0));
  return DenseMatrix(k, std::vector<double>(a.data(), a.data() + k * k));
}

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw InvalidArgument("expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

py::array_t<double> from_matrix(const DenseMatrix& m) {
  const auto k = static_cast<py::ssize_t>(m.dim());
  py::array_t<double> out(std::vector<py::ssize_t>{k, k});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

py::array_t<double> from_vector(std::span<const double> v) {
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(v.size())});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

// elementwise f over an array of any shape
template <typename F>
py::array_t<double> map_array(const Array& x, F f) {
  py::array_t<double> out(std::vector<py::ssize_t>(x.shape(), x.shape() + x.ndim()));
  const double* in = x.data();
  double* o = out.mutable_data();
  for (py::ssize_t i = 0; i < x.size(); ++i) o[i] = f(in[i]);
  return out;
}

Domain to_domain(const std::pair<double, double>& d) { return Domain(d.first, d.second); }

GridKind grid_kind(const std::string& s) { return parse_grid_kind(s); }

}  // namespace

PYBIND11_MODULE(_ratmin, m) {
  m.doc() = "Constrained rational minimax fitting and rational matrix functions";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  py::class_<BoundSpec>(m, "BoundSpec")
      .def(py::init([](double lower, double upper, bool positive) {
             BoundSpec b{lower, upper, positive};
             b.validate();
             return b;
           }),
           py::arg("lower") = 1.0, py::arg("upper") = 1e6, py::arg("positive") = false)
      .def_readonly("lower", &BoundSpec::lower)
      .def_readonly("upper", &BoundSpec::upper)
      .def_readonly("positive", &BoundSpec::positive)
      .def("__repr__", [](const BoundSpec& b) {
        return "BoundSpec(lower=" + std::to_string(b.lower) + ", upper=" +
               std::to_string(b.upper) + ", positive=" + (b.positive ? "True" : "False") + ")";
      });

  py::class_<RationalApproximant>(m, "Approximant")
      .def(py::init([](std::pair<double, double> domain, std::vector<double> num,
                       std::vector<double> den, std::optional<BoundSpec> bounds) {
             return RationalApproximant(to_domain(domain), ChebCoeffs(std::move(num)),
                                        ChebCoeffs(std::move(den)), bounds);
           }),
           py::arg("domain"), py::arg("num"), py::arg("den"), py::arg("bounds") = py::none())
      .def_property_readonly("domain", [](const RationalApproximant& r) {
        return std::make_pair(r.domain().a(), r.domain().b());
      })
      .def_property_readonly("num", [](const RationalApproximant& r) { return r.num().vec(); })
      .def_property_readonly("den", [](const RationalApproximant& r) { return r.den().vec(); })
      .def_property_readonly("bounds", &RationalApproximant::bounds)
      .def("__call__", [](const RationalApproximant& r, double x) { return eval(r, x); })
      .def("__call__", [](const RationalApproximant& r, const Array& x) {
        return map_array(x, [&](double t) { return eval(r, t); });
      })
      .def("numerator", [](const RationalApproximant& r, const Array& x) {
        return map_array(x, [&](double t) { return r.numerator(t); });
      })
      .def("denominator", [](const RationalApproximant& r, const Array& x) {
        return map_array(x, [&](double t) { return r.denominator(t); });
      })
      .def("uniform_error",
           [](const RationalApproximant& r, const Array& x, const Array& f) {
             return uniform_error(r, to_vector(f), Grid(to_vector(x)));
           },
           py::arg("x"), py::arg("f"))
      .def("denominator_change", [](const RationalApproximant& r, const Array& x) {
        return denominator_change(r, Grid(to_vector(x)));
      })
      .def("to_json", &dump_approximant)
      .def_static("from_json", &parse_approximant)
      .def(py::self == py::self);

  py::class_<FitRun>(m, "FitResult")
      .def_property_readonly("approximant", [](const FitRun& f) { return f.report.approximant; })
      .def_readonly("uniform_error", &FitRun::uniform_error)
      .def_readonly("c_r", &FitRun::c_r)
      .def_property_readonly("z_lower", [](const FitRun& f) { return f.report.z_lower; })
      .def_property_readonly("z_upper", [](const FitRun& f) { return f.report.z_upper; })
      .def_property_readonly("iterations", [](const FitRun& f) { return f.report.iterations; })
      .def_property_readonly("doublings", [](const FitRun& f) { return f.report.doublings; })
      .def_property_readonly("fit_grid", [](const FitRun& f) {
        return from_vector(f.problem.grid.points());
      })
      .def_readonly("seconds", &FitRun::seconds)
      .def("record_json", [](const FitRun& f) { return fit_record(f).dump(); });

  m.def("fit",
        [](const std::string& func, std::size_t n, std::size_t m_, double lbound, double ubound,
           bool positive, double eps, std::size_t fit_points, std::size_t eval_points,
           const std::string& grid) {
          const BoundSpec b{lbound, ubound, positive};
          return run_fit(builtin(func), n, m_, b, eps, fit_points, eval_points, grid_kind(grid));
        },
        py::arg("func"), py::arg("n"), py::arg("m"), py::arg("lbound") = 1.0,
        py::arg("ubound") = 1e6, py::arg("positive") = false, py::arg("eps") = 1e-12,
        py::arg("fit_points") = 400, py::arg("eval_points") = 1000,
        py::arg("grid") = "equidistant", py::call_guard<py::gil_scoped_release>(),
        "Fit a built-in function (f1 f2 f3 f4 filter bell relu) at degrees (n, m).");

  m.def("fit_samples",
        [](const Array& x, const Array& f, std::size_t n, std::size_t m_, double lbound,
           double ubound, bool positive, double eps) {
          std::vector<double> xs = to_vector(x);
          const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
          if (xs.empty()) throw InvalidArgument("no samples");
          FitProblem p{Domain(*lo, *hi), Grid(xs), to_vector(f), n, m_,
                       BoundSpec{lbound, ubound, positive}, eps};
          return fit(p).approximant;
        },
        py::arg("x"), py::arg("f"), py::arg("n"), py::arg("m"), py::arg("lbound") = 1.0,
        py::arg("ubound") = 1e6, py::arg("positive") = false, py::arg("eps") = 1e-12,
        "Fit sampled data directly; the fit grid is x itself.");

  m.def("builtin", [](const std::string& id, const Array& x) {
    const TestFunction f = builtin(id);
    return map_array(x, [&](double t) { return f(t); });
  });
  m.def("builtin_domain", [](const std::string& id) {
    const Domain d = builtin(id).domain;
    return std::make_pair(d.a(), d.b());
  });
  m.def("builtin_ids", &builtin_ids);

  m.def("cheb_eval",
        [](const std::vector<double>& c, const Array& x, std::pair<double, double> domain) {
          const Domain d = to_domain(domain);
          const ChebCoeffs cc(c);
          return map_array(x, [&](double t) { return clenshaw(cc, map_to_ref(d, t)); });
        },
        py::arg("coeffs"), py::arg("x"), py::arg("domain") = std::make_pair(-1.0, 1.0));
  m.def("cheb_nodes",
        [](std::size_t n, std::pair<double, double> domain) {
          return from_vector(cheb_nodes(to_domain(domain), n).points());
        },
        py::arg("n"), py::arg("domain") = std::make_pair(-1.0, 1.0));
  m.def("cheb_expand", [](const Array& values, std::size_t k) {
    return cheb_expand(to_vector(values), k).vec();
  });

  m.def("apply",
        [](const RationalApproximant& r, const Array& a, bool refine) {
          MatApplyOptions o;
          o.refine = refine;
          return from_matrix(rational_apply(r, to_matrix(a), o).result);
        },
        py::arg("r"), py::arg("a"), py::arg("refine") = false,
        "r(A) = q(A)^-1 p(A) for a square matrix A.");
  m.def("apply_vec",
        [](const RationalApproximant& r, const Array& a, const Array& v, bool refine) {
          MatApplyOptions o;
          o.refine = refine;
          return from_vector(rational_apply_vec(r, to_matrix(a), to_vector(v), o).result);
        },
        py::arg("r"), py::arg("a"), py::arg("v"), py::arg("refine") = false,
        "r(A) v without forming r(A).");
  m.def("normal_matrix",
        [](const Array& eigenvalues, std::uint64_t seed) {
          return from_matrix(make_normal_matrix({to_vector(eigenvalues), seed}));
        },
        py::arg("eigenvalues"), py::arg("seed") = 7,
        "Q diag(eigenvalues) Q^T with a seeded orthogonal Q.");
  m.def("cond_check",
        [](const RationalApproximant& r, const Array& eigenvalues) {
          const BoundSpec b = r.bounds().value_or(BoundSpec{});
          return cond_check(r, b, {to_vector(eigenvalues), 7});
        },
        "cond_2(q(A)) for a normal A with the given eigenvalues.");
}

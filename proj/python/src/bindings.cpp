#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "hxd/ahce.hpp"
#include "hxd/checks.hpp"
#include "hxd/datagen.hpp"
#include "hxd/experiments.hpp"
#include "hxd/gof.hpp"
#include "hxd/parallel.hpp"

namespace py = pybind11;
using namespace hxd;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampleMatrix to_samples(const Array& a) {
  if (a.ndim() == 1) {
    // a single column
    std::vector<double> v(a.data(), a.data() + a.shape(0));
    return SampleMatrix(static_cast<std::size_t>(a.shape(0)), 1, std::move(v));
  }
  if (a.ndim() != 2) throw std::invalid_argument("expected an (n, D) array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  std::vector<double> v(a.data(), a.data() + rows * cols);
  return SampleMatrix(rows, cols, std::move(v));
}

Array to_array(const SampleMatrix& s) {
  Array out({s.rows(), s.dim()});
  if (s.rows() * s.dim() > 0) std::memcpy(out.mutable_data(), s.row(0).data(), sizeof(double) * s.rows() * s.dim());
  return out;
}

SyntheticDist make_dist(const std::string& type, std::vector<double> a, std::vector<double> b, int dim, double dof,
                        double shift, const std::string& boundary) {
  SyntheticDist d;
  if (type == "uniform") d = Uniform{dim};
  else if (type == "product-beta") d = ProductBeta{std::move(a), std::move(b)};
  else if (type == "t-mapped") d = StudentTMapped{dof, dim};
  else if (type == "beta-plus-uniform")
    d = BetaPlusUniform{std::move(a), std::move(b), shift,
                        boundary == "truncate" ? BetaPlusUniform::Boundary::Truncate : BetaPlusUniform::Boundary::Clamp};
  else
    throw std::invalid_argument("unknown distribution '" + type + "'");
  validate(d);
  return d;
}

SmoothingPolicy make_policy(const std::string& name, double alpha, double nu, double scale_c,
                            std::optional<double> variance_c, std::optional<int> level) {
  if (name == "truncation-fourier") return TruncationFourier{alpha, nu, scale_c};
  if (name == "truncation-wavelet") return TruncationWavelet{alpha, nu, scale_c};
  if (name == "wahba") return Wahba{alpha, variance_c, level};
  throw std::invalid_argument("unknown policy '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive hyperbolic cross density estimation and goodness-of-fit testing";
  py::register_exception<OutOfCubeError>(m, "OutOfCubeError", PyExc_ValueError);

  m.def("set_threads", &set_thread_count, py::arg("count"), "0 selects all cores");

  py::class_<AhceModel>(m, "Model")
      .def_property_readonly("n", &AhceModel::n)
      .def_property_readonly("dim", &AhceModel::dim)
      .def_property_readonly("level", &AhceModel::level)
      .def_property_readonly("basis", [](const AhceModel& s) { return to_string(s.basis()); })
      .def_property_readonly("policy", [](const AhceModel& s) { return policy_name(s.policy()); })
      .def_property_readonly("size", [](const AhceModel& s) { return s.cross().size(); })
      .def_property_readonly("raw", [](const AhceModel& s) { return Array(s.raw().size(), s.raw().data()); })
      .def_property_readonly("coefficients",
                             [](const AhceModel& s) { return Array(s.coefficients().size(), s.coefficients().data()); })
      .def(
          "evaluate",
          [](const AhceModel& s, const Array& points) {
            const auto pts = to_samples(points);
            std::vector<double> v;
            {
              py::gil_scoped_release release;
              v = evaluate_many(s, pts);
            }
            return Array(v.size(), v.data());
          },
          py::arg("points"))
      .def(
          "sample", [](const AhceModel& s, std::size_t count, std::uint64_t seed) { return to_array(sample(s, count, seed)); },
          py::arg("count"), py::arg("seed") = 0)
      .def("save", [](const AhceModel& s, const std::string& path) { save_model(s, path); }, py::arg("path"))
      .def_static("load", &load_model, py::arg("path"))
      .def("__repr__", [](const AhceModel& s) {
        return "<hxd.Model " + to_string(s.basis()) + " D=" + std::to_string(s.dim()) + " l=" +
               std::to_string(s.level()) + " n=" + std::to_string(s.n()) + ">";
      });

  m.def(
      "draw",
      [](const std::string& dist, std::size_t n, std::uint64_t seed, std::vector<double> a, std::vector<double> b,
         int dim, double dof, double shift, const std::string& boundary) {
        return to_array(draw(make_dist(dist, std::move(a), std::move(b), dim, dof, shift, boundary), n, seed));
      },
      py::arg("dist"), py::arg("n"), py::arg("seed") = 0, py::arg("a") = std::vector<double>{},
      py::arg("b") = std::vector<double>{}, py::arg("dim") = 1, py::arg("dof") = 3.0, py::arg("shift") = 0.2,
      py::arg("boundary") = "clamp");

  m.def(
      "fit",
      [](const Array& samples, const std::string& basis, const std::string& policy, double alpha, double nu,
         double scale_c, std::optional<double> variance_c, std::optional<int> level) {
        const auto s = to_samples(samples);
        const auto p = make_policy(policy, alpha, nu, scale_c, variance_c, level);
        const auto kind = basis_from_string(basis);
        py::gil_scoped_release release;
        return fit(s, kind, p);
      },
      py::arg("samples"), py::arg("basis") = "fourier", py::arg("policy") = "wahba", py::arg("alpha") = 1.0,
      py::arg("nu") = 0.5, py::arg("scale_c") = 1.0, py::arg("variance_c") = py::none(), py::arg("level") = py::none());

  m.def(
      "gof_test",
      [](const Array& samples, const std::string& null, std::vector<double> a, std::vector<double> b,
         std::optional<int> level, const std::string& basis, int bootstrap, double significance, std::uint64_t seed,
         double alpha) {
        const auto s = to_samples(samples);
        const auto p0 = make_dist(null, std::move(a), std::move(b), static_cast<int>(s.dim()), 3.0, 0.2, "clamp");
        if (dist_dim(p0) != static_cast<int>(s.dim()))
          throw std::invalid_argument("null dimension does not match the sample");
        GofConfig cfg;
        cfg.basis = basis_from_string(basis);
        cfg.bootstrap_reps = bootstrap;
        cfg.significance = significance;
        cfg.seed = seed;
        cfg.alpha = alpha;
        cfg.level = level ? *level : gof_level(cfg, s.rows(), static_cast<int>(s.dim()));
        GofTestRun run;
        {
          py::gil_scoped_release release;
          run = run_test(s, null_density_for(p0, cfg.basis, *cfg.level), cfg);
        }
        py::dict out;
        out["n"] = run.n;
        out["dim"] = run.dim;
        out["level"] = run.level;
        out["statistic"] = run.statistic;
        out["threshold"] = run.threshold;
        out["reject"] = run.reject;
        out["z_score"] = run.z_score;
        out["sigma_hat"] = run.sigma_hat;
        out["seed"] = run.seed;
        return out;
      },
      py::arg("samples"), py::arg("null") = "uniform", py::arg("a") = std::vector<double>{},
      py::arg("b") = std::vector<double>{}, py::arg("level") = py::none(), py::arg("basis") = "haar",
      py::arg("bootstrap") = 1000, py::arg("significance") = 0.05, py::arg("seed") = 0, py::arg("alpha") = 1.0);

  m.def(
      "selfcheck",
      [](std::uint64_t seed) {
        py::list out;
        for (const auto& r : run_selfcheck({seed, false})) out.append(py::make_tuple(r.name, r.pass, r.detail));
        return out;
      },
      py::arg("seed") = 1);
}

// Python bindings for the main operations: norms, grids, the regularized
// solver, eigenpairs, and the threshold/barrier experiments.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "anisop/experiments.hpp"

namespace py = pybind11;
using namespace anisop;

namespace {

Vec to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

FinslerSpec norm_from_dict(const py::dict& d) {
  nlohmann::json j;
  for (auto item : d) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "kind")
      j[key] = py::cast<std::string>(item.second);
    else if (key == "dim")
      j[key] = py::cast<int>(item.second);
    else if (key == "A")
      j[key] = py::cast<std::vector<double>>(item.second);
    else
      j[key] = py::cast<double>(item.second);
  }
  return FinslerSpec::from_json(j);
}

py::dict json_to_dict(const nlohmann::json& j) {
  py::object loads = py::module_::import("json").attr("loads");
  return loads(j.dump());
}

DiscreteField field_from_array(const Grid& g, py::array_t<double> a) {
  auto buf = a.request();
  if (buf.ndim != 1 || buf.shape[0] != g.n_vertices())
    throw std::invalid_argument("field array must have one entry per vertex");
  DiscreteField u(g);
  const double* p = static_cast<const double*>(buf.ptr);
  const auto stride = buf.strides[0] / static_cast<py::ssize_t>(sizeof(double));
  for (int i = 0; i < g.n_vertices(); ++i) u.values[i] = p[i * stride];
  return u;
}

py::array_t<double> vec_to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> field_to_array(const DiscreteField& u) {
  return vec_to_array(u.values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "singular anisotropic p-Laplacian solver core";

  py::class_<FinslerSpec>(m, "FinslerSpec")
      .def_static("euclidean", &FinslerSpec::euclidean, py::arg("dim"))
      .def_static("smoothed_q", &FinslerSpec::smoothed_q, py::arg("dim"),
                  py::arg("q"), py::arg("delta") = 0.0)
      .def_static("from_dict", &norm_from_dict)
      .def_static(
          "ellipse",
          [](const std::vector<std::vector<double>>& rows) {
            const int n = static_cast<int>(rows.size());
            Mat A(n, n);
            for (int r = 0; r < n; ++r)
              for (int c = 0; c < n; ++c) A(r, c) = rows[r].at(c);
            return FinslerSpec::ellipse(A);
          })
      .def_property_readonly("dim", &FinslerSpec::dim)
      .def_property_readonly("approximate_homogeneous",
                             &FinslerSpec::approximate_homogeneous)
      .def("evaluate",
           [](const FinslerSpec& s, const std::vector<double>& xi) {
             return s.evaluate(to_vec(xi));
           })
      .def("gradient",
           [](const FinslerSpec& s, const std::vector<double>& xi) {
             Vec g = s.gradient(to_vec(xi));
             return std::vector<double>(g.data(), g.data() + g.size());
           })
      .def("flux",
           [](const FinslerSpec& s, double p, const std::vector<double>& xi) {
             Vec a = s.flux(p, to_vec(xi));
             return std::vector<double>(a.data(), a.data() + a.size());
           })
      .def("to_dict", [](const FinslerSpec& s) { return json_to_dict(s.to_json()); });

  m.def(
      "check_assumptions",
      [](const FinslerSpec& n, int samples, std::uint64_t seed) {
        return json_to_dict(check_assumptions(n, samples, seed).to_json());
      },
      py::arg("norm"), py::arg("n_samples") = 10000, py::arg("seed") = 0);

  m.def(
      "verify_vector_inequalities",
      [](const FinslerSpec& n, double p, int pairs, std::uint64_t seed) {
        return json_to_dict(
            verify_vector_inequalities(n, p, pairs, seed).to_json());
      },
      py::arg("norm"), py::arg("p"), py::arg("n_pairs") = 100000,
      py::arg("seed") = 0);

  py::class_<Grid>(m, "Grid")
      .def_property_readonly("n_vertices", &Grid::n_vertices)
      .def_property_readonly("h", [](const Grid& g) { return g.h; })
      .def_property_readonly("vertices",
                             [](const Grid& g) {
                               py::array_t<double> out(
                                   {g.n_vertices(), g.domain.dim});
                               double* p =
                                   static_cast<double*>(out.request().ptr);
                               for (int i = 0; i < g.n_vertices(); ++i)
                                 for (int a = 0; a < g.domain.dim; ++a)
                                   *p++ = g.vertices[i][a];
                               return out;
                             })
      .def_property_readonly("boundary_mask", [](const Grid& g) {
        std::vector<char> mask(g.n_vertices());
        for (int i = 0; i < g.n_vertices(); ++i) mask[i] = g.boundary_mask[i];
        return py::array_t<bool>(static_cast<py::ssize_t>(mask.size()),
                                 reinterpret_cast<const bool*>(mask.data()));
      });

  m.def(
      "build_grid",
      [](const std::vector<double>& lengths, int resolution) {
        const Domain d = lengths.size() == 1
                             ? Domain::interval(lengths[0])
                             : Domain::rectangle(lengths[0], lengths[1]);
        return build_grid(d, resolution);
      },
      py::arg("lengths"), py::arg("resolution"));

  m.def("distance_field",
        [](const Grid& g) { return field_to_array(distance_field(g)); });
  m.def("lumped_weights",
        [](const Grid& g) { return vec_to_array(lumped_mass(g).weights); });

  m.def("energy", [](const Grid& g, const FinslerSpec& n, double p,
                     py::array_t<double> u) {
    return energy(g, n, p, field_from_array(g, u));
  });
  m.def("energy_gradient", [](const Grid& g, const FinslerSpec& n, double p,
                              py::array_t<double> u) {
    return field_to_array(energy_gradient(g, n, p, field_from_array(g, u)));
  });
  m.def("seminorm_p", [](const Grid& g, const FinslerSpec& n, double p,
                         py::array_t<double> u) {
    return seminorm_p(g, n, p, field_from_array(g, u));
  });

  m.def(
      "first_eigenpair",
      [](const Grid& g, const FinslerSpec& n, double p, double tol,
         int max_iter) {
        const auto rep = first_eigenpair(g, n, p, tol, max_iter);
        py::dict out = json_to_dict(rep.to_json());
        out["phi1"] = field_to_array(rep.phi1);
        return out;
      },
      py::arg("grid"), py::arg("norm"), py::arg("p"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 200);

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def_static("from_json",
                  [](const std::string& text) {
                    return ProblemSpec::from_json(nlohmann::json::parse(text));
                  })
      .def("to_dict",
           [](const ProblemSpec& s) { return json_to_dict(s.to_json()); });

  m.def(
      "solve_regularized",
      [](const ProblemSpec& pr, const Grid& g, double eps) {
        const auto rep = solve_regularized(pr, g, eps);
        py::dict out = json_to_dict(rep.to_json());
        out["u"] = field_to_array(rep.u);
        return out;
      },
      py::arg("problem"), py::arg("grid"), py::arg("epsilon"));

  m.def(
      "solve_continuation",
      [](const ProblemSpec& pr, const Grid& g, std::vector<double> schedule) {
        const auto rep = solve_continuation(pr, g, schedule);
        py::dict out;
        out["saturation_flag"] = rep.saturation_flag;
        out["growth_exponent"] = rep.growth_exponent;
        out["aborted"] = rep.aborted;
        py::list semis;
        for (const auto& s : rep.steps) semis.append(s.seminorm);
        out["seminorms"] = semis;
        if (!rep.steps.empty()) out["u"] = field_to_array(rep.steps.back().u);
        return out;
      },
      py::arg("problem"), py::arg("grid"), py::arg("schedule"));

  m.def(
      "predict_existence",
      [](double p, double gamma, double m) {
        const auto r = predict_existence(p, gamma, m);
        return py::make_tuple(r.exists, r.threshold);
      },
      py::arg("p"), py::arg("gamma"),
      py::arg("m") = std::numeric_limits<double>::infinity());

  m.def("barrier_exponent", [](double p, double gamma) {
    const auto b = barrier_exponent(p, gamma);
    py::dict out;
    out["regime"] =
        b.regime == BarrierExponent::Regime::GammaGt1 ? "gamma_gt_1" : "gamma_le_1";
    out["eta"] = b.eta;
    out["t_interval"] = py::make_tuple(b.t_lo, b.t_hi);
    return out;
  });
}

#include "rmx/experiment.hpp"
#include "rmx/solver.hpp"
#include "rmx/spectral.hpp"
#include "rmx/wgan.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace rmx;

namespace {

LinearSphereGame make_game(const std::string& variant, const Matrix& a, const Vector& b,
                           double kappa) {
  if (variant == "example1") return {ExampleVariant::Example1, a, b};
  if (variant == "example2") return {ExampleVariant::Example2, a, b, kappa};
  if (variant == "example3") return {ExampleVariant::Example3, a, b};
  throw std::invalid_argument("unknown variant: " + variant);
}

py::dict blocks_to_dict(const IntrinsicBlocks& blocks) {
  py::dict d;
  d["a"] = blocks.a;
  d["b"] = blocks.b;
  d["c"] = blocks.c;
  d["basis_x"] = blocks.basis_x;
  d["basis_y"] = blocks.basis_y;
  d["sym_residual_a"] = blocks.sym_residual_a;
  d["sym_residual_c"] = blocks.sym_residual_c;
  return d;
}

IntrinsicBlocks blocks_from_matrices(const Matrix& a, const Matrix& b, const Matrix& c) {
  IntrinsicBlocks blocks;
  blocks.a = a;
  blocks.b = b;
  blocks.c = c;
  return blocks;
}

py::dict cert_to_dict(const ConvergenceCertificate& cert) {
  py::dict d;
  d["tau_threshold"] = cert.tau_threshold;
  d["l_const"] = cert.l_const;
  d["mu_const"] = cert.mu_const;
  d["recommended_tau"] = cert.recommended_tau;
  d["recommended_gamma"] = cert.recommended_gamma;
  d["rate_bound"] = cert.rate_bound;
  d["valid"] = cert.valid;
  d["status"] = cert.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Riemannian min-max optimization toolkit (C++ core)";

  // linear algebra
  m.def("svd", [](const Matrix& a) {
    const auto s = linalg::svd(a);
    return py::make_tuple(s.u, s.sigma, s.v_t);
  });
  m.def("pseudo_inverse", &linalg::pseudo_inverse);
  m.def("sym_eig", [](const Matrix& a) {
    const auto e = linalg::sym_eig(a);
    return py::make_tuple(e.eigenvalues, e.eigenvectors);
  });
  m.def("eigenvalues_general", &linalg::eigenvalues_general);
  m.def("operator_norm", &linalg::operator_norm);
  m.def("spectral_radius", &linalg::spectral_radius);

  // manifolds
  py::class_<Manifold>(m, "Manifold")
      .def_static("euclidean", &Manifold::euclidean)
      .def_static("sphere", &Manifold::sphere)
      .def_static("stiefel", &Manifold::stiefel)
      .def_static("product",
                  [](const std::vector<Manifold>& fs) { return Manifold::product(fs); })
      .def_property_readonly("ambient_dim", &Manifold::ambient_dim)
      .def_property_readonly("dim", &Manifold::dim)
      .def("__repr__", &Manifold::describe);

  m.def("project_tangent", [](const Manifold& mf, const Vector& p, const Vector& v) {
    return project_tangent(make_point(mf, p), v).ambient;
  });
  m.def("retract", [](const Manifold& mf, const Vector& p, const Vector& t) {
    const ManifoldPoint pt = make_point(mf, p);
    return retract(pt, {pt, t}).ambient;
  });
  m.def("tangent_basis",
        [](const Manifold& mf, const Vector& p) { return tangent_basis(make_point(mf, p)); });
  m.def("distance_surrogate", [](const Manifold& mf, const Vector& p, const Vector& q) {
    return distance_surrogate(make_point(mf, p), make_point(mf, q));
  });

  // games
  py::class_<LinearSphereGame>(m, "LinearSphereGame")
      .def(py::init(&make_game), py::arg("variant"), py::arg("a"), py::arg("b"),
           py::arg("kappa") = 0.0)
      .def("value",
           [](const LinearSphereGame& g, const Vector& x, const Vector& y) {
             return g.value(g.make_point(x, y));
           })
      .def("gradients",
           [](const LinearSphereGame& g, const Vector& x, const Vector& y) {
             const GamePoint p = g.make_point(x, y);
             return py::make_tuple(g.ambient_grad_x(p), g.ambient_grad_y(p));
           })
      .def("riemannian_grad_norms",
           [](const LinearSphereGame& g, const Vector& x, const Vector& y) {
             const auto grads = riemannian_grads(g, g.make_point(x, y));
             return py::make_tuple(grads.delta.ambient.norm(), grads.eta.ambient.norm());
           })
      .def("equilibrium",
           [](const LinearSphereGame& g, double newton_tol) {
             const GamePoint eq = g.variant() == ExampleVariant::Example2
                                      ? equilibrium_example2(g, newton_tol)
                                      : closed_form_equilibrium(g);
             return py::make_tuple(eq.x.ambient, eq.y.ambient);
           },
           py::arg("newton_tol") = 1e-12)
      .def("least_squares_point", [](const LinearSphereGame& g) {
        const GamePoint p = g.least_squares_point();
        return py::make_tuple(p.x.ambient, p.y.ambient);
      });

  m.def("intrinsic_blocks",
        [](const LinearSphereGame& g, const Vector& x, const Vector& y, double crit_tol) {
          return blocks_to_dict(intrinsic_blocks(g, g.make_point(x, y), crit_tol));
        },
        py::arg("game"), py::arg("x"), py::arg("y"), py::arg("crit_tol") = 1e-6);

  m.def("classify_equilibrium",
        [](const LinearSphereGame& g, const Vector& x, const Vector& y, double grad_tol,
           double pd_tol) {
          const Classification c = classify_equilibrium(g, g.make_point(x, y), grad_tol, pd_tol);
          py::dict d;
          d["class"] = to_string(c.cls);
          d["grad_norm_x"] = c.grad_norm_x;
          d["grad_norm_y"] = c.grad_norm_y;
          d["lambda_min_a"] = c.lambda_min_a;
          d["lambda_min_c"] = c.lambda_min_c;
          d["lambda_min_schur"] = c.lambda_min_schur;
          return d;
        },
        py::arg("game"), py::arg("x"), py::arg("y"), py::arg("grad_tol") = 1e-6,
        py::arg("pd_tol") = 1e-8);

  // spectral
  m.def("assemble_mg", [](const Matrix& a, const Matrix& b, const Matrix& c, double tau) {
    return assemble_mg(blocks_from_matrices(a, b, c), tau);
  });
  m.def("assemble_ms",
        [](const Matrix& a, const Matrix& b, const Matrix& c, double tau, double theta) {
          return assemble_ms(blocks_from_matrices(a, b, c), tau, theta);
        });
  m.def("gamma_dot", &gamma_dot);
  m.def("gda_certificate", [](const Matrix& a, const Matrix& b, const Matrix& c) {
    return cert_to_dict(gda_certificate(blocks_from_matrices(a, b, c)));
  });
  m.def("dne_certificate", [](const Matrix& a, const Matrix& b, const Matrix& c) {
    return cert_to_dict(dne_certificate(blocks_from_matrices(a, b, c)));
  });
  m.def("sga_certificate", [](const Matrix& a, const Matrix& b, const Matrix& c, double theta) {
    return cert_to_dict(sga_certificate(blocks_from_matrices(a, b, c), theta));
  });

  // solvers
  m.def("run_solver",
        [](const LinearSphereGame& g, const Vector& x0, const Vector& y0, const std::string& mode,
           double tau, double gamma, double theta, std::size_t max_iters,
           std::size_t record_every, bool reference_equilibrium) {
          SolverConfig cfg;
          if (mode == "gda") {
            cfg.mode = SolverMode::GDA;
          } else if (mode == "sga") {
            cfg.mode = SolverMode::SGA;
          } else if (mode == "asymp_sga") {
            cfg.mode = SolverMode::AsympSGA;
          } else {
            throw std::invalid_argument("unknown mode: " + mode);
          }
          cfg.tau = tau;
          cfg.gamma = gamma;
          cfg.theta = theta;
          cfg.max_iters = max_iters;
          cfg.record_every = record_every;
          std::optional<GamePoint> ref;
          if (reference_equilibrium) ref = closed_form_equilibrium(g);
          const Trajectory traj = run(g, g.make_point(x0, y0), cfg, ref);
          py::dict d;
          std::vector<double> ts, fs, gx, gy, dist;
          for (const auto& row : traj.rows) {
            ts.push_back(static_cast<double>(row.t));
            fs.push_back(row.f);
            gx.push_back(row.grad_norm_x);
            gy.push_back(row.grad_norm_y);
            if (row.dist) dist.push_back(*row.dist);
          }
          d["t"] = ts;
          d["f"] = fs;
          d["grad_norm_x"] = gx;
          d["grad_norm_y"] = gy;
          d["dist"] = dist;
          d["diverged"] = traj.diverged;
          return d;
        },
        py::arg("game"), py::arg("x0"), py::arg("y0"), py::arg("mode") = "gda",
        py::arg("tau") = 1.0, py::arg("gamma") = 1e-3, py::arg("theta") = 0.0,
        py::arg("max_iters") = 1000, py::arg("record_every") = 1,
        py::arg("reference_equilibrium") = true);

  // wgan
  py::class_<wgan::GaussianWganSpec>(m, "GaussianWganSpec")
      .def(py::init<>())
      .def_readwrite("sigma_diag", &wgan::GaussianWganSpec::sigma_diag)
      .def_readwrite("d", &wgan::GaussianWganSpec::d)
      .def_readwrite("p", &wgan::GaussianWganSpec::p)
      .def_readwrite("k", &wgan::GaussianWganSpec::k)
      .def_readwrite("eps", &wgan::GaussianWganSpec::eps);

  m.def("discriminator", &wgan::discriminator);
  m.def("wgan_minibatch_grads",
        [](const wgan::GaussianWganSpec& spec, const Matrix& a_x, const Matrix& w,
           const Vector& v, const Matrix& data, const Matrix& z) {
          const auto g = wgan::minibatch_value_and_grads(spec, {a_x, w, v}, data, z);
          py::dict d;
          d["f_hat"] = g.f_hat;
          d["grad_a"] = g.grad_a;
          d["grad_w"] = g.grad_w;
          d["grad_v"] = g.grad_v;
          return d;
        });
  m.def("wgan_angle", [](const wgan::GaussianWganSpec& spec, const Matrix& a_x, const Matrix& w,
                         const Vector& v, const Matrix& data, const Matrix& z) {
    return wgan::angle(spec, {a_x, w, v}, data, z);
  });
  m.def("covariance_error", &wgan::covariance_error);
  m.def("emd", &wgan::emd);
  m.def("wgan_pretrain",
        [](const wgan::GaussianWganSpec& spec, std::uint64_t seed, std::size_t iters, double tau,
           double gamma, Index batch_size) {
          const auto result = wgan::init_pretrain(spec, seed, iters, tau, gamma, batch_size);
          py::dict d;
          d["a_x"] = result.point.a_x;
          d["w"] = result.point.w;
          d["v"] = result.point.v;
          d["diverged"] = result.diverged;
          return d;
        },
        py::arg("spec"), py::arg("seed"), py::arg("iters"), py::arg("tau") = 100.0,
        py::arg("gamma") = 2e-4, py::arg("batch_size") = 1000);

  m.attr("__version__") = "0.1.0";
}

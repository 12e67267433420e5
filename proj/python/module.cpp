#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mochlab/error.hpp"
#include "mochlab/estimates.hpp"

namespace py = pybind11;
using namespace mochlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

RealField field_from(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array of samples");
  std::vector<double> s(a.data(), a.data() + a.size());
  const Grid g = Grid::make(s.size());
  return RealField(g, std::move(s));
}

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }
Array to_array(const RealField& f) { return to_array(f.values()); }

py::dict norm_series_dict(const std::vector<NormSample>& series) {
  std::vector<double> t, a, w, linf;
  for (const auto& s : series) {
    t.push_back(s.t);
    a.push_back(s.b0_inf_1);
    w.push_back(s.weighted);
    linf.push_back(s.linf);
  }
  py::dict d;
  d["t"] = to_array(t);
  d["B0inf1"] = to_array(a);
  d["B0infinf1_weighted"] = to_array(w);
  d["Linf"] = to_array(linf);
  return d;
}

py::dict breakdown_dict(const RateBreakdown& b) {
  py::dict d;
  d["source"] = b.source;
  d["linear"] = b.linear;
  d["stretch"] = b.stretch;
  d["commutator"] = b.commutator;
  d["dominance_margin"] = b.dominance_margin();
  return d;
}

}  // namespace

PYBIND11_MODULE(_mochlab, m) {
  m.doc() = "Besov-space diagnostics and solver for the modified Camassa-Holm equation";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def(
      "norms",
      [](const Array& samples, bool refined) {
        const auto u = field_from(samples);
        const DyadicPartition part(u.grid());
        const auto prof = refined ? norm_profile_refined(part, u) : norm_profile(part, u);
        py::dict d;
        d["B0inf1"] = prof.b0_inf_1();
        d["B0infinf1_weighted"] = prof.weighted().value;
        d["Linf"] = refined ? refined_sup_norm(to_spectral(u)) : u.sup_norm();
        d["j"] = prof.j_values;
        d["block_sup_norms"] = to_array(prof.block_sup_norms);
        return d;
      },
      py::arg("samples"), py::arg("refined") = true,
      "Littlewood-Paley profile of samples on the 2*pi-periodic equispaced grid.");

  m.def(
      "gamma0",
      [](int N, const std::string& corrector, std::optional<std::size_t> points) {
        const Grid g = points ? Grid::make(*points) : inflation_grid(N);
        const auto d = build_gamma0(DyadicPartition(g), N, parse_corrector_mode(corrector));
        py::dict out;
        out["samples"] = to_array(d.gamma0);
        out["B0inf1"] = d.norm_b0_inf_1;
        out["B0infinf1_weighted"] = d.norm_weighted;
        out["square_B0inf1"] = d.norm_square_b0_inf_1;
        out["below_asymptotic_range"] = d.below_asymptotic_range;
        return out;
      },
      py::arg("N"), py::arg("corrector") = "regular", py::arg("points") = py::none(),
      "Inflation datum at frequency parameter N; points defaults to 2^(N+8).");

  m.def(
      "rhs",
      [](const Array& samples, double lambda, bool dealias_on) { return to_array(rhs(field_from(samples), lambda, dealias_on)); },
      py::arg("samples"), py::arg("lam") = 1.0, py::arg("dealias") = true);

  m.def(
      "solve",
      [](const Array& samples, double lambda, double dt, double T, bool dealias_on, int record_every,
         bool refine_norms) {
        const auto u0 = field_from(samples);
        MochParams p;
        p.lambda = lambda;
        p.dt = dt;
        p.t_final = T;
        p.dealias_on = dealias_on;
        p.record_every = record_every;
        p.refine_norms = refine_norms;
        const auto tr = [&] {
          py::gil_scoped_release release;
          return solve(u0, DyadicPartition(u0.grid()), p);
        }();
        py::dict d;
        d["final"] = to_array(tr.states.back());
        d["norm_series"] = norm_series_dict(tr.norm_series);
        d["steps"] = tr.steps_taken;
        d["truncated"] = tr.truncated;
        d["truncation_reason"] = tr.truncation_reason;
        return d;
      },
      py::arg("samples"), py::arg("lam") = 1.0, py::arg("dt") = 1e-4, py::arg("T") = 0.1, py::arg("dealias") = true,
      py::arg("record_every") = 1, py::arg("refine_norms") = false);

  m.def(
      "ensemble",
      [](std::size_t members, std::uint64_t first_seed, std::size_t points, std::size_t max_mode, double decay,
         double lambda) {
        EnsembleSpec s;
        s.members = members;
        s.first_seed = first_seed;
        s.grid_size = points;
        s.max_mode = max_mode;
        s.decay = decay;
        s.lambda = lambda;
        const auto e = [&] {
          py::gil_scoped_release release;
          return run_ensemble(s);
        }();
        py::dict d;
        for (std::size_t i = 0; i < e.lemma_ids.size(); ++i) d[py::str(e.lemma_ids[i])] = e.max_ratio[i];
        return d;
      },
      py::arg("members") = 100, py::arg("first_seed") = 1, py::arg("points") = 1024, py::arg("max_mode") = 64,
      py::arg("decay") = 1.0, py::arg("lam") = 1.0, "Max ratio per inequality id over a seeded ensemble.");

  m.def(
      "scaling_sweep",
      [](const std::vector<int>& Ns, const std::string& corrector) {
        const auto s = datum_scaling_sweep(Ns, parse_corrector_mode(corrector));
        py::dict d;
        std::vector<double> a, w, b;
        for (const auto& r : s.rows) {
          a.push_back(r.norm_b0_inf_1);
          w.push_back(r.norm_weighted);
          b.push_back(r.norm_square_b0_inf_1);
        }
        d["N"] = Ns;
        d["B0inf1"] = to_array(a);
        d["B0infinf1_weighted"] = to_array(w);
        d["square_B0inf1"] = to_array(b);
        d["exponent_square"] = s.exponent_square;
        d["exponent_weighted"] = s.exponent_weighted;
        d["exponent_B0inf1"] = s.exponent_b0_inf_1;
        return d;
      },
      py::arg("N"), py::arg("corrector") = "regular");

  m.def(
      "inflation_run",
      [](int N, double lambda, double base_dt, int samples) {
        InflationPolicy pol;
        pol.lambda = lambda;
        pol.base_dt = base_dt;
        pol.samples = samples;
        const auto r = [&] {
          py::gil_scoped_release release;
          return inflation_run(N, pol);
        }();
        py::dict d;
        d["N"] = r.N;
        d["T"] = r.T;
        d["dt"] = r.dt;
        d["amplification"] = r.amplification;
        d["initial_slope"] = r.initial_slope;
        d["sup_B0inf1"] = r.sup_norm;
        d["t0"] = r.t0;
        d["weighted_ceiling"] = r.weighted_ceiling;
        d["breakdown"] = breakdown_dict(r.breakdown);
        d["truncated"] = r.truncated;
        d["norm_series"] = norm_series_dict(r.norm_series);
        return d;
      },
      py::arg("N"), py::arg("lam") = 1.0, py::arg("base_dt") = 1e-4, py::arg("samples") = 100);
}

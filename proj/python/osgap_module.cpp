#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "osgap/cli.hpp"
#include "osgap/counterexample.hpp"
#include "osgap/game.hpp"
#include "osgap/haagerup.hpp"
#include "osgap/teleport.hpp"
#include "osgap/weyl.hpp"

namespace py = pybind11;
using namespace osgap;

namespace {

py::dict certificate_dict(const NormCertificate& c) {
  py::list steps;
  for (const auto& s : c.provenance()) {
    py::dict d;
    d["name"] = s.name;
    d["inputs"] = s.inputs;
    d["anchor"] = s.anchor;
    d["residual"] = s.residual;
    d["tolerance"] = s.tolerance;
    d["kind"] = to_string(s.kind);
    d["pass"] = s.passed();
    steps.append(d);
  }
  py::dict out;
  out["norm_name"] = c.norm_name();
  out["direction"] = to_string(c.direction());
  out["value"] = c.value();
  out["tolerance"] = c.tolerance();
  out["digest"] = digest_hex(c.digest());
  out["valid"] = c.valid();
  out["provenance"] = steps;
  return out;
}

py::dict chain_dict(const HaagerupChainValue& v) {
  py::list stages;
  for (const auto& s : v.stages) {
    py::dict d;
    d["name"] = s.name;
    d["aggregation"] = to_string(s.aggregation);
    d["values"] = s.values;
    stages.append(d);
  }
  py::dict out;
  out["value"] = v.value;
  out["stages"] = stages;
  return out;
}

}  // namespace

PYBIND11_MODULE(_osgap, m) {
  m.doc() = "Operator space gap toolkit";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);

  m.def("is_prime", &is_prime, py::arg("n"));
  m.def("op_norm", &op_norm, py::arg("m"));

  py::class_<WeylFamily>(m, "WeylFamily")
      .def(py::init<int>(), py::arg("n"))
      .def_property_readonly("dim", &WeylFamily::dim)
      .def_property_readonly("omega", &WeylFamily::omega)
      .def("clock", &WeylFamily::clock)
      .def("shift", &WeylFamily::shift)
      .def("weyl", &WeylFamily::weyl, py::arg("k"), py::arg("l"))
      .def("teleportation_residual",
           [](const WeylFamily& f, const Vector& h) { return teleportation_residual(f, h); }, py::arg("h"))
      .def("frame_residual",
           [](const WeylFamily& f, const Matrix& rho) { return rank_one_frame_residual(f, rho); }, py::arg("rho"))
      .def("j_factorization_residual",
           [](const WeylFamily& f, const Matrix& rho) { return j_factorization_residual(f, rho); },
           py::arg("rho"))
      .def("apply_j", [](const WeylFamily& f, const Matrix& rho) { return apply_j(f, rho); }, py::arg("rho"))
      .def("apply_w", [](const WeylFamily& f, const Matrix& rho) { return apply_w(f, rho); }, py::arg("rho"));

  m.def("bell_gram", [](int n) { return bell_basis(make_weyl_family(n)).gram(); }, py::arg("n"));
  m.def("bell_vectors", [](int n) { return bell_basis(make_weyl_family(n)).vectors; }, py::arg("n"));

  py::class_<LabeledTensor>(m, "LabeledTensor")
      .def_property_readonly("nnz", &LabeledTensor::nnz)
      .def_property_readonly("arity", &LabeledTensor::index_arity)
      .def_property_readonly("factor_kinds",
                             [](const LabeledTensor& t) {
                               std::vector<std::string> out;
                               for (const auto& f : t.factors()) out.push_back(to_string(f.kind));
                               return out;
                             })
      .def("entries", [](const LabeledTensor& t) {
        std::vector<std::pair<Index, Complex>> out(t.entries().begin(), t.entries().end());
        return out;
      })
      .def("at", &LabeledTensor::at, py::arg("index"))
      .def("to_sparse", [](const LabeledTensor& t) {
        std::ostringstream os;
        write_sparse(os, t);
        return os.str();
      });

  m.def("pair", &pair, py::arg("t"), py::arg("s"));
  m.def("build_eta", &build_eta, py::arg("n"), py::arg("allow_composite") = false);
  m.def("build_p", &build_p, py::arg("n"));
  m.def("build_beta", &build_beta, py::arg("n"), py::arg("allow_composite") = false);
  m.def("build_q", &build_q, py::arg("n"), py::arg("allow_composite") = false);
  m.def("transfer_pairing", [](int n) {
    const auto r = blockwise_transfer_pairing(n);
    return py::make_tuple(r.value, r.max_block_residual, r.blocks_checked);
  }, py::arg("n"));

  m.def("chain_norm", [](const LabeledTensor& t) { return chain_dict(chain_norm(t)); }, py::arg("t"));
  m.def("chsh_chain_norm", [](int n) { return chain_dict(xi_chain_norm(BijectionFamilyFunction::chsh(n))); },
        py::arg("n"));
  m.def("balanced_upper_bound", [](const LabeledTensor& t) { return balanced_upper_bound(t).value; },
        py::arg("t"));

  m.def("chsh_upper_bound", [](int n) {
    const auto b = chsh_upper_bound(n);
    return py::make_tuple(b.sharp, b.stated);
  }, py::arg("n"));
  m.def("fourier_norm", [](int n, int k) { return fourier_matrix(n, k).norm; }, py::arg("n"), py::arg("k"));
  m.def("sample_strategy_value", [](int n, int d, std::uint64_t seed) {
    return evaluate_strategy(build_eta(n), sample_strategy(n, d, d, seed));
  }, py::arg("n"), py::arg("d"), py::arg("seed"));

  m.def("certify_lower", [](int n) { return certificate_dict(certify_lower(n)); }, py::arg("n"));
  m.def("certify_lower_transfer", [](int n) { return certificate_dict(certify_lower_transfer(n)); },
        py::arg("n"));
  m.def("certify_upper", [](int n, int samples, std::uint64_t seed, int local_dim) {
    std::optional<NormCertificate> c;
    {
      py::gil_scoped_release release;
      c = certify_upper(n, samples, seed, local_dim);
    }
    return certificate_dict(*c);
  }, py::arg("n"), py::arg("samples") = 100, py::arg("seed") = 0, py::arg("local_dim") = 0);

  m.def("violation_report", [](std::vector<int> ns, int samples, std::uint64_t seed) {
    ViolationReport r;
    {
      py::gil_scoped_release release;
      r = violation_report(ns, samples, seed);
    }
    py::list rows;
    for (const auto& row : r.rows) {
      py::dict d;
      d["n"] = row.n;
      d["lower"] = row.lower;
      d["upper_stated"] = row.upper_stated;
      d["upper_sharp"] = row.upper_sharp;
      d["ratio"] = row.ratio;
      d["empirical_max"] = row.empirical_max;
      d["all_checks_passed"] = row.all_checks_passed;
      d["certified"] = row.certified;
      rows.append(d);
    }
    py::list certs;
    for (const auto& c : r.certificates) certs.append(certificate_dict(c));
    py::dict out;
    out["rows"] = rows;
    out["certificates"] = certs;
    out["failures"] = r.failures;
    return out;
  }, py::arg("ns"), py::arg("samples") = 100, py::arg("seed") = 0);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv{"osgap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"));
}

#include "osgap/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "osgap/counterexample.hpp"
#include "osgap/game.hpp"
#include "osgap/haagerup.hpp"
#include "osgap/parallel.hpp"
#include "osgap/teleport.hpp"
#include "osgap/weyl.hpp"

namespace osgap {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Check {
  std::string name;
  std::string anchor;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass() const { return residual <= tolerance; }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string brief(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string tagged(const std::string& name, int n) { return name + " [n=" + std::to_string(n) + "]"; }

Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

std::vector<Check> weyl_suite(int n) {
  const WeylFamily fam(n);
  const Matrix id = Matrix::Identity(n, n);
  double comm = (fam.clock() * fam.shift() - fam.omega() * fam.shift() * fam.clock()).norm();
  double unitary = 0.0, closed = 0.0, braid = 0.0;
  Matrix xk = id;
  for (int k = 0; k < n; ++k) {
    Matrix zl = id;
    for (int l = 0; l < n; ++l) {
      const Matrix& t = fam.weyl(k, l);
      unitary = std::max(unitary, (t.adjoint() * t - id).norm());
      closed = std::max(closed, (xk * zl - t).norm());
      zl = fam.shift() * zl;
    }
    xk = fam.clock() * xk;
  }
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int k2 = 0; k2 < n; ++k2)
        for (int l2 = 0; l2 < n; ++l2) {
          const Matrix& a = fam.weyl(k, l);
          const Matrix& b = fam.weyl(k2, l2);
          const Complex w = fam.phase(static_cast<long long>(l2) * k - static_cast<long long>(l) * k2);
          braid = std::max(braid, (a * b - w * b * a).norm());
        }
  return {{tagged("weyl commutation XZ = w ZX", n), "XZ = w ZX", comm, tol::kAlgebraic},
          {tagged("weyl unitarity", n), "T_kl^dag T_kl = 1", unitary, tol::kAlgebraic},
          {tagged("weyl closed form", n), "T_kl = X^k Z^l", closed, tol::kAlgebraic},
          {tagged("weyl braiding", n), "T_kl T_k'l' = w^{l'k - lk'} T_k'l' T_kl", braid, tol::kAlgebraic}};
}

std::vector<Check> bell_suite(int n, std::uint64_t seed) {
  const WeylFamily fam(n);
  const BellBasis basis = bell_basis(fam);
  const int n2 = n * n;
  std::mt19937_64 rng(derive_seed(seed, 0x62656c6cULL + static_cast<std::uint64_t>(n)));
  Vector h = random_matrix(rng, n, 1).col(0);
  Matrix g = random_matrix(rng, n, n);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return {{tagged("Bell basis Gram = I", n), "<eta_kl, eta_k'l'> = delta", (basis.gram() - Matrix::Identity(n2, n2)).norm(),
           tol::kAlgebraic},
          {tagged("teleportation identity", n), "h (x) phi = (1/sqrt n) sum eta_kl (x) T_kl^dag h",
           teleportation_residual(fam, h), tol::kAlgebraic},
          {tagged("frame identity", n), "rho (x) Phi = (1/n) sum |eta_kl><eta_k'l'| (x) T_kl^dag rho T_k'l'",
           rank_one_frame_residual(fam, rho), tol::kFrame}};
}

std::vector<Check> transfer_suite(int n, std::uint64_t seed) {
  const WeylFamily fam(n);
  const TransferChecks tc = transfer_checks(fam);
  std::mt19937_64 rng(derive_seed(seed, 0x6a6a6aULL + static_cast<std::uint64_t>(n)));
  const Matrix rho = random_matrix(rng, n, n);
  return {{tagged("J = (P (x) Id) o i", n), "J(rho)_kl = (eta_kl (x) 1)^dag (rho (x) Phi) (eta_kl (x) 1)",
           j_factorization_residual(fam, rho), tol::kFrame},
          {tagged("J trace bookkeeping", n), "tr J(rho)_kl = tr(rho) / n", tc.j_trace, tol::kAlgebraic},
          {tagged("W unital", n), "W(1) = 1 (x) 1", tc.w_unital, tol::kAlgebraic},
          {tagged("W completely positive", n), "Choi(T^T . conj(T)) >= 0", std::max(0.0, -tc.w_choi_min_eig),
           -tol::kPsdFloor},
          {tagged("Bell projection adjoint unital", n), "P^*(1) = sum |eta_kl><eta_kl| = 1", tc.p_adjoint_unital,
           tol::kAlgebraic},
          {tagged("Bell projection adjoint CP", n), "P^*(e_kl) = |eta_kl><eta_kl| >= 0",
           std::max(0.0, -tc.p_adjoint_choi_min_eig), -tol::kPsdFloor}};
}

std::vector<Check> game_suite(int n, int samples, std::uint64_t seed, int dim) {
  std::vector<Check> out;
  double fourier = 0.0;
  for (int k = 1; k < n; ++k)
    fourier = std::max(fourier, std::abs(fourier_matrix(n, k).norm - std::sqrt(static_cast<double>(n))));
  out.push_back({tagged("Fourier matrix norms", n), "||Phi_k|| = sqrt(n), k != 0", fourier, tol::kSpectral});

  const int d = dim > 0 ? dim : n;
  struct Stat {
    double psd = 0, complete = 0, weighted = 0, residual = 0;
  };
  const auto stats = parallel_map(static_cast<size_t>(samples), [&](size_t i) {
    const Strategy s = sample_strategy(n, d, d, derive_seed(seed, i));
    const Povm pa = povm_from_contraction(s.alice);
    const Povm pb = povm_from_contraction(s.bob);
    return Stat{std::min(povm_min_eigenvalue(pa), povm_min_eigenvalue(pb)),
                std::min(povm_completeness_gap(pa), povm_completeness_gap(pb)),
                std::max(max_fourier_weighted_norm(pa), max_fourier_weighted_norm(pb)),
                fourier_decomposition_residual(pa, pb, Composition::TensorSplit)};
  });
  Stat worst{INFINITY, INFINITY, 0, 0};
  for (const auto& s : stats) {
    worst.psd = std::min(worst.psd, s.psd);
    worst.complete = std::min(worst.complete, s.complete);
    worst.weighted = std::max(worst.weighted, s.weighted);
    worst.residual = std::max(worst.residual, s.residual);
  }
  if (samples > 0) {
    out.push_back({tagged("POVM elements positive", n), "E_x^a >= 0", std::max(0.0, -worst.psd), -tol::kPsdFloor});
    out.push_back({tagged("POVM completeness", n), "sum_a E_x^a <= 1", std::max(0.0, -worst.complete), -tol::kPsdFloor});
    out.push_back({tagged("Fourier-weighted POVM contraction", n), "||sum_a w^{ka} E_x^a|| <= 1",
                   std::max(0.0, worst.weighted - 1.0), tol::kAlgebraic});
    out.push_back({tagged("Fourier decomposition residual", n),
                   "sum_{a+b=xy} E (x) F = (1/n) sum_k sum_{xy} w^{-kxy} A_x^k (x) B_y^k", worst.residual,
                   tol::kContraction});
  }
  return out;
}

std::vector<Check> duality_suite(int n) {
  const LabeledTensor p = build_p(n);
  return {{tagged("pairing <eta_n, P_n> = n", n), "n = <eta_n, P_n>",
           std::abs(pair(build_eta(n), p) - static_cast<double>(n)), tol::kPairing},
          {tagged("chain norm of P_n = 1", n), "||P_n||_{R (x)h S_inf (x)h S_inf} = 1",
           std::abs(chain_norm(p).value - 1.0), tol::kAlgebraic},
          {tagged("chain norm of P_n^T = 1", n), "||P_n^T||_{R (x)h S_inf (x)h S_inf} = 1",
           std::abs(chain_norm(transpose_tail(p)).value - 1.0), tol::kAlgebraic}};
}

Json check_json(const Check& c) {
  return Json{{"name", c.name}, {"paper_anchor", c.anchor}, {"residual", c.residual}, {"tolerance", c.tolerance},
              {"pass", c.pass()}};
}

Json config_json(const RunConfig& c) {
  Json j{{"command", to_string(c.command)}, {"n", c.n_list},       {"samples", c.samples},
         {"seed", c.seed},                  {"dim", c.local_dim},   {"format", to_string(c.format)}};
  if (!c.dump_object.empty()) j["dump"] = c.dump_object;
  if (!c.replay_path.empty()) j["replay"] = c.replay_path;
  return j;
}

Json certificate_json(const NormCertificate& c) {
  Json steps = Json::array();
  for (const auto& s : c.provenance())
    steps.push_back(Json{{"name", s.name},
                         {"inputs", s.inputs},
                         {"paper_anchor", s.anchor},
                         {"kind", to_string(s.kind)},
                         {"residual", s.residual},
                         {"tolerance", s.tolerance},
                         {"pass", s.passed()}});
  return Json{{"norm_name", c.norm_name()}, {"direction", to_string(c.direction())},
              {"value", c.value()},         {"tolerance", c.tolerance()},
              {"valid", c.valid()},         {"digest", digest_hex(c.digest())},
              {"provenance", steps}};
}

std::vector<Check> steps_as_checks(const NormCertificate& c) {
  std::vector<Check> out;
  for (const auto& s : c.provenance())
    if (s.kind == StepKind::Numeric) out.push_back({s.name + " (" + s.inputs + ")", s.anchor, s.residual, s.tolerance});
  return out;
}

struct Result {
  Json json;
  std::vector<Check> checks;
  std::vector<std::string> errors;
  std::string csv;   // command-specific table; empty means the generic check table
  std::string text;  // extra text lines after the check list
  bool pass = true;
};

std::string render(const RunConfig& cfg, Result& r) {
  for (const auto& c : r.checks) r.pass = r.pass && c.pass();
  if (!r.errors.empty()) r.pass = false;
  switch (cfg.format) {
    case OutputFormat::Json: {
      Json j{{"version", kSchemaVersion}, {"config", config_json(cfg)}};
      for (auto& [k, v] : r.json.items()) j[k] = v;
      Json checks = Json::array();
      for (const auto& c : r.checks) checks.push_back(check_json(c));
      j["checks"] = checks;
      if (!r.errors.empty()) j["errors"] = r.errors;
      j["pass"] = r.pass;
      return j.dump(2) + "\n";
    }
    case OutputFormat::Csv: {
      if (!r.csv.empty()) return r.csv;
      std::string s = "name,residual,tolerance,pass\n";
      for (const auto& c : r.checks)
        s += "\"" + c.name + "\"," + num(c.residual) + "," + num(c.tolerance) + "," + (c.pass() ? "true" : "false") + "\n";
      return s;
    }
    case OutputFormat::Text: {
      std::string s;
      for (const auto& c : r.checks)
        s += std::string(c.pass() ? "PASS " : "FAIL ") + c.name + "  residual=" + brief(c.residual) +
             " tol=" + brief(c.tolerance) + "\n";
      for (const auto& e : r.errors) s += "ERROR " + e + "\n";
      s += r.text;
      s += std::string("overall: ") + (r.pass ? "pass" : "fail") + "\n";
      return s;
    }
  }
  return {};
}

Result run_check(const RunConfig& cfg) {
  Result r;
  for (int n : cfg.n_list) {
    for (auto&& suite : {weyl_suite(n), bell_suite(n, cfg.seed), transfer_suite(n, cfg.seed),
                         game_suite(n, cfg.samples, cfg.seed, cfg.local_dim), duality_suite(n)})
      r.checks.insert(r.checks.end(), suite.begin(), suite.end());
  }
  return r;
}

Result run_certify(const RunConfig& cfg) {
  Result r;
  Json certs = Json::array();
  bool gap = true;
  for (int n : cfg.n_list) {
    double lower = NAN, upper = NAN;
    auto issue = [&](auto&& make) -> bool {
      try {
        NormCertificate c = make();
        certs.push_back(certificate_json(c));
        auto steps = steps_as_checks(c);
        r.checks.insert(r.checks.end(), steps.begin(), steps.end());
        if (!c.valid()) r.errors.push_back(c.norm_name() + " [n=" + std::to_string(n) + "]: digest mismatch");
        if (c.direction() == Direction::Lower) lower = std::isnan(lower) ? c.value() : std::min(lower, c.value());
        else upper = c.value();
        return true;
      } catch (const CertificationError& e) {
        r.errors.push_back(e.what());
        return false;
      }
    };
    bool ok = issue([&] { return certify_lower(n); });
    ok = issue([&] { return certify_lower_transfer(n); }) && ok;
    UpperOptions opt;
    opt.samples = cfg.samples;
    opt.seed = cfg.seed;
    opt.local_dim = cfg.local_dim;
    ok = issue([&] { return certify_upper(n, opt); }) && ok;
    const bool certified = ok && lower > upper;
    gap = gap && certified;
    r.text += "n=" + std::to_string(n) + " lower=" + num(lower) + " upper=" + num(upper) +
              " gap certified: " + (certified ? "true" : "false") + "\n";
  }
  r.json["certificates"] = certs;
  r.json["gap_certified"] = gap;
  return r;
}

std::string report_csv(const ViolationReport& rep) {
  std::string s = "n,lower,upper_stated,upper_sharp,ratio,certified\n";
  for (const auto& row : rep.rows)
    s += std::to_string(row.n) + "," + num(row.lower) + "," + num(row.upper_stated) + "," + num(row.upper_sharp) + "," +
         num(row.ratio) + "," + (row.certified ? "true" : "false") + "\n";
  return s;
}

Result run_report(const RunConfig& cfg) {
  Result r;
  const ViolationReport rep = violation_report(cfg.n_list, cfg.samples, cfg.seed, cfg.local_dim);
  Json rows = Json::array();
  for (const auto& row : rep.rows)
    rows.push_back(Json{{"n", row.n},
                        {"lower", row.lower},
                        {"upper_stated", row.upper_stated},
                        {"upper_sharp", row.upper_sharp},
                        {"ratio", row.ratio},
                        {"empirical_max", row.empirical_max},
                        {"all_checks_passed", row.all_checks_passed},
                        {"certified", row.certified}});
  Json certs = Json::array();
  for (const auto& c : rep.certificates) {
    certs.push_back(certificate_json(c));
    auto steps = steps_as_checks(c);
    r.checks.insert(r.checks.end(), steps.begin(), steps.end());
  }
  r.errors = rep.failures;
  r.json["certificates"] = certs;
  r.json["report"] = Json{{"rows", rows}};
  r.csv = report_csv(rep);
  for (const auto& row : rep.rows)
    r.text += "n=" + std::to_string(row.n) + " lower=" + num(row.lower) + " upper_stated=" + num(row.upper_stated) +
              " upper_sharp=" + num(row.upper_sharp) + " ratio=" + num(row.ratio) +
              " certified=" + (row.certified ? "true" : "false") + "\n";
  return r;
}

Result run_sample(const RunConfig& cfg) {
  Result r;
  if (!cfg.replay_path.empty()) {
    std::ifstream in(cfg.replay_path);
    if (!in) throw UsageError("cannot read replay file: " + cfg.replay_path);
    const Strategy s = read_strategy(in);
    const int n = s.alice.n;
    const double value = evaluate_strategy(build_eta(n), s);
    const double sharp = chsh_upper_bound(n).sharp;
    r.checks.push_back({tagged("replayed strategy value <= sharp bound", n), "||sum E (x) F||^{1/2} <= sqrt(n + (n-1) sqrt(n))",
                        std::max(0.0, value - sharp), tol::kContraction});
    r.json["samples"] = Json::array({Json{{"n", n}, {"index", 0}, {"value", value}}});
    r.csv = "n,index,value\n" + std::to_string(n) + ",0," + num(value) + "\n";
    r.text = "n=" + std::to_string(n) + " value=" + num(value) + " sharp=" + num(sharp) + "\n";
    return r;
  }
  Json samples = Json::array();
  r.csv = "n,index,value\n";
  for (int n : cfg.n_list) {
    const int d = cfg.local_dim > 0 ? cfg.local_dim : n;
    const LabeledTensor eta = build_eta(n);
    const auto values = parallel_map(static_cast<size_t>(cfg.samples), [&](size_t i) {
      return evaluate_strategy(eta, sample_strategy(n, d, d, derive_seed(cfg.seed, i)));
    });
    double best = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      samples.push_back(Json{{"n", n}, {"index", i}, {"value", values[i]}});
      r.csv += std::to_string(n) + "," + std::to_string(i) + "," + num(values[i]) + "\n";
      best = std::max(best, values[i]);
    }
    const double sharp = chsh_upper_bound(n).sharp;
    r.checks.push_back({tagged("sampled strategy max <= sharp bound", n),
                        "||sum E (x) F||^{1/2} <= sqrt(n + (n-1) sqrt(n))", std::max(0.0, best - sharp),
                        tol::kContraction});
    r.text += "n=" + std::to_string(n) + " max=" + num(best) + " sharp=" + num(sharp) + "\n";
  }
  r.json["samples"] = samples;
  return r;
}

std::string run_dump(const RunConfig& cfg) {
  const int n = cfg.n_list.front();
  std::ostringstream os;
  const std::string& obj = cfg.dump_object;
  if (obj == "eta") write_sparse(os, build_eta(n));
  else if (obj == "p") write_sparse(os, build_p(n));
  else if (obj == "beta") write_sparse(os, build_beta(n));
  else if (obj == "q") write_sparse(os, build_q(n));
  else if (obj == "strategy") {
    const int d = cfg.local_dim > 0 ? cfg.local_dim : n;
    write_strategy(os, sample_strategy(n, d, d, derive_seed(cfg.seed, 0)));
  } else
    throw UsageError("unknown dump object: " + obj);
  return os.str();
}

void emit(const RunConfig& cfg, const std::string& content, std::ostream& out) {
  if (cfg.output_path.empty()) out << content;
  else write_atomically(cfg.output_path, content);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Check: return "check";
    case Command::Certify: return "certify";
    case Command::Sample: return "sample";
    case Command::Report: return "report";
    case Command::Dump: return "dump";
  }
  return "?";
}

std::string to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Json: return "json";
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Text: return "text";
  }
  return "?";
}

void validate(const RunConfig& c) {
  const bool replay = c.command == Command::Sample && !c.replay_path.empty();
  if (c.n_list.empty() && !replay) throw UsageError("--n is required");
  for (int n : c.n_list)
    if (!is_prime(n)) throw UsageError("--n entries must be prime, got " + std::to_string(n));
  if (c.samples < 0) throw UsageError("--samples must be non-negative");
  if (c.local_dim < 0) throw UsageError("--dim must be non-negative");
  if (c.command == Command::Dump) {
    if (c.dump_object.empty()) throw UsageError("dump needs --dump <eta|p|beta|q|strategy>");
    if (c.n_list.size() != 1) throw UsageError("dump takes exactly one n");
  } else if (!c.dump_object.empty()) {
    throw UsageError("--dump is only valid with the dump command");
  }
  if (!c.replay_path.empty() && c.command != Command::Sample) throw UsageError("--replay is only valid with sample");
  if (replay && !c.n_list.empty()) throw UsageError("--replay reads n from the strategy file; drop --n");
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write output path: " + path);
    f << content;
    f.close();
    if (!f) throw UsageError("write failed: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot move output into place: " + path);
  }
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
    if (config.command == Command::Dump) {
      emit(config, run_dump(config), out);
      return exit_code::kPass;
    }
    Result r;
    switch (config.command) {
      case Command::Check: r = run_check(config); break;
      case Command::Certify: r = run_certify(config); break;
      case Command::Sample: r = run_sample(config); break;
      case Command::Report: r = run_report(config); break;
      case Command::Dump: break;
    }
    const std::string content = render(config, r);
    emit(config, content, out);
    for (const auto& e : r.errors) err << "error: " << e << "\n";
    return r.pass ? exit_code::kPass : exit_code::kFailedCheck;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Operator-space tensor norm gap: checks, certificates and reports"};
  RunConfig cfg;
  std::string command, format = "json";
  app.add_option("command", command, "check | certify | sample | report | dump")
      ->required()
      ->check(CLI::IsMember({"check", "certify", "sample", "report", "dump"}));
  app.add_option("--n", cfg.n_list, "comma-separated list of primes")->delimiter(',');
  app.add_option("--samples", cfg.samples, "random strategies per n");
  app.add_option("--seed", cfg.seed, "base seed");
  app.add_option("--dim", cfg.local_dim, "local dimension of sampled strategies (0 = n)");
  app.add_option("--out", cfg.output_path, "output file, written atomically");
  app.add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--dump", cfg.dump_object, "object to dump")
      ->check(CLI::IsMember({"eta", "p", "beta", "q", "strategy"}));
  app.add_option("--replay", cfg.replay_path, "strategy file to evaluate (sample)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return exit_code::kUsage;
  }
  const std::vector<std::string> names = {"check", "certify", "sample", "report", "dump"};
  cfg.command = static_cast<Command>(std::find(names.begin(), names.end(), command) - names.begin());
  cfg.format = format == "json" ? OutputFormat::Json : format == "csv" ? OutputFormat::Csv : OutputFormat::Text;
  return run(cfg, out, err);
}

}  // namespace osgap

// dkp: command-line front end for the discrete KP lattice library.
//
// Exit codes: 0 success, 1 a check failed (or the numerics broke down),
// 2 usage or parse error, 3 input data violates a state invariant.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dkp/dkp.hpp"

namespace {

using dkp::Complex;
using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalidInput = 3;

json to_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::ostream& full_precision(std::ostream& os) {
  return os << std::setprecision(std::numeric_limits<double>::max_digits10);
}

Complex parse_complex(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  in >> re;
  if (in && in.peek() != EOF) in >> comma >> im;
  if (!in || (comma != 0 && comma != ',') || !(in >> std::ws).eof()) {
    throw dkp::ParseError("expected a complex number as 're,im', got '" + text + "'");
  }
  return {re, im};
}

void require_writable(const std::string& path) {
  if (path.empty()) return;
  const auto parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) throw dkp::ParseError("output directory does not exist: " + parent.string());
}

/// Writes to `path`, or to stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dkp::ParseError("cannot open " + path + " for writing");
  out << text;
}

std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------- random

struct RandomOptions {
  int N = 0;
  int M = 0;
  std::uint64_t seed = 1;
  dkp::RandomStateOptions shape;
  std::string out;
};

int cmd_random(const RandomOptions& o) {
  require_writable(o.out);
  emit(o.out, dkp::dump_state(dkp::random_state(o.N, o.M, o.seed, o.shape)));
  return 0;
}

// ---------------------------------------------------------------- kappa

struct KappaOptions {
  int N = 0;
  int M = 0;
  std::string format = "json";
};

json table_json(const dkp::SignTable& t) {
  json rows = json::array();
  for (int m = 0; m < t.M(); ++m) {
    json row = json::array();
    for (int n = 0; n < t.N(); ++n) row.push_back(t(n, m));
    rows.push_back(row);
  }
  return rows;
}

int cmd_kappa(const KappaOptions& o) {
  const auto kappa = dkp::build_kappa(o.N, o.M);
  const auto rho = dkp::build_rho(o.N, o.M);
  const auto phi = dkp::build_phi(o.N, o.M);
  if (o.format == "csv") {
    std::cout << "n,m,kappa,rho,phi\n";
    for (int m = 0; m < o.M; ++m)
      for (int n = 0; n < o.N; ++n)
        std::cout << n << ',' << m << ',' << kappa(n, m) << ',' << rho(n, m) << ',' << phi(n, m) << '\n';
    return 0;
  }
  const json doc = {{"N", o.N},
                    {"M", o.M},
                    {"euclid_case", dkp::euclid_case(o.N, o.M) == dkp::EuclidCase::case1 ? 1 : 2},
                    {"euclid_steps", dkp::euclid_steps(o.N, o.M)},
                    {"kappa", table_json(kappa)},
                    {"rho", table_json(rho)},
                    {"phi", table_json(phi)}};
  std::cout << json_text(doc);
  return 0;
}

// ---------------------------------------------------------------- curve

struct CurveOptions {
  std::string state;
  std::string out;
  std::string csv;
  std::string format = "json";
  double threshold = dkp::kSupportThreshold;
};

std::string coefficients_csv(const dkp::CurvePolynomial& curve) {
  std::ostringstream os;
  full_precision(os) << "i,j,re,im\n";
  for (const auto& e : curve.exponents()) {
    const Complex c = curve.coeff(e.i, e.j);
    os << e.i << ',' << e.j << ',' << c.real() << ',' << c.imag() << '\n';
  }
  return os.str();
}

json curve_report(const dkp::CurvePolynomial& curve, double threshold) {
  json coeffs = json::array();
  for (const auto& e : curve.exponents()) {
    const Complex c = curve.coeff(e.i, e.j);
    coeffs.push_back({{"i", e.i}, {"j", e.j}, {"re", c.real()}, {"im", c.imag()}});
  }
  json supp = json::array();
  for (const auto& e : dkp::support(curve, threshold)) supp.push_back({e.i, e.j});
  const auto genus = dkp::newton_genus(curve, threshold);
  json hull = json::array();
  for (const auto& p : genus.polygon.hull) hull.push_back({p.x, p.y});
  return {{"N", curve.N()},
          {"M", curve.M()},
          {"threshold", threshold},
          {"coefficients", coeffs},
          {"support", supp},
          {"hull", hull},
          {"interior_count", genus.polygon.interior_count},
          {"genus_expected", genus.expected_genus},
          {"generic", genus.generic},
          {"warnings", genus.warnings}};
}

int cmd_curve(const CurveOptions& o) {
  require_writable(o.out);
  require_writable(o.csv);
  const auto state = dkp::load_state(o.state);
  const auto curve = dkp::curve_polynomial(state);
  const auto report = curve_report(curve, o.threshold);
  for (const auto& w : report["warnings"]) std::cerr << "warning: " << w.get<std::string>() << '\n';
  if (!o.csv.empty()) emit(o.csv, coefficients_csv(curve));
  emit(o.out, o.format == "csv" ? coefficients_csv(curve) : json_text(report));
  return 0;
}

// ---------------------------------------------------------------- flow

struct FlowOptions {
  std::string state;
  double dt = 1e-3;
  int steps = 1000;
  int record_every = 1;
  std::string out;
  std::string final_state;
  std::string format = "json";
  double tolerance = 0.0;  // 0: report only
};

std::string drift_csv(const dkp::DriftReport& r) {
  std::ostringstream os;
  full_precision(os) << "step,time,max_rel_drift";
  for (const auto& e : r.tracked) os << ",drift_i" << e.i << "_j" << e.j;
  os << '\n';
  for (const auto& s : r.samples) {
    os << s.step << ',' << s.time << ',' << s.max_rel_drift;
    for (std::size_t k = 0; k < r.tracked.size(); ++k) os << ',' << dkp::relative_drift(s.coefficients[k], r.initial[k]);
    os << '\n';
  }
  return os.str();
}

int cmd_flow(const FlowOptions& o) {
  require_writable(o.out);
  require_writable(o.final_state);
  const auto state = dkp::load_state(o.state);
  const auto [final_state, report] = dkp::integrate(state, o.dt, o.steps, o.record_every);

  if (!o.out.empty()) emit(o.out, drift_csv(report));
  if (!o.final_state.empty()) dkp::save_state(final_state, o.final_state);

  const bool within = o.tolerance <= 0.0 || report.max_drift < o.tolerance;
  if (o.format == "csv") {
    std::ostringstream os;
    full_precision(os) << "key,value\n"
                       << "dt," << report.dt << "\nsteps," << report.steps << "\nmax_drift," << report.max_drift
                       << "\nmax_off_support," << report.max_off_support << "\nsum_a_drift," << report.sum_a_drift
                       << "\nprod_b_drift," << report.prod_b_drift << '\n';
    std::cout << os.str();
  } else {
    json tracked = json::array();
    const auto& last = report.samples.back();
    for (std::size_t k = 0; k < report.tracked.size(); ++k) {
      double worst = 0.0;
      for (const auto& s : report.samples) worst = std::max(worst, dkp::relative_drift(s.coefficients[k], report.initial[k]));
      tracked.push_back({{"i", report.tracked[k].i},
                         {"j", report.tracked[k].j},
                         {"initial", to_json(report.initial[k])},
                         {"final", to_json(last.coefficients[k])},
                         {"max_drift", worst}});
    }
    json doc = {{"dt", report.dt},
                {"steps", report.steps},
                {"record_every", o.record_every},
                {"max_drift", report.max_drift},
                {"max_off_support", report.max_off_support},
                {"sum_a_drift", report.sum_a_drift},
                {"prod_b_drift", report.prod_b_drift},
                {"tracked", tracked}};
    if (o.tolerance > 0.0) {
      doc["tolerance"] = o.tolerance;
      doc["pass"] = within;
    }
    std::cout << json_text(doc);
  }
  return within ? 0 : kExitCheckFailed;
}

// ---------------------------------------------------------------- check

struct CheckOptions {
  std::string state;
  std::string format = "json";
  double threshold = dkp::kSupportThreshold;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

std::vector<CheckResult> run_checks(const dkp::LatticeState& s, double threshold) {
  const int N = s.N();
  const int M = s.M();
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto point = [&] { return std::polar(0.5 + 1.5 * u(rng), 2.0 * std::numbers::pi * u(rng)); };
  std::vector<CheckResult> out;

  {
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Complex alpha = point(), beta = point();
      const Complex base = dkp::det_W(s, alpha, beta);
      for (const Complex lambda : {Complex(2.0), Complex(1.0, 1.0)}) {
        const Complex scaled = dkp::det_W(dkp::weighted_rescale(s, lambda), std::pow(lambda, N) * alpha,
                                          std::pow(lambda, M) * beta);
        const Complex want = std::pow(lambda, N * M) * base;
        worst = std::max(worst, std::abs(scaled - want) / std::abs(want));
      }
    }
    out.push_back({"scaling_law", worst < 1e-10, worst, 1e-10, "det W under the weighted rescaling"});
  }

  const auto curve = dkp::curve_polynomial(s);
  const auto supp = dkp::support(curve, threshold);
  {
    std::size_t asymmetric = 0;
    for (const auto& e : supp)
      if (!std::binary_search(supp.begin(), supp.end(), dkp::Exponent{-e.i, e.j})) ++asymmetric;
    out.push_back({"support_symmetry", asymmetric == 0, static_cast<double>(asymmetric), 0.0,
                   "exponents without a mirror partner under i -> -i"});
  }
  {
    const auto generic = dkp::generic_support(N, M);
    const bool special = supp == dkp::special_support(N, M);
    CheckResult r{"support_count", supp == generic || special, static_cast<double>(supp.size()),
                  static_cast<double>(generic.size()), ""};
    if (supp == generic)
      r.detail = "generic support";
    else if (special)
      r.detail = "three-term support of the root-of-unity assignment";
    else
      r.detail = "support differs from the generic enumeration";
    out.push_back(r);
  }
  {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Complex alpha = point();
      const Complex det = dkp::det_W(s, alpha, 0.0);
      worst = std::max(worst, std::abs(det - dkp::block_determinant_product(s, alpha)) / std::abs(det));
    }
    out.push_back({"beta_zero_splitting", worst < 1e-10, worst, 1e-10, "det W(alpha,0) against the block product"});
  }
  {
    const auto genus = dkp::newton_genus(curve, threshold);
    std::string detail = "interior lattice points of the Newton polygon";
    for (const auto& w : genus.warnings) detail += "; " + w;
    out.push_back({"newton_genus", genus.polygon.interior_count == genus.expected_genus,
                   static_cast<double>(genus.polygon.interior_count), static_cast<double>(genus.expected_genus),
                   detail});
  }
  {
    const auto d = dkp::flow_rhs(s, dkp::FlowKernels::build(N, M));
    double scale = 0.0;
    for (const auto& v : d.dA.values()) scale = std::max(scale, std::abs(v));
    for (const auto& v : s.A().values()) scale = std::max(scale, std::abs(v));
    for (const auto& v : s.B().values()) scale = std::max(scale, std::abs(v));
    Complex log_sum{};
    for (int m = 0; m < M; ++m)
      for (int n = 0; n < N; ++n) log_sum += d.dB(n, m) / s.B(n, m);
    const double worst = std::max(std::abs(dkp::field_sum(d.dA)), std::abs(log_sum)) / scale;
    out.push_back({"rhs_identities", worst < 1e-13, worst, 1e-13, "sum dA and sum dB/B"});
  }
  return out;
}

int cmd_check(const CheckOptions& o) {
  const auto state = dkp::load_state(o.state);
  const auto checks = run_checks(state, o.threshold);
  bool all = true;
  for (const auto& c : checks) all = all && c.pass;

  if (o.format == "csv") {
    std::ostringstream os;
    full_precision(os) << "name,pass,value,tolerance\n";
    for (const auto& c : checks) os << c.name << ',' << (c.pass ? "true" : "false") << ',' << c.value << ',' << c.tolerance << '\n';
    std::cout << os.str();
  } else {
    json list = json::array();
    for (const auto& c : checks)
      list.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"tolerance", c.tolerance}, {"detail", c.detail}});
    std::cout << json_text({{"N", state.N()}, {"M", state.M()}, {"pass", all}, {"checks", list}});
  }
  for (const auto& c : checks) {
    if (!c.pass) {
      std::cerr << "check failed: " << c.name << '\n';
      break;
    }
  }
  return all ? 0 : kExitCheckFailed;
}

// ---------------------------------------------------------------- eigen

struct EigenOptions {
  std::string state;
  std::string beta = "1,0";
  std::string format = "json";
};

int cmd_eigen(const EigenOptions& o) {
  const Complex beta = parse_complex(o.beta);
  const auto state = dkp::load_state(o.state);
  const auto curve = dkp::curve_polynomial(state);

  struct Row {
    dkp::CurvePoint p;
    double kernel = 0.0;
    double recurrence = 0.0;
    double quasi = 0.0;
    std::string error;
  };
  std::vector<Row> rows;
  bool all = true;
  for (const auto& p : dkp::curve_points_at_beta(state, curve, beta)) {
    Row r;
    r.p = p;
    try {
      const auto psi = dkp::kernel_vector(state, p);
      r.kernel = psi.kernel_residual;
      r.recurrence = dkp::recurrence_residual(state, psi);
      r.quasi = dkp::quasi_periodicity_check(state, p, psi);
    } catch (const dkp::NumericalError& e) {
      r.error = e.what();
    }
    const bool ok = r.error.empty() && p.residual < dkp::kPointResidualTolerance && r.kernel < 1e-9 &&
                    r.recurrence < 1e-8 && r.quasi < 1e-8;
    all = all && ok;
    rows.push_back(r);
  }

  if (o.format == "csv") {
    std::ostringstream os;
    full_precision(os) << "alpha_re,alpha_im,residual,kernel_residual,recurrence_residual,quasi_periodicity_residual\n";
    for (const auto& r : rows)
      os << r.p.alpha.real() << ',' << r.p.alpha.imag() << ',' << r.p.residual << ',' << r.kernel << ','
         << r.recurrence << ',' << r.quasi << '\n';
    std::cout << os.str();
  } else {
    json points = json::array();
    for (const auto& r : rows) {
      json p = {{"alpha", to_json(r.p.alpha)},
                {"residual", r.p.residual},
                {"kernel_residual", r.kernel},
                {"recurrence_residual", r.recurrence},
                {"quasi_periodicity_residual", r.quasi},
                {"near_collision", r.p.near_collision}};
      if (!r.error.empty()) p["error"] = r.error;
      points.push_back(p);
    }
    std::cout << json_text({{"beta", to_json(beta)}, {"pass", all}, {"points", points}});
  }
  return all ? 0 : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete KP lattice: spectral curves, flows and kernel vectors"};
  app.require_subcommand(1);
  const auto formats = CLI::IsMember({"json", "csv"});

  RandomOptions ro;
  auto* random = app.add_subcommand("random", "Write a seeded random state file");
  random->add_option("--N", ro.N, "Period in n")->required();
  random->add_option("--M", ro.M, "Period in m")->required();
  random->add_option("--seed", ro.seed, "RNG seed")->capture_default_str();
  random->add_option("--a-radius", ro.shape.a_radius, "A is uniform in the disk of this radius")->capture_default_str();
  random->add_option("--b-min", ro.shape.b_min, "Smallest |B|")->capture_default_str();
  random->add_option("--b-max", ro.shape.b_max, "Largest |B|")->capture_default_str();
  random->add_option("--out", ro.out, "Output path (stdout if omitted)");

  KappaOptions ko;
  auto* kappa = app.add_subcommand("kappa", "Print the kappa, rho and phi tables");
  kappa->add_option("--N", ko.N, "Period in n")->required();
  kappa->add_option("--M", ko.M, "Period in m")->required();
  kappa->add_option("--format", ko.format, "json or csv")->check(formats)->capture_default_str();

  CurveOptions co;
  auto* curve = app.add_subcommand("curve", "Extract the spectral curve polynomial of a state");
  curve->add_option("--state", co.state, "State file")->required()->check(CLI::ExistingFile);
  curve->add_option("--out", co.out, "Report path (stdout if omitted)");
  curve->add_option("--csv", co.csv, "Also write the coefficients as CSV");
  curve->add_option("--threshold", co.threshold, "Relative support threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  curve->add_option("--format", co.format, "json or csv")->check(formats)->capture_default_str();

  FlowOptions fo;
  auto* flow = app.add_subcommand("flow", "Integrate the lattice flow and report curve drift");
  flow->add_option("--state", fo.state, "State file")->required()->check(CLI::ExistingFile);
  flow->add_option("--dt", fo.dt, "RK4 step")->check(CLI::PositiveNumber)->capture_default_str();
  flow->add_option("--steps", fo.steps, "Number of steps")->check(CLI::PositiveNumber)->capture_default_str();
  flow->add_option("--record-every", fo.record_every, "Steps between curve evaluations")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  flow->add_option("--out", fo.out, "Drift CSV path");
  flow->add_option("--final-state", fo.final_state, "Write the final state here");
  flow->add_option("--tolerance", fo.tolerance, "Fail if the max drift reaches this value")
      ->check(CLI::PositiveNumber);
  flow->add_option("--format", fo.format, "json or csv")->check(formats)->capture_default_str();

  CheckOptions ko2;
  auto* check = app.add_subcommand("check", "Run the structural checks on a state");
  check->add_option("--state", ko2.state, "State file")->required()->check(CLI::ExistingFile);
  check->add_option("--threshold", ko2.threshold, "Relative support threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  check->add_option("--format", ko2.format, "json or csv")->check(formats)->capture_default_str();

  EigenOptions eo;
  auto* eigen = app.add_subcommand("eigen", "Curve points and kernel vectors at a fixed beta");
  eigen->add_option("--state", eo.state, "State file")->required()->check(CLI::ExistingFile);
  eigen->add_option("--beta", eo.beta, "beta as re,im")->capture_default_str();
  eigen->add_option("--format", eo.format, "json or csv")->check(formats)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*random) return cmd_random(ro);
    if (*kappa) return cmd_kappa(ko);
    if (*curve) return cmd_curve(co);
    if (*flow) return cmd_flow(fo);
    if (*check) return cmd_check(ko2);
    if (*eigen) return cmd_eigen(eo);
  } catch (const dkp::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dkp::ConstraintError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const dkp::InvariantError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}

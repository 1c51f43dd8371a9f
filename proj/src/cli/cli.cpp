#include "krnorm/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <random>
#include <sstream>

#include "krnorm/decompose.hpp"
#include "krnorm/errors.hpp"
#include "krnorm/family.hpp"
#include "krnorm/kr.hpp"
#include "krnorm/measure_io.hpp"
#include "krnorm/oracle.hpp"

namespace krnorm {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kDefaultDecomposeTol = 1e-4;
constexpr double kDefaultVerifyTol = 1e-9;
constexpr double kOracleAgreementTol = 1e-8;

struct GlobalFlags {
  std::optional<double> tol;
  std::uint64_t seed = 0;
  std::string format = "json";
  bool format_given = false;
  std::string out;
};

// Results are written to --out when given, else to the stream.
void emit(const GlobalFlags& g, std::ostream& out, const std::string& text) {
  if (g.out.empty()) {
    out << text;
  } else {
    write_text_file(g.out, text);
  }
}

json point_json(const Point& p) { return json(std::vector<double>(p.coords().begin(), p.coords().end())); }

std::string point_csv(const Point& p) {
  std::string s;
  for (std::size_t i = 0; i < p.dim(); ++i) s += (i ? "," : "") + format_real(p[i]);
  return s;
}

std::string axis_header(char name, std::size_t dim) {
  std::string s;
  for (std::size_t i = 0; i < dim; ++i) s += (i ? "," : "") + (name + std::to_string(i));
  return s;
}

const char* kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Create: return "create";
    case EdgeKind::Destroy: return "destroy";
    default: return "transport";
  }
}

Domain parse_box(const std::vector<double>& box, std::size_t dim) {
  if (box.size() != 2) throw ArgumentError("--box expects lo,hi");
  if (dim == 0) throw ArgumentError("--dim must be positive");
  return Domain(std::vector<double>(dim, box[0]), std::vector<double>(dim, box[1]));
}

// ---- norm ----------------------------------------------------------------

struct NormArgs {
  std::string input;
  std::string variant = "kr0";
  std::vector<std::string> emit;
};

int cmd_norm(const NormArgs& a, const GlobalFlags& g, std::ostream& out) {
  const DiscreteSignedMeasure m = read_measure_file(a.input);
  const double tol = g.tol.value_or(kDefaultGapTol);
  bool want_plan = false, want_potential = false;
  for (const std::string& e : a.emit) {
    if (e == "plan") {
      want_plan = true;
    } else if (e == "potential") {
      want_potential = true;
    } else {
      throw ArgumentError("--emit accepts plan and potential, got '" + e + "'");
    }
  }
  const NormResult r = a.variant == "kr" ? kr_norm(m, tol) : kr0_norm(m, tol);
  const bool gap_ok = r.gap <= tol;
  std::ostringstream os;
  if (g.format == "csv") {
    os << "value,gap\n" << format_real(r.value) << ',' << format_real(r.gap) << '\n';
    const std::size_t n = m.domain().dim();
    if (want_plan) {
      os << "\nkind," << axis_header('s', n) << ',' << axis_header('t', n) << ",mass\n";
      for (const PlanEdge& e : r.plan.edges) {
        os << kind_name(e.kind) << ',' << point_csv(e.source) << ',' << point_csv(e.target)
           << ',' << format_real(e.mass) << '\n';
      }
    }
    if (want_potential) {
      os << '\n' << axis_header('z', n) << ",f\n";
      for (std::size_t i = 0; i < r.potential.points.size(); ++i) {
        os << point_csv(r.potential.points[i]) << ',' << format_real(r.potential.values[i])
           << '\n';
      }
    }
  } else {
    json j{{"variant", a.variant}, {"value", r.value}, {"gap", r.gap}, {"tol", tol}};
    if (want_plan) {
      json plan = json::array();
      for (const PlanEdge& e : r.plan.edges) {
        plan.push_back({{"source", point_json(e.source)},
                        {"target", point_json(e.target)},
                        {"mass", e.mass},
                        {"kind", kind_name(e.kind)}});
      }
      j["plan"] = std::move(plan);
    }
    if (want_potential) {
      json pot = json::array();
      for (std::size_t i = 0; i < r.potential.points.size(); ++i) {
        pot.push_back({{"point", point_json(r.potential.points[i])},
                       {"value", r.potential.values[i]}});
      }
      j["potential"] = std::move(pot);
      j["lip_bound"] = r.potential.lip_bound;
      j["sup_bound"] = r.potential.sup_bound;
    }
    os << j.dump(2) << '\n';
  }
  emit(g, out, os.str());
  return gap_ok ? kExitOk : kExitVerificationFailure;
}

// ---- decompose / verify ---------------------------------------------------

struct DecomposeArgs {
  std::string input;
  std::string variant = "kr0";
  std::string method = "greedy";
  std::optional<std::uint64_t> truncate;
  int start_depth = 1;
};

int cmd_decompose(const DecomposeArgs& a, const GlobalFlags& g, std::ostream& out) {
  const DiscreteSignedMeasure m = read_measure_file(a.input);
  const FamilyConfig cfg(m.domain());
  json j;
  if (a.method == "l1") {
    if (!a.truncate) throw ArgumentError("--method l1 needs --truncate N");
    j = a.variant == "kr" ? decomposition_to_json(decompose_l1_minimal_full(m, *a.truncate, cfg))
                          : decomposition_to_json(decompose_l1_minimal_balanced(m, *a.truncate, cfg));
  } else {
    if (a.truncate) throw ArgumentError("--truncate applies to --method l1 only");
    const double tol = g.tol.value_or(kDefaultDecomposeTol);
    DecomposeOptions opt;
    opt.start_depth = a.start_depth;
    j = a.variant == "kr" ? decomposition_to_json(decompose_full(m, tol, cfg, opt))
                          : decomposition_to_json(decompose_balanced(m, tol, cfg, opt));
  }
  emit(g, out, j.dump(2) + "\n");
  return kExitOk;
}

struct VerifyArgs {
  std::string input;
  std::string dec;
  double floor = 0.0;
};

int cmd_verify(const VerifyArgs& a, const GlobalFlags& g, std::ostream& out) {
  const DiscreteSignedMeasure m = read_measure_file(a.input);
  json dj;
  try {
    dj = json::parse(read_text_file(a.dec));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("dec: ") + e.what());
  }
  const ParsedDecomposition dec = decomposition_from_json(dj);
  const double tol = g.tol.value_or(kDefaultVerifyTol);
  const BoundReport r = dec.balanced ? verify_bounds(m, *dec.balanced, tol, a.floor)
                                     : verify_bounds(m, *dec.full, tol, a.floor);
  std::ostringstream os;
  if (g.format == "csv") {
    os << "norm,l1,residual,upper_ok,ratio,per_term_lower_ok,floor,floor_ok\n"
       << format_real(r.norm) << ',' << format_real(r.l1) << ',' << format_real(r.residual)
       << ',' << (r.upper_ok ? "true" : "false") << ',' << format_real(r.ratio) << ','
       << (r.per_term_lower_ok ? "true" : "false") << ',' << format_real(r.floor) << ','
       << (r.floor_ok ? "true" : "false") << '\n';
  } else {
    os << json{{"norm", r.norm},
               {"l1", r.l1},
               {"residual", r.residual},
               {"upper_ok", r.upper_ok},
               {"ratio", r.ratio},
               {"per_term_lower_ok", r.per_term_lower_ok},
               {"floor", r.floor},
               {"floor_ok", r.floor_ok}}
              .dump(2)
       << '\n';
  }
  emit(g, out, os.str());
  return r.upper_ok ? kExitOk : kExitVerificationFailure;
}

// ---- family ---------------------------------------------------------------

struct FamilyArgs {
  std::uint64_t count = 10;
  std::size_t dim = 2;
  std::vector<double> box{0.0, 1.0};
  double theta = kDefaultTheta;
};

int cmd_family_dump(const FamilyArgs& a, const GlobalFlags& g, std::ostream& out) {
  const FamilyConfig cfg(parse_box(a.box, a.dim), a.theta);
  std::ostringstream os;
  const bool csv = !g.format_given || g.format == "csv";
  json rows = json::array();
  if (csv) os << "j," << axis_header('x', a.dim) << ',' << axis_header('y', a.dim) << ",separation\n";
  for (std::uint64_t j = 1; j <= a.count; ++j) {
    const FamilyPair p = family_pair(FamilyIndex(j), cfg);
    if (csv) {
      os << j << ',' << point_csv(p.x.point) << ',' << point_csv(p.y.point) << ','
         << format_real(p.separation) << '\n';
    } else {
      rows.push_back({{"j", j},
                      {"x", point_json(p.x.point)},
                      {"y", point_json(p.y.point)},
                      {"separation", p.separation}});
    }
  }
  if (!csv) os << rows.dump(2) << '\n';
  emit(g, out, os.str());
  return kExitOk;
}

// ---- oracle ---------------------------------------------------------------

struct OracleArgs {
  std::string input;
  std::string variant = "kr0";
  double unit = 0.0;
};

int cmd_oracle(const OracleArgs& a, const GlobalFlags& g, std::ostream& out) {
  const DiscreteSignedMeasure m = read_measure_file(a.input);
  const bool ext = a.variant == "kr";
  const double oracle = ext ? oracle_kr(m, a.unit) : oracle_kr0(m, a.unit);
  const double solver = ext ? kr_norm(m).value : kr0_norm(m).value;
  const double diff = std::abs(oracle - solver);
  std::ostringstream os;
  if (g.format == "csv") {
    os << "oracle,solver,difference\n"
       << format_real(oracle) << ',' << format_real(solver) << ',' << format_real(diff) << '\n';
  } else {
    os << json{{"variant", a.variant}, {"oracle", oracle}, {"solver", solver}, {"difference", diff}}
              .dump(2)
       << '\n';
  }
  emit(g, out, os.str());
  return diff <= kOracleAgreementTol ? kExitOk : kExitVerificationFailure;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  std::size_t count = 1;
  std::size_t size = 6;
  bool balanced = false;
  std::size_t dim = 2;
  std::vector<double> box{0.0, 1.0};
};

int cmd_gen(const GenArgs& a, const GlobalFlags& g, std::ostream& out) {
  if (a.size == 0) throw ArgumentError("--size must be at least 1");
  if (a.count == 0) throw ArgumentError("--count must be at least 1");
  if (a.count > 1 && g.out.empty()) throw ArgumentError("--count > 1 needs --out DIR");
  const Domain d = parse_box(a.box, a.dim);
  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> weight(-1.0, 1.0);
  std::vector<std::uniform_real_distribution<double>> axis;
  for (std::size_t i = 0; i < a.dim; ++i) axis.emplace_back(d.lo()[i], d.hi()[i]);

  if (a.count > 1) fs::create_directories(g.out);
  for (std::size_t k = 0; k < a.count; ++k) {
    std::vector<Atom> atoms;
    double sum = 0.0;
    for (std::size_t s = 0; s < a.size; ++s) {
      std::vector<double> c(a.dim);
      for (std::size_t i = 0; i < a.dim; ++i) c[i] = axis[i](rng);
      atoms.push_back({Point(std::move(c)), weight(rng)});
      sum += atoms.back().weight;
    }
    if (a.balanced) {
      const double mean = sum / static_cast<double>(a.size);
      for (Atom& at : atoms) at.weight -= mean;
    }
    const std::string text = serialize_measure(DiscreteSignedMeasure(d, std::move(atoms)));
    if (a.count == 1) {
      emit(g, out, text);
    } else {
      std::ostringstream name;
      name << "m_" << std::setw(5) << std::setfill('0') << k << ".json";
      write_text_file(fs::path(g.out) / name.str(), text);
    }
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kantorovich-Rubinstein norms and atomic decompositions of discrete measures",
               "krnorm"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--tol", g.tol, "Tolerance (gap for norm, residual for decompose)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for generated instances");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->each([&](const std::string&) { g.format_given = true; });
  app.add_option("--out", g.out, "Write the result to this path");

  const auto variant = CLI::IsMember({"kr0", "kr"});

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "Compute the KR0 or KR norm of a measure");
  norm->add_option("--input", na.input, "Measure file")->required();
  norm->add_option("--variant", na.variant)->check(variant);
  norm->add_option("--emit", na.emit, "Extra outputs: plan, potential")->delimiter(',');

  DecomposeArgs da;
  auto* dec = app.add_subcommand("decompose", "Decompose a measure over the pair family");
  dec->add_option("--input", da.input, "Measure file")->required();
  dec->add_option("--variant", da.variant)->check(variant);
  dec->add_option("--method", da.method)->check(CLI::IsMember({"greedy", "l1"}));
  dec->add_option("--truncate", da.truncate, "Number of pairs for --method l1")
      ->check(CLI::PositiveNumber);
  dec->add_option("--start-depth", da.start_depth, "First snapping depth")
      ->check(CLI::Range(0, kMaxFamilyDepth));

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "Check the norm bounds of a decomposition");
  ver->add_option("--input", va.input, "Measure file")->required();
  ver->add_option("--dec", va.dec, "Decomposition file")->required();
  ver->add_option("--floor", va.floor, "Ratio floor asserted for l1-minimal decompositions");

  FamilyArgs fa;
  auto* fam = app.add_subcommand("family", "Inspect the dense pair family");
  fam->require_subcommand(1);
  auto* dump = fam->add_subcommand("dump", "List the first pairs");
  dump->add_option("--count", fa.count)->check(CLI::NonNegativeNumber);
  dump->add_option("--dim", fa.dim)->check(CLI::PositiveNumber);
  dump->add_option("--box", fa.box, "lo,hi on every axis")->delimiter(',');
  dump->add_option("--theta", fa.theta, "Shift of the second family");

  OracleArgs oa;
  auto* orc = app.add_subcommand("oracle", "Compare the solver with the brute-force oracle");
  orc->add_option("--input", oa.input, "Measure file")->required();
  orc->add_option("--variant", oa.variant)->check(variant);
  orc->add_option("--unit", oa.unit, "Mass quantum of every weight")->required();

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate random measures");
  gen->add_option("--count", ga.count);
  gen->add_option("--size", ga.size, "Support size");
  gen->add_flag("--balanced", ga.balanced, "Shift weights to zero total mass");
  gen->add_option("--dim", ga.dim);
  gen->add_option("--box", ga.box, "lo,hi on every axis")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*norm) return cmd_norm(na, g, out);
    if (*dec) return cmd_decompose(da, g, out);
    if (*ver) return cmd_verify(va, g, out);
    if (*dump) return cmd_family_dump(fa, g, out);
    if (*orc) return cmd_oracle(oa, g, out);
    if (*gen) return cmd_gen(ga, g, out);
  } catch (const SolverError& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerificationFailure;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace krnorm

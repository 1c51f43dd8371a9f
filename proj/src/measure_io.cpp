#include "krnorm/measure_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "krnorm/errors.hpp"

namespace krnorm {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError(where + ": missing field '" + name + "'");
  return *it;
}

std::vector<double> real_array(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number())
      throw ParseError(where + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(j[i].get<double>());
  }
  return out;
}

}  // namespace

json domain_to_json(const Domain& d) {
  return json{{"dim", d.dim()},
              {"lo", std::vector<double>(d.lo().begin(), d.lo().end())},
              {"hi", std::vector<double>(d.hi().begin(), d.hi().end())}};
}

Domain domain_from_json(const json& j) {
  const json& dim = field(j, "dim", "measure");
  if (!dim.is_number_integer() || dim.get<long long>() <= 0)
    throw ParseError("measure.dim: expected a positive integer");
  std::vector<double> lo = real_array(field(j, "lo", "measure"), "measure.lo");
  std::vector<double> hi = real_array(field(j, "hi", "measure"), "measure.hi");
  const auto n = static_cast<std::size_t>(dim.get<long long>());
  if (lo.size() != n || hi.size() != n)
    throw ParseError("measure.lo/hi: length differs from dim");
  try {
    return Domain(std::move(lo), std::move(hi));
  } catch (const DomainError& e) {
    throw ParseError(std::string("measure.lo/hi: ") + e.what());
  }
}

json measure_to_json(const DiscreteSignedMeasure& m) {
  json j = domain_to_json(m.domain());
  json atoms = json::array();
  for (const Atom& a : m.atoms()) {
    atoms.push_back(json{
        {"point", std::vector<double>(a.point.coords().begin(), a.point.coords().end())},
        {"weight", a.weight}});
  }
  j["atoms"] = std::move(atoms);
  return j;
}

DiscreteSignedMeasure measure_from_json(const json& j) {
  Domain domain = domain_from_json(j);
  const json& atoms = field(j, "atoms", "measure");
  if (!atoms.is_array()) throw ParseError("measure.atoms: expected an array");
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string where = "measure.atoms[" + std::to_string(i) + "]";
    std::vector<double> p = real_array(field(atoms[i], "point", where), where + ".point");
    if (p.size() != domain.dim())
      throw ParseError(where + ".point: length differs from dim");
    const json& w = field(atoms[i], "weight", where);
    if (!w.is_number()) throw ParseError(where + ".weight: expected a number");
    Point pt(std::move(p));
    if (!domain.contains(pt)) throw ParseError(where + ".point: outside the domain");
    out.push_back({std::move(pt), w.get<double>()});
  }
  return DiscreteSignedMeasure(std::move(domain), std::move(out));
}

DiscreteSignedMeasure parse_measure(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("measure: ") + e.what());
  }
  return measure_from_json(j);
}

std::string serialize_measure(const DiscreteSignedMeasure& m) {
  return measure_to_json(m).dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

DiscreteSignedMeasure read_measure_file(const std::filesystem::path& path) {
  return parse_measure(read_text_file(path));
}

void write_measure_file(const std::filesystem::path& path,
                        const DiscreteSignedMeasure& m) {
  write_text_file(path, serialize_measure(m));
}

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace krnorm

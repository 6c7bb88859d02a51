#include "ffgrad/pulse_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ffgrad::io {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string index_path(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

std::string member_path(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const json& j, const std::string& path, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) throw SchemaError(member_path(path, item.key()), "unknown field");
}

const json& member(const json& j, const std::string& path, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(member_path(path, key), "missing required field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(path, "must be finite");
  return v;
}

std::size_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 1) throw SchemaError(path, "expected a positive integer");
  return j.get<std::size_t>();
}

const json& array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

RealVector real_list(const json& j, const std::string& path, std::size_t expected = 0) {
  array(j, path);
  if (expected && j.size() != expected)
    throw SchemaError(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  if (j.empty()) throw SchemaError(path, "must not be empty");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], index_path(path, i));
  return v;
}

Complex complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return {number(j, path), 0.0};
  if (j.is_array() && j.size() == 2) return {number(j[0], index_path(path, 0)), number(j[1], index_path(path, 1))};
  throw SchemaError(path, "expected a number or a [re, im] pair");
}

ComplexMatrix operator_value(const json& j, const std::string& path, std::size_t dim) {
  ComplexMatrix m;
  if (j.is_string() || j.is_object()) {
    std::string label;
    double scale = 1.0;
    if (j.is_string()) {
      label = j.get<std::string>();
    } else {
      require_object(j, path, {"pauli", "scale"});
      const json& p = member(j, path, "pauli");
      if (!p.is_string()) throw SchemaError(member_path(path, "pauli"), "expected a Pauli label string");
      label = p.get<std::string>();
      if (j.contains("scale")) scale = number(j["scale"], member_path(path, "scale"));
    }
    if (label.empty() || (std::size_t{1} << label.size()) != dim)
      throw SchemaError(path, "Pauli label length does not match dim " + std::to_string(dim));
    try {
      m = scale * pauli_string(label);
    } catch (const std::exception& e) {
      throw SchemaError(path, e.what());
    }
  } else {
    array(j, path);
    if (j.size() != dim) throw SchemaError(path, "expected " + std::to_string(dim) + " rows");
    const auto d = static_cast<Eigen::Index>(dim);
    m.resize(d, d);
    for (std::size_t r = 0; r < dim; ++r) {
      const std::string row_path = index_path(path, r);
      const json& row = array(j[r], row_path);
      if (row.size() != dim) throw SchemaError(row_path, "expected " + std::to_string(dim) + " columns");
      for (std::size_t c = 0; c < dim; ++c)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_entry(row[c], index_path(row_path, c));
    }
  }
  try {
    require_hermitian(m);
  } catch (const std::exception& e) {
    throw SchemaError(path, e.what());
  }
  return m;
}

ComplexMatrix unitary_value(const json& j, const std::string& path, std::size_t dim) {
  ComplexMatrix m;
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "identity") return ComplexMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    if (name == "cnot" && dim == 4) {
      ComplexMatrix cnot = ComplexMatrix::Zero(4, 4);
      cnot(0, 0) = cnot(1, 1) = cnot(2, 3) = cnot(3, 2) = 1.0;
      return cnot;
    }
    if (name.size() > 0 && (std::size_t{1} << name.size()) == dim) {
      try {
        return pauli_string(name);
      } catch (const std::exception& e) {
        throw SchemaError(path, e.what());
      }
    }
    throw SchemaError(path, "unknown gate name");
  }
  array(j, path);
  if (j.size() != dim) throw SchemaError(path, "expected " + std::to_string(dim) + " rows");
  const auto d = static_cast<Eigen::Index>(dim);
  m.resize(d, d);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::string row_path = index_path(path, r);
    const json& row = array(j[r], row_path);
    if (row.size() != dim) throw SchemaError(row_path, "expected " + std::to_string(dim) + " columns");
    for (std::size_t c = 0; c < dim; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_entry(row[c], index_path(row_path, c));
  }
  if ((m.adjoint() * m - ComplexMatrix::Identity(d, d)).norm() > 1e-10) throw SchemaError(path, "not unitary");
  return m;
}

std::shared_ptr<const OperatorBasis> basis_value(const json& root, std::size_t dim) {
  if (!root.contains("basis")) return std::make_shared<OperatorBasis>(default_basis(dim));
  const json& b = root["basis"];
  if (!b.is_string()) throw SchemaError("basis", "expected \"pauli\" or \"ggm\"");
  const std::string name = b.get<std::string>();
  if (name == "ggm") return std::make_shared<OperatorBasis>(ggm_basis(dim));
  if (name == "pauli") {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if ((std::size_t{1} << n) != dim) throw SchemaError("basis", "pauli basis needs dim to be a power of two");
    return std::make_shared<OperatorBasis>(pauli_basis(n));
  }
  throw SchemaError("basis", "expected \"pauli\" or \"ggm\"");
}

const std::set<std::string> kPulseFields = {"dim", "basis", "drift", "controls", "noises", "dt"};

PulseSequence pulse_from(const json& root) {
  const std::size_t dim = count(member(root, "", "dim"), "dim");
  if (dim < 2) throw SchemaError("dim", "must be >= 2");
  const RealVector dt = real_list(member(root, "", "dt"), "dt");
  for (Eigen::Index g = 0; g < dt.size(); ++g)
    if (!(dt[g] > 0.0)) throw SchemaError(index_path("dt", static_cast<std::size_t>(g)), "segment duration must be > 0");
  const auto n = static_cast<std::size_t>(dt.size());
  const ComplexMatrix drift = root.contains("drift")
                                  ? operator_value(root["drift"], "drift", dim)
                                  : ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));

  std::vector<ControlTerm> controls;
  const json& cj = array(member(root, "", "controls"), "controls");
  for (std::size_t h = 0; h < cj.size(); ++h) {
    const std::string path = index_path("controls", h);
    require_object(cj[h], path, {"operator", "amplitudes"});
    controls.push_back({operator_value(member(cj[h], path, "operator"), member_path(path, "operator"), dim),
                        real_list(member(cj[h], path, "amplitudes"), member_path(path, "amplitudes"), n)});
  }
  std::vector<NoiseTerm> noises;
  const json& nj = array(member(root, "", "noises"), "noises");
  if (nj.empty()) throw SchemaError("noises", "at least one noise source is required");
  for (std::size_t a = 0; a < nj.size(); ++a) {
    const std::string path = index_path("noises", a);
    require_object(nj[a], path, {"operator", "sensitivities"});
    RealVector s = nj[a].contains("sensitivities")
                       ? real_list(nj[a]["sensitivities"], member_path(path, "sensitivities"), n)
                       : RealVector::Ones(static_cast<Eigen::Index>(n));
    noises.push_back({operator_value(member(nj[a], path, "operator"), member_path(path, "operator"), dim), s});
  }
  try {
    return PulseSequence(drift, std::move(controls), std::move(noises), dt, basis_value(root, dim));
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError("<root>", e.what());
  }
}

std::vector<double> grid_values(const json& j, const std::string& path) {
  if (j.is_array()) {
    const RealVector v = real_list(j, path);
    return {v.data(), v.data() + v.size()};
  }
  require_object(j, path, {"min", "max", "n", "spacing"});
  const double lo = number(member(j, path, "min"), member_path(path, "min"));
  const double hi = number(member(j, path, "max"), member_path(path, "max"));
  const std::size_t n = count(member(j, path, "n"), member_path(path, "n"));
  std::string spacing = "log";
  if (j.contains("spacing")) {
    if (!j["spacing"].is_string()) throw SchemaError(member_path(path, "spacing"), "expected \"log\" or \"linear\"");
    spacing = j["spacing"].get<std::string>();
  }
  try {
    if (spacing == "log") return FrequencyGrid::logarithmic(lo, hi, n).values();
    if (spacing == "linear") return FrequencyGrid::linear(lo, hi, n).values();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(member_path(path, "spacing"), "expected \"log\" or \"linear\"");
}

SpectralDensity spectrum_from(const json& j, const std::string& path, std::size_t n_noises) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "<root>" : path, "expected an object");
  const std::string omega_path = member_path(path, "omega");
  try {
    if (j.contains("type")) {
      require_object(j, path, {"type", "S0", "omega"});
      const json& t = j["type"];
      const std::string type = t.is_string() ? t.get<std::string>() : "";
      if (type != "pink" && type != "white")
        throw SchemaError(member_path(path, "type"), "expected \"pink\" or \"white\"");
      FrequencyGrid grid(grid_values(member(j, path, "omega"), omega_path));
      const json& s0j = member(j, path, "S0");
      std::vector<double> s0;
      if (s0j.is_array()) {
        const RealVector v = real_list(s0j, member_path(path, "S0"), n_noises);
        s0.assign(v.data(), v.data() + v.size());
      } else {
        s0.assign(n_noises, number(s0j, member_path(path, "S0")));
      }
      for (std::size_t a = 0; a < s0.size(); ++a)
        if (s0[a] < 0.0) throw SchemaError(member_path(path, "S0"), "must be >= 0");
      return type == "pink" ? SpectralDensity::pink(grid, s0) : SpectralDensity::white(grid, s0);
    }
    require_object(j, path, {"omega", "S"});
    FrequencyGrid grid(grid_values(member(j, path, "omega"), omega_path));
    const std::string s_path = member_path(path, "S");
    const json& sj = array(member(j, path, "S"), s_path);
    RealRowMatrix values(static_cast<Eigen::Index>(n_noises), static_cast<Eigen::Index>(grid.size()));
    if (!sj.empty() && sj[0].is_number()) {
      if (n_noises != 1) throw SchemaError(s_path, "expected one list per noise source");
      values.row(0) = real_list(sj, s_path, grid.size()).transpose();
    } else {
      if (sj.size() != n_noises) throw SchemaError(s_path, "expected " + std::to_string(n_noises) + " lists");
      for (std::size_t a = 0; a < n_noises; ++a)
        values.row(static_cast<Eigen::Index>(a)) = real_list(sj[a], index_path(s_path, a), grid.size()).transpose();
    }
    return SpectralDensity(grid, values);
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path.empty() ? "<root>" : path, e.what());
  }
}

json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", e.what());
  }
}

ordered_json matrix_json(const ComplexMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

ordered_json list_json(const RealVector& v) {
  ordered_json out = ordered_json::array();
  for (double x : v) out.push_back(x);
  return out;
}

bool same_basis(const OperatorBasis& a, const OperatorBasis& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] != b[j]) return false;
  return true;
}

std::string basis_name(const OperatorBasis& basis) {
  const std::size_t d = basis.dim();
  if ((d & (d - 1)) == 0) {
    std::size_t n = 0;
    while ((std::size_t{1} << n) < d) ++n;
    if (same_basis(basis, pauli_basis(n))) return "pauli";
  }
  if (same_basis(basis, ggm_basis(d))) return "ggm";
  throw std::invalid_argument("only Pauli and Gell-Mann bases can be serialized");
}

}  // namespace

SchemaError::SchemaError(std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PulseSequence parse_pulse(std::string_view text) {
  const json root = parse_document(text);
  require_object(root, "", kPulseFields);
  return pulse_from(root);
}

std::string dump_pulse(const PulseSequence& pulse) {
  ordered_json root;
  root["dim"] = pulse.dim();
  root["basis"] = basis_name(pulse.basis());
  root["drift"] = matrix_json(pulse.drift());
  root["controls"] = ordered_json::array();
  for (const auto& c : pulse.controls())
    root["controls"].push_back({{"operator", matrix_json(c.op)}, {"amplitudes", list_json(c.amplitudes)}});
  root["noises"] = ordered_json::array();
  for (const auto& n : pulse.noises())
    root["noises"].push_back({{"operator", matrix_json(n.op)}, {"sensitivities", list_json(n.sensitivities)}});
  root["dt"] = list_json(pulse.durations());
  return root.dump(2) + "\n";
}

PulseSequence load_pulse(const std::filesystem::path& path) { return parse_pulse(read_text(path)); }

void save_pulse(const PulseSequence& pulse, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_pulse(pulse);
}

SpectralDensity parse_spectrum(std::string_view text, std::size_t n_noises) {
  return spectrum_from(parse_document(text), "", n_noises);
}

SpectralDensity load_spectrum(const std::filesystem::path& path, std::size_t n_noises) {
  return parse_spectrum(read_text(path), n_noises);
}

OptimizationProblem parse_problem(std::string_view text) {
  const json root = parse_document(text);
  std::set<std::string> allowed = kPulseFields;
  allowed.insert({"target", "bounds", "epsilon", "max_iter", "spectrum"});
  require_object(root, "", allowed);
  json pulse_part = json::object();
  for (const auto& key : kPulseFields)
    if (root.contains(key)) pulse_part[key] = root[key];
  PulseSequence pulse = pulse_from(pulse_part);
  const ComplexMatrix target = unitary_value(member(root, "", "target"), "target", pulse.dim());
  SpectralDensity spectrum = spectrum_from(member(root, "", "spectrum"), "spectrum", pulse.n_noises());

  const std::size_t n = pulse.n_controls() * pulse.n_segments();
  const auto ni = static_cast<Eigen::Index>(n);
  RealVector lower(ni), upper(ni);
  const json& bj = array(member(root, "", "bounds"), "bounds");
  if (bj.size() == 2 && bj[0].is_number()) {
    lower.setConstant(number(bj[0], "bounds[0]"));
    upper.setConstant(number(bj[1], "bounds[1]"));
  } else {
    if (bj.size() != n) throw SchemaError("bounds", "expected [lo, hi] or " + std::to_string(n) + " pairs");
    for (std::size_t i = 0; i < n; ++i) {
      const RealVector pair = real_list(bj[i], index_path("bounds", i), 2);
      lower[static_cast<Eigen::Index>(i)] = pair[0];
      upper[static_cast<Eigen::Index>(i)] = pair[1];
    }
  }
  for (Eigen::Index i = 0; i < ni; ++i)
    if (lower[i] > upper[i]) throw SchemaError("bounds", "lower bound exceeds upper bound");
  const double epsilon = root.contains("epsilon") ? number(root["epsilon"], "epsilon") : 1e-7;
  if (!(epsilon > 0.0)) throw SchemaError("epsilon", "must be > 0");
  const std::size_t max_iter = root.contains("max_iter") ? count(root["max_iter"], "max_iter") : 10000;
  try {
    return OptimizationProblem(std::move(pulse), target, std::move(spectrum), lower, upper, epsilon, max_iter);
  } catch (const std::invalid_argument& e) {
    throw SchemaError("<root>", e.what());
  }
}

OptimizationProblem load_problem(const std::filesystem::path& path) { return parse_problem(read_text(path)); }

}  // namespace ffgrad::io

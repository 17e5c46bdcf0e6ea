#include "dwellcert/system.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dwellcert {

using nlohmann::json;

const Mat& ImpulsiveSystem::A() const {
  if (!nominal()) throw std::logic_error("A(): system '" + label + "' is not nominal");
  return a_vertices.front();
}

const Mat& ImpulsiveSystem::J() const {
  if (!nominal()) throw std::logic_error("J(): system '" + label + "' is not nominal");
  return j_vertices.front();
}

void ImpulsiveSystem::validate() const {
  if (n <= 0) throw std::invalid_argument("system: n must be positive");
  if (a_vertices.empty()) throw std::invalid_argument("system: A_vertices is empty");
  if (j_vertices.empty()) throw std::invalid_argument("system: J_vertices is empty");
  auto check = [&](const std::vector<Mat>& vs, const char* what) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].rows() != n || vs[i].cols() != n) {
        throw DimensionError(std::string(what) + "[" + std::to_string(i) + "] is " +
                             std::to_string(vs[i].rows()) + "x" + std::to_string(vs[i].cols()) +
                             ", expected " + std::to_string(n) + "x" + std::to_string(n));
      }
      if (!vs[i].allFinite())
        throw std::invalid_argument(std::string(what) + "[" + std::to_string(i) + "] has non-finite entries");
    }
  };
  check(a_vertices, "A_vertices");
  check(j_vertices, "J_vertices");
}

ImpulsiveSystem make_nominal(const Mat& a, const Mat& j, std::string label) {
  ImpulsiveSystem sys;
  sys.n = static_cast<int>(a.rows());
  sys.a_vertices = {a};
  sys.j_vertices = {j};
  sys.label = std::move(label);
  sys.validate();
  return sys;
}

void validate(const DwellTimeSpec& spec, double eps) {
  auto check = [&](double t, const char* what) {
    if (!std::isfinite(t) || t <= eps)
      throw std::invalid_argument(std::string(what) + " must be finite and > " + std::to_string(eps));
  };
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ranged>) {
          check(s.tmin, "Tmin");
          check(s.tmax, "Tmax");
          if (s.tmin > s.tmax) throw std::invalid_argument("ranged dwell time needs Tmin <= Tmax");
        } else if constexpr (!std::is_same_v<S, Arbitrary>) {
          check(s.T, "T");
        }
      },
      spec);
}

std::string describe(const DwellTimeSpec& spec) {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Periodic>) os << "periodic T=" << s.T;
        else if constexpr (std::is_same_v<S, MinimalDT>) os << "minimal dwell T=" << s.T;
        else if constexpr (std::is_same_v<S, MaximalDT>) os << "maximal dwell T=" << s.T;
        else if constexpr (std::is_same_v<S, Ranged>) os << "ranged [" << s.tmin << ", " << s.tmax << "]";
        else os << "arbitrary";
      },
      spec);
  return os.str();
}

ConvexCombination ConvexCombination::vertex(std::size_t i, std::size_t na, std::size_t j, std::size_t nj) {
  if (i >= na || j >= nj) throw std::out_of_range("ConvexCombination::vertex: index out of range");
  ConvexCombination c;
  c.kappa_a.assign(na, 0.0);
  c.kappa_j.assign(nj, 0.0);
  c.kappa_a[i] = 1.0;
  c.kappa_j[j] = 1.0;
  return c;
}

void ConvexCombination::validate() const {
  auto check = [](const std::vector<double>& w, const char* what) {
    if (w.empty()) throw std::invalid_argument(std::string(what) + ": empty weight list");
    double sum = 0.0;
    for (double x : w) {
      if (!(x >= 0.0)) throw std::invalid_argument(std::string(what) + ": negative or NaN weight");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument(std::string(what) + ": weights sum to " + std::to_string(sum));
  };
  check(kappa_a, "kappa_a");
  check(kappa_j, "kappa_j");
}

std::pair<Mat, Mat> instantiate(const ImpulsiveSystem& sys, const ConvexCombination& combo) {
  if (combo.kappa_a.size() != sys.a_vertices.size() || combo.kappa_j.size() != sys.j_vertices.size())
    throw std::invalid_argument("instantiate: weight count does not match vertex count");
  combo.validate();
  Mat a = Mat::Zero(sys.n, sys.n);
  Mat j = Mat::Zero(sys.n, sys.n);
  for (std::size_t i = 0; i < sys.a_vertices.size(); ++i)
    if (combo.kappa_a[i] != 0.0) a += combo.kappa_a[i] * sys.a_vertices[i];
  for (std::size_t i = 0; i < sys.j_vertices.size(); ++i)
    if (combo.kappa_j[i] != 0.0) j += combo.kappa_j[i] * sys.j_vertices[i];
  return {a, j};
}

const char* to_string(FlowClass c) {
  switch (c) {
    case FlowClass::Hurwitz: return "Hurwitz";
    case FlowClass::AntiHurwitz: return "anti-Hurwitz";
    case FlowClass::Otherwise: return "otherwise";
  }
  return "?";
}

const char* to_string(JumpClass c) {
  switch (c) {
    case JumpClass::Schur: return "Schur";
    case JumpClass::AntiSchur: return "anti-Schur";
    case JumpClass::Otherwise: return "otherwise";
  }
  return "?";
}

Applicability classify(const ImpulsiveSystem& sys, double margin) {
  sys.validate();
  bool hurwitz = true, anti_hurwitz = true, schur = true, anti_schur = true;
  for (const Mat& a : sys.a_vertices) {
    hurwitz = hurwitz && is_hurwitz(a, margin);
    anti_hurwitz = anti_hurwitz && is_anti_hurwitz(a, margin);
  }
  for (const Mat& j : sys.j_vertices) {
    schur = schur && is_schur(j, margin);
    anti_schur = anti_schur && is_anti_schur(j, margin);
  }
  Applicability r;
  r.flow = hurwitz ? FlowClass::Hurwitz : anti_hurwitz ? FlowClass::AntiHurwitz : FlowClass::Otherwise;
  r.jump = schur ? JumpClass::Schur : anti_schur ? JumpClass::AntiSchur : JumpClass::Otherwise;

  switch (r.jump) {
    case JumpClass::Schur:
      r.arbitrary = r.flow == FlowClass::Hurwitz;
      r.minimal = r.flow == FlowClass::Hurwitz;
      r.maximal = r.flow != FlowClass::Hurwitz;
      r.ranged = r.flow == FlowClass::Otherwise;
      break;
    case JumpClass::AntiSchur:
      r.minimal = r.flow == FlowClass::Hurwitz;
      break;
    case JumpClass::Otherwise:
      r.minimal = r.flow == FlowClass::Hurwitz;
      r.ranged = r.flow == FlowClass::Otherwise;
      break;
  }
  if (!r.arbitrary && !r.minimal && !r.maximal && !r.ranged)
    r.note = "no result applicable; ranged may still be attempted";
  return r;
}

ImpulsiveSystem sampled_data_embed(const Mat& atilde, const Mat& b, const Mat& k) {
  require_square(atilde, "sampled_data_embed");
  const Eigen::Index n = atilde.rows();
  const Eigen::Index m = b.cols();
  if (b.rows() != n || k.rows() != m || k.cols() != n) {
    throw DimensionError("sampled_data_embed: expected B " + std::to_string(n) + "xm and K mx" +
                         std::to_string(n) + ", got B " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + " and K " + std::to_string(k.rows()) + "x" +
                         std::to_string(k.cols()));
  }
  Mat a = Mat::Zero(n + m, n + m);
  a.topLeftCorner(n, n) = atilde;
  a.topRightCorner(n, m) = b;
  Mat j = Mat::Zero(n + m, n + m);
  j.topLeftCorner(n, n).setIdentity();
  j.bottomLeftCorner(m, n) = k;
  return make_nominal(a, j, "sampled-data");
}

namespace {

Mat parse_matrix(const json& v, const std::string& field) {
  if (!v.is_array() || v.empty()) throw ParseError(field, "expected a nonempty array of rows");
  const std::size_t rows = v.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string rf = field + "[" + std::to_string(r) + "]";
    if (!v[r].is_array() || v[r].empty()) throw ParseError(rf, "expected a nonempty array of numbers");
    if (r == 0) cols = v[r].size();
    if (v[r].size() != cols)
      throw ParseError(rf, "row has " + std::to_string(v[r].size()) + " entries, expected " + std::to_string(cols));
  }
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const json& x = v[r][c];
      const std::string ef = field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
      if (!x.is_number()) throw ParseError(ef, "expected a number");
      const double d = x.get<double>();
      if (!std::isfinite(d)) throw ParseError(ef, "non-finite entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = d;
    }
  }
  return m;
}

std::vector<Mat> parse_vertices(const json& doc, const char* key, int n) {
  if (!doc.contains(key)) throw ParseError(key, "missing");
  const json& v = doc[key];
  if (!v.is_array() || v.empty()) throw ParseError(key, "expected a nonempty list of matrices");
  std::vector<Mat> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string f = std::string(key) + "[" + std::to_string(i) + "]";
    Mat m = parse_matrix(v[i], f);
    if (m.rows() != n || m.cols() != n) {
      throw ParseError(f, "matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }
    out.push_back(std::move(m));
  }
  return out;
}

json matrix_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ImpulsiveSystem load_system(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!doc.is_object()) throw ParseError("<document>", "expected a JSON object");
  if (!doc.contains("n")) throw ParseError("n", "missing");
  if (!doc["n"].is_number_integer() || doc["n"].get<long long>() <= 0)
    throw ParseError("n", "expected a positive integer");
  ImpulsiveSystem sys;
  sys.n = doc["n"].get<int>();
  sys.a_vertices = parse_vertices(doc, "A_vertices", sys.n);
  sys.j_vertices = parse_vertices(doc, "J_vertices", sys.n);
  if (doc.contains("label")) {
    if (!doc["label"].is_string()) throw ParseError("label", "expected a string");
    sys.label = doc["label"].get<std::string>();
  }
  return sys;
}

ImpulsiveSystem load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("<file>", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_system(ss.str());
}

std::string system_to_json(const ImpulsiveSystem& sys) {
  json doc;
  doc["n"] = sys.n;
  doc["A_vertices"] = json::array();
  for (const Mat& a : sys.a_vertices) doc["A_vertices"].push_back(matrix_json(a));
  doc["J_vertices"] = json::array();
  for (const Mat& j : sys.j_vertices) doc["J_vertices"].push_back(matrix_json(j));
  if (!sys.label.empty()) doc["label"] = sys.label;
  return doc.dump(2);
}

namespace examples {

namespace {
Mat m2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m << a, b, c, d;
  return m;
}
}  // namespace

ImpulsiveSystem ex1() { return make_nominal(m2(1, 3, -1, 2), 0.5 * Mat::Identity(2, 2), "ex1"); }
ImpulsiveSystem ex2() { return make_nominal(m2(-1, 0, 1, -2), m2(2, 1, 1, 3), "ex2"); }
ImpulsiveSystem ex3() { return make_nominal(m2(-1, 0.1, 0, 1.2), m2(1.2, 0, 0, 0.5), "ex3"); }

ImpulsiveSystem ex4() {
  Mat b(2, 1);
  b << 0.0, 0.1;
  Mat k(1, 2);
  k << -3.75, -11.5;
  ImpulsiveSystem sys = sampled_data_embed(m2(0, 1, 0, -0.1), b, k);
  sys.label = "ex4";
  return sys;
}

ImpulsiveSystem robust1() {
  ImpulsiveSystem sys;
  sys.n = 2;
  sys.a_vertices = {m2(1, 3, -1, 2), m2(2, 2, 0, 6)};
  sys.j_vertices = {0.5 * Mat::Identity(2, 2)};
  sys.label = "robust1";
  return sys;
}

ImpulsiveSystem robust2() {
  ImpulsiveSystem sys;
  sys.n = 2;
  sys.a_vertices = {m2(-1, 0.1, 0, 1.2)};
  sys.j_vertices = {m2(1.3, 0, 0, 0.25), m2(1.1, 0, 0, 0.5)};
  sys.label = "robust2";
  return sys;
}

}  // namespace examples

}  // namespace dwellcert

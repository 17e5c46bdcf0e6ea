#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dwellcert/linalg.hpp"

namespace dwellcert {

/// Schema or validation failure while reading a system description. `field()` names
/// the offending JSON path, e.g. "A_vertices[1][0]".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// x' = A x between impulses, x+ = J x at impulses, with A and J ranging over
/// independent polytopes given by their vertices. Singletons make the system nominal.
struct ImpulsiveSystem {
  int n = 0;
  std::vector<Mat> a_vertices;
  std::vector<Mat> j_vertices;
  std::string label;

  bool nominal() const { return a_vertices.size() == 1 && j_vertices.size() == 1; }
  /// The single vertex of a nominal system; throws std::logic_error otherwise.
  const Mat& A() const;
  const Mat& J() const;
  /// Throws DimensionError or std::invalid_argument on an inconsistent system.
  void validate() const;
};

ImpulsiveSystem make_nominal(const Mat& a, const Mat& j, std::string label = {});

struct Periodic {
  double T;
};
struct MinimalDT {
  double T;
};
struct MaximalDT {
  double T;
};
struct Ranged {
  double tmin;
  double tmax;
};
struct Arbitrary {};

using DwellTimeSpec = std::variant<Periodic, MinimalDT, MaximalDT, Ranged, Arbitrary>;

/// Bounds must be finite and above eps; Ranged needs tmin <= tmax.
void validate(const DwellTimeSpec& spec, double eps = default_config().dwell_epsilon);
std::string describe(const DwellTimeSpec& spec);

/// Weights over the A-vertices (kappa_a) and J-vertices (kappa_j).
struct ConvexCombination {
  std::vector<double> kappa_a;
  std::vector<double> kappa_j;

  static ConvexCombination vertex(std::size_t i, std::size_t na, std::size_t j, std::size_t nj);
  /// Nonnegative weights summing to 1 within 1e-12.
  void validate() const;
};

std::pair<Mat, Mat> instantiate(const ImpulsiveSystem& sys, const ConvexCombination& combo);

enum class FlowClass { Hurwitz, AntiHurwitz, Otherwise };
enum class JumpClass { Schur, AntiSchur, Otherwise };

const char* to_string(FlowClass c);
const char* to_string(JumpClass c);

struct Applicability {
  FlowClass flow = FlowClass::Otherwise;
  JumpClass jump = JumpClass::Otherwise;
  bool arbitrary = false;
  bool minimal = false;
  bool maximal = false;
  bool ranged = false;
  std::string note;
};

/// Applicability of each dwell-time result. For polytopic systems a class holds only
/// if it holds at every vertex; eigenvalues within `margin` of the boundary count as
/// "otherwise".
Applicability classify(const ImpulsiveSystem& sys, double margin = default_config().eig_margin);

/// State (x, u) for x' = Atilde x + B u with zero-order-hold u = K x(t_k).
ImpulsiveSystem sampled_data_embed(const Mat& atilde, const Mat& b, const Mat& k);

/// Parses {"n", "A_vertices", "J_vertices", "label"?}; matrices are row-major nested arrays.
ImpulsiveSystem load_system(const std::string& json_text);
ImpulsiveSystem load_system_file(const std::string& path);
std::string system_to_json(const ImpulsiveSystem& sys);

/// Data of the worked examples used by the reproduction suite.
namespace examples {
ImpulsiveSystem ex1();
ImpulsiveSystem ex2();
ImpulsiveSystem ex3();
ImpulsiveSystem ex4();
ImpulsiveSystem robust1();
ImpulsiveSystem robust2();
}  // namespace examples

}  // namespace dwellcert

#pragma once

#include <string>
#include <vector>

#include "dwellcert/analysis.hpp"
#include "dwellcert/search.hpp"
#include "dwellcert/trajectory.hpp"
#include "json.hpp"

namespace dwellcert {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

/// "diag:a,b,..." or "full:r11,r12,...;r21,..." (rows separated by ';').
Mat parse_matrix_spec(const std::string& spec, int n);
/// "1,2,3".
Vec parse_vector_spec(const std::string& spec);
/// "periodic:T", "random:tmin,tmax,seed", "log", or "file:path" with one instant per line.
ImpulseSequence parse_sequence_spec(const std::string& spec, int horizon);

nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const ImpulsiveSystem& sys);
nlohmann::json to_json(const SolveReport& r);
nlohmann::json to_json(const Verdict& v, bool with_certificate = true);
nlohmann::json to_json(const BoundaryResult& b);
nlohmann::json to_json(const NumericConfig& c);
nlohmann::json to_json(const AnalysisOptions& o);
nlohmann::json to_json(const SearchOptions& o);

/// Skeleton shared by every command: schema version, tool version, argv echo.
nlohmann::json report_header(const std::string& command, const std::vector<std::string>& argv);

/// Applies DWELLCERT_THREADS and DWELLCERT_PROFILE ("default" or "fine") overrides.
void apply_environment(AnalysisOptions& ao, SearchOptions& so);

struct ReproRow {
  std::string suite;
  std::string quantity;
  double expected = 0.0;
  double computed = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<std::string> suite_names();
/// Runs one suite ("all" runs every suite). Throws std::invalid_argument on an unknown name.
std::vector<ReproRow> reproduce(const std::string& suite, const AnalysisOptions& ao = {},
                                const SearchOptions& so = {});

}  // namespace dwellcert

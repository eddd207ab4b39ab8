#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "condfield/analysis.hpp"
#include "condfield/model.hpp"
#include "condfield/report.hpp"
#include "condfield/specifications.hpp"

namespace condfield {

/// Doubles rendered as decimals with 17 significant digits, enough to
/// round-trip IEEE doubles exactly.
std::string format_double(double v);

/// Line-oriented report stream; "json" emits one JSON object per line,
/// "text" the human-readable equivalent. Output depends only on the inputs,
/// never on clocks or paths beyond what the caller passes in.
class ReportWriter {
 public:
  ReportWriter(std::ostream& os, std::string format);

  void header(const std::string& command, const std::string& model_path, const RunConfig& cfg);
  void report(const Report& r);
  void value_line(const std::string& key, const std::vector<std::pair<std::string, std::string>>& fields);
  void summary(int exit_code, int checks, int failures, bool sampled_any);

 private:
  std::ostream& os_;
  bool json_;
};

/// Specification tables in the fixture format: a header line followed by one
/// line per (V, z) distribution, keys in canonical order.
void write_spec_table(std::ostream& os, const FSpec& spec, const std::string& system);
void write_spec_table(std::ostream& os, const OneFSpec& spec, const std::string& system);
void write_spec_table(std::ostream& os, const PalmSpec& spec, const std::string& system);
void write_spec_table(std::ostream& os, const DSpecFinite& spec, const std::string& system);

/// Rho matrix rows in the report stream format.
void write_rho_matrix(ReportWriter& w, const RhoMatrix& rho);

}  // namespace condfield

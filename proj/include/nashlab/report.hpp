#ifndef NASHLAB_REPORT_HPP
#define NASHLAB_REPORT_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nashlab/heat_engine.hpp"
#include "nashlab/inequalities.hpp"
#include "nashlab/moderation.hpp"

namespace nashlab {

/// Shortest round-trip decimal form; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// A JSON number, or the strings "inf"/"-inf"/"nan" (JSON has no non-finite numbers).
nlohmann::json json_number(double x);
nlohmann::json json_array(std::span<const double> xs);

nlohmann::json to_json(const InequalityReport& r);
/// {t[], lhs[], rhs[], ratio[], c_emp, script_Mq, CK, C_emp_energy, C_emp_pointwise, ...}; `bounds` may be null.
nlohmann::json to_json(const ModerationReport& m, const BoundReport* bounds);
nlohmann::json to_json(const BoundReport& b);

/// Columns t,E,D,N,lambda,p00,mass_defect.
void write_trace_csv(std::ostream& os, const HeatTrace& tr);
/// Columns x1..xd,value.
void write_snapshot_csv(std::ostream& os, const SiteFunction& u);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Standalone SVG line chart; non-finite points are skipped.
std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<Series>& series, bool log_y = false);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace nashlab

#endif  // NASHLAB_REPORT_HPP

#include "nashlab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace nashlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

nlohmann::json json_array(std::span<const double> xs) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : xs) a.push_back(json_number(x));
  return a;
}

nlohmann::json to_json(const InequalityReport& r) {
  return {{"name", r.name},
          {"corpus", r.corpus},
          {"L", r.L},
          {"samples", r.samples},
          {"best_constant", json_number(r.best_constant)},
          {"argmax_descriptor", r.argmax}};
}

nlohmann::json to_json(const BoundReport& b) {
  return {{"CK", json_number(b.CK)},
          {"script_Mq", json_number(b.script_mq)},
          {"exponent", json_number(b.exponent)},
          {"energy_t", json_array(b.t)},
          {"scaled_energy", json_array(b.scaled_energy)},
          {"energy_bound", json_number(b.energy_bound)},
          {"C_emp_energy", json_number(b.C_emp_energy)},
          {"pointwise_t", json_array(b.pointwise_t)},
          {"p00", json_array(b.p00)},
          {"cauchy_schwarz_bound", json_array(b.cs_bound)},
          {"scaled_p00", json_array(b.scaled_p00)},
          {"pointwise_bound", json_array(b.pointwise_bound)},
          {"C_emp_pointwise", json_number(b.C_emp_pointwise)},
          {"cauchy_schwarz_holds", b.cauchy_schwarz_holds},
          {"cauchy_schwarz_worst", json_number(b.cauchy_schwarz_worst)}};
}

nlohmann::json to_json(const ModerationReport& m, const BoundReport* bounds) {
  nlohmann::json j = {{"t", json_array(m.t)},
                      {"lhs", json_array(m.lhs)},
                      {"rhs", json_array(m.rhs)},
                      {"ratio", json_array(m.ratio)},
                      {"c_emp", json_number(m.c_emp)},
                      {"c_emp_literal_tail", json_number(m.c_emp_literal)},
                      {"inconsistent", m.inconsistent}};
  if (bounds) {
    j["script_Mq"] = json_number(bounds->script_mq);
    j["CK"] = json_number(bounds->CK);
    j["C_emp_energy"] = json_number(bounds->C_emp_energy);
    j["C_emp_pointwise"] = json_number(bounds->C_emp_pointwise);
    j["bounds"] = to_json(*bounds);
  }
  return j;
}

void write_trace_csv(std::ostream& os, const HeatTrace& tr) {
  os << "t,E,D,N,lambda,p00,mass_defect\n";
  for (std::size_t k = 0; k < tr.size(); ++k)
    os << format_double(tr.t[k]) << ',' << format_double(tr.energy[k]) << ',' << format_double(tr.dirichlet[k]) << ','
       << format_double(tr.moment[k]) << ',' << format_double(tr.lambda[k]) << ',' << format_double(tr.p00[k]) << ','
       << format_double(tr.mass[k] - 1.0) << '\n';
}

void write_snapshot_csv(std::ostream& os, const SiteFunction& u) {
  const Geometry& g = *u.geometry;
  for (int i = 0; i < g.dim(); ++i) os << 'x' << (i + 1) << ',';
  os << "value\n";
  for (std::size_t x = 0; x < u.size(); ++x) {
    const Site s = g.site(x);
    for (int i = 0; i < g.dim(); ++i) os << s[i] << ',';
    os << format_double(u[x]) << '\n';
  }
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

std::string tick(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<Series>& series, bool log_y) {
  constexpr double W = 720, H = 440, left = 80, right = 160, top = 40, bottom = 60;
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  auto ty = [&](double y) { return log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!log_y || y > 0.0); };
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (usable(s.x[i], s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, ty(s.y[i]));
        y1 = std::max(y1, ty(s.y[i]));
      }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (W - left - right); };
  auto py = [&](double y) { return top + (y1 - ty(y)) / (y1 - y0) * (H - top - bottom); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << W - left - right << "\" height=\""
     << H - top - bottom << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    const double gx = px(xv);
    const double gy = top + (y1 - yv) / (y1 - y0) * (H - top - bottom);
    os << "<text x=\"" << fixed(gx) << "\" y=\"" << H - bottom + 18 << "\" text-anchor=\"middle\">" << tick(xv)
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << fixed(gy + 4) << "\" text-anchor=\"end\">"
       << tick(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    os << "<line x1=\"" << left << "\" x2=\"" << W - right << "\" y1=\"" << fixed(gy) << "\" y2=\"" << fixed(gy)
       << "\" stroke=\"#ddd\"/>\n";
  }
  os << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">" << escape(xlabel)
     << "</text>\n";
  os << "<text transform=\"translate(20," << (top + H - bottom) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << escape(ylabel) << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* colour = palette[k % (sizeof palette / sizeof *palette)];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      os << (first ? "" : " ") << fixed(px(s.x[i])) << ',' << fixed(py(s.y[i]));
      first = false;
    }
    os << "\"/>\n";
    const double ly = top + 16 + 18.0 * double(k);
    os << "<line x1=\"" << W - right + 10 << "\" x2=\"" << W - right + 30 << "\" y1=\"" << ly << "\" y2=\"" << ly
       << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - right + 35 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace nashlab

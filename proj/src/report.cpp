#include "lurecert/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lurecert {

std::string emit_yaml(const YAML::Node& root) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out.SetFloatPrecision(9);
  out << root;
  std::string text = out.c_str();
  text.push_back('\n');
  return text;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string fnv1a_hex(const std::string& data) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

YAML::Node strip_volatile(const YAML::Node& root) {
  if (root.IsMap()) {
    YAML::Node out(YAML::NodeType::Map);
    for (const auto& kv : root) {
      const std::string key = kv.first.as<std::string>();
      if (key == "timings" || key == "generated_at") continue;
      out[key] = strip_volatile(kv.second);
    }
    return out;
  }
  if (root.IsSequence()) {
    YAML::Node out(YAML::NodeType::Sequence);
    for (const auto& item : root) out.push_back(strip_volatile(item));
    return out;
  }
  return YAML::Clone(root);
}

namespace {

void append_g17(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::string trajectory_csv_text(const Trajectory& traj, int p1, int p2) {
  if (traj.y1.cols() != p1 || traj.y2.cols() != p2)
    throw std::invalid_argument("trajectory_csv_text: output dims mismatch");
  std::string text = "t";
  for (int i = 1; i <= traj.x.cols(); ++i) text += ",x" + std::to_string(i);
  for (int i = 1; i <= p1; ++i) text += ",y1_" + std::to_string(i);
  for (int i = 1; i <= p2; ++i) text += ",y2_" + std::to_string(i);
  for (int i = 1; i <= traj.w.cols(); ++i) text += ",w" + std::to_string(i);
  text += "\n";

  for (int j = 0; j < traj.samples(); ++j) {
    append_g17(text, traj.time(j));
    for (int i = 0; i < traj.x.cols(); ++i) {
      text += ',';
      append_g17(text, traj.x(j, i));
    }
    for (int i = 0; i < p1; ++i) {
      text += ',';
      append_g17(text, traj.y1(j, i));
    }
    for (int i = 0; i < p2; ++i) {
      text += ',';
      append_g17(text, traj.y2(j, i));
    }
    for (int i = 0; i < traj.w.cols(); ++i) {
      text += ',';
      append_g17(text, traj.w(j, i));
    }
    text += '\n';
  }
  return text;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          int p1, int p2) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  file << trajectory_csv_text(traj, p1, p2);
}

CsvData read_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("read_csv: cannot open " + path);
  CsvData data;
  std::string line;
  if (!std::getline(file, line)) throw std::runtime_error("read_csv: empty file");
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) data.header.push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) values.push_back(std::stod(cell));
    if (values.size() != data.header.size())
      throw std::runtime_error("read_csv: ragged row");
    rows.push_back(std::move(values));
  }
  data.values.resize(rows.size(), data.header.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) data.values(i, j) = rows[i][j];
  return data;
}

void write_svg_lineplot(const std::string& path,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& series,
                        const std::vector<std::string>& labels,
                        const std::string& title) {
  if (series.empty() || times.size() < 2)
    throw std::invalid_argument("write_svg_lineplot: need data");
  for (const auto& s : series)
    if (s.size() != times.size())
      throw std::invalid_argument("write_svg_lineplot: length mismatch");

  const int W = 900, H = 480, ml = 60, mr = 160, mt = 40, mb = 40;
  double lo = series[0][0], hi = series[0][0];
  for (const auto& s : series)
    for (double v : s) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  const double t0 = times.front(), t1 = times.back();
  const auto X = [&](double t) {
    return ml + (t - t0) / (t1 - t0) * (W - ml - mr);
  };
  const auto Y = [&](double v) {
    return H - mb - (v - lo) / (hi - lo) * (H - mt - mb);
  };
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << H << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";

  const size_t stride = std::max<size_t>(1, times.size() / 2000);
  for (size_t k = 0; k < series.size(); ++k) {
    svg << "<polyline fill=\"none\" stroke=\"" << palette[k % 8]
        << "\" stroke-width=\"1.2\" points=\"";
    for (size_t j = 0; j < times.size(); j += stride)
      svg << X(times[j]) << ',' << Y(series[k][j]) << ' ';
    svg << X(times.back()) << ',' << Y(series[k].back());
    svg << "\"/>\n";
    const std::string label = k < labels.size() ? labels[k] : "";
    svg << "<text x=\"" << W - mr + 10 << "\" y=\"" << mt + 16 * (k + 1)
        << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << palette[k % 8] << "\">" << label << "</text>\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g .. %g", lo, hi);
  svg << "<text x=\"8\" y=\"" << mt << "\" font-family=\"sans-serif\" "
      << "font-size=\"11\">" << buf << "</text>\n";
  svg << "</svg>\n";

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("write_svg_lineplot: cannot open " + path);
  file << svg.str();
}

}  // namespace lurecert

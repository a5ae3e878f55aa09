#pragma once

#include "lurecert/simulate.hpp"

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <string>
#include <vector>

namespace lurecert {

/// Deterministic YAML emission: block style, 17 significant digits for
/// floating point, stable key order as built.
std::string emit_yaml(const YAML::Node& root);

/// FNV-1a 64-bit content hash, reported in run summaries so outputs can be
/// tied to their exact inputs.
std::uint64_t fnv1a(const std::string& data);
std::string fnv1a_hex(const std::string& data);

/// Copy of a report with volatile keys (timings, generation timestamps)
/// removed at every level; the stable part round-trips byte identically.
YAML::Node strip_volatile(const YAML::Node& root);

/// Header t,x1..xn,y1_1..y1_p1,y2_1..y2_p2,w1..wm2 and one row per sample
/// with 17 significant digits.
std::string trajectory_csv_text(const Trajectory& traj, int p1, int p2);
void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          int p1, int p2);

struct CsvData {
  std::vector<std::string> header;
  Matrix values;
};

CsvData read_csv(const std::string& path);

/// Minimal standalone SVG line plot of the given series against time.
void write_svg_lineplot(const std::string& path,
                        const std::vector<double>& times,
                        const std::vector<std::vector<double>>& series,
                        const std::vector<std::string>& labels,
                        const std::string& title);

}  // namespace lurecert

#pragma once

// Flat-file formats and JSON configs used by the command-line front-end.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "furstenberg/boxcount.hpp"
#include "furstenberg/construct_box.hpp"
#include "furstenberg/construct_packing.hpp"
#include "furstenberg/grassmann.hpp"

namespace furstenberg::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

/// Header `x1,...,xd`, one point per row.
std::string points_csv(const PointCloud& cloud);
PointCloud parse_points_csv(const std::string& text, double resolution_floor);

/// Header `v1,...,vd,a1,...,ad`: unit direction then translation.
std::string lines_csv(const LineFamily& family);
LineFamily parse_lines_csv(const std::string& text, double resolution_floor);

/// Header `line,x1,...,xd`: marks tagged with the index of their line.
std::string marks_csv(const packing::MarkedLineState& state);
std::vector<std::vector<Vec>> parse_marks_csv(const std::string& text, std::size_t num_lines);

/// {"d", "cantor": {"base", "digits"} or "s", "t", "M", "N", "depth", "seed", "cap"}.
box::BoxSharpSpec parse_box_spec(const nlohmann::json& j);
nlohmann::ordered_json to_json(const box::BoxSharpSpec& spec);

struct PackingConfig {
  int d = 2;
  double s = 0.5;
  double t = 1.0;
  packing::EtaSchedule schedule;
  packing::RunOptions run;
  std::optional<std::uint64_t> seed;
};

/// {"d", "s", "t", "schedule": {"mode", "etas"}, "K", "caps": {...}, "b_first", "seed"}.
/// Without "etas" the schedule is generated from mode and K.
PackingConfig parse_packing_config(const nlohmann::json& j);
nlohmann::ordered_json to_json(const PackingConfig& cfg);

}  // namespace furstenberg::io

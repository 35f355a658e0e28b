#include "furstenberg/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "furstenberg/error.hpp"

namespace furstenberg::io {

namespace {

using nlohmann::json;

std::vector<std::string> split_row(const std::string& row) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(row);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\r')) --e;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e) {
    throw Error(ErrorKind::invalid_input, "row " + std::to_string(line_no) + ": cannot parse '" + s + "'");
  }
  return v;
}

// Rows of numbers after a header that must match `expect`.
std::vector<std::vector<double>> parse_table(const std::string& text, const std::vector<std::string>& expect) {
  std::istringstream in(text);
  std::string row;
  if (!std::getline(in, row)) throw Error(ErrorKind::invalid_input, "missing CSV header");
  if (!row.empty() && row.back() == '\r') row.pop_back();
  if (split_row(row) != expect) throw Error(ErrorKind::invalid_input, "unexpected CSV header '" + row + "'");
  std::vector<std::vector<double>> rows;
  for (std::size_t line_no = 2; std::getline(in, row); ++line_no) {
    if (row.empty() || row == "\r") continue;
    const std::vector<std::string> cells = split_row(row);
    if (cells.size() != expect.size()) {
      throw Error(ErrorKind::invalid_input, "row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                                " fields, expected " + std::to_string(expect.size()));
    }
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (const std::string& c : cells) vals.push_back(parse_number(c, line_no));
    rows.push_back(std::move(vals));
  }
  return rows;
}

std::vector<std::string> numbered(const std::string& prefix, int d) {
  std::vector<std::string> out;
  for (int i = 1; i <= d; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

int header_dim(const std::string& text, std::size_t skip, char kind) {
  const std::string first = text.substr(0, text.find('\n'));
  const std::size_t fields = split_row(first).size();
  if (fields < skip) throw Error(ErrorKind::invalid_input, "malformed CSV header");
  const std::size_t n = fields - skip;
  if (kind == 'l') {
    if (n % 2 != 0) throw Error(ErrorKind::invalid_input, "line CSV needs 2d columns");
    return static_cast<int>(n / 2);
  }
  return static_cast<int>(n);
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  return out + "\n";
}

void append_row(std::string& out, ConstVecView v, bool leading_comma) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i || leading_comma) out += ',';
    out += format_double(v[i]);
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::invalid_parameter, where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw Error(ErrorKind::invalid_parameter, "unknown key '" + it.key() + "' in " + where);
  }
}

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::invalid_parameter, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::invalid_input, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::invalid_input, "cannot write " + path.string());
  out << content;
}

std::string points_csv(const PointCloud& cloud) {
  std::string out = join(numbered("x", cloud.dim()));
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    append_row(out, cloud.point(i), false);
    out += '\n';
  }
  return out;
}

PointCloud parse_points_csv(const std::string& text, double resolution_floor) {
  const int d = header_dim(text, 0, 'p');
  std::vector<double> coords;
  for (const auto& row : parse_table(text, numbered("x", d))) coords.insert(coords.end(), row.begin(), row.end());
  return PointCloud(d, std::move(coords), resolution_floor);
}

std::string lines_csv(const LineFamily& family) {
  std::vector<std::string> cols = numbered("v", family.dim);
  for (const std::string& c : numbered("a", family.dim)) cols.push_back(c);
  std::string out = join(cols);
  for (const AffineLine& l : family.lines) {
    append_row(out, l.direction().unit(), false);
    append_row(out, l.translation(), true);
    out += '\n';
  }
  return out;
}

LineFamily parse_lines_csv(const std::string& text, double resolution_floor) {
  const int d = header_dim(text, 0, 'l');
  std::vector<std::string> cols = numbered("v", d);
  for (const std::string& c : numbered("a", d)) cols.push_back(c);
  LineFamily family{d, {}, resolution_floor};
  for (const auto& row : parse_table(text, cols)) {
    const ConstVecView v(row.data(), static_cast<std::size_t>(d));
    const ConstVecView a(row.data() + d, static_cast<std::size_t>(d));
    // Rounded CSV values are re-projected rather than trusted as orthogonal.
    family.lines.push_back(AffineLine::standard_form(a, v));
  }
  return family;
}

std::string marks_csv(const packing::MarkedLineState& state) {
  std::vector<std::string> cols{"line"};
  for (const std::string& c : numbered("x", state.d)) cols.push_back(c);
  std::string out = join(cols);
  for (std::size_t i = 0; i < state.marks.size(); ++i) {
    for (const Vec& x : state.marks[i]) {
      out += std::to_string(i);
      append_row(out, x, true);
      out += '\n';
    }
  }
  return out;
}

std::vector<std::vector<Vec>> parse_marks_csv(const std::string& text, std::size_t num_lines) {
  const int d = header_dim(text, 1, 'p');
  std::vector<std::string> cols{"line"};
  for (const std::string& c : numbered("x", d)) cols.push_back(c);
  std::vector<std::vector<Vec>> out(num_lines);
  for (const auto& row : parse_table(text, cols)) {
    const double idx = row[0];
    if (!(idx >= 0.0) || idx != std::floor(idx) || idx >= static_cast<double>(num_lines)) {
      throw Error(ErrorKind::invalid_input, "mark references line " + format_double(idx) + " of " +
                                                std::to_string(num_lines));
    }
    out[static_cast<std::size_t>(idx)].emplace_back(row.begin() + 1, row.end());
  }
  return out;
}

box::BoxSharpSpec parse_box_spec(const json& j) {
  reject_unknown(j, {"d", "cantor", "s", "t", "M", "N", "depth", "seed", "cap"}, "box config");
  box::BoxSharpSpec spec;
  spec.d = field(j, "d", spec.d);
  spec.t = field(j, "t", spec.t);
  spec.M = field(j, "M", spec.M);
  spec.N = field(j, "N", spec.N);
  spec.depth = field(j, "depth", spec.depth);
  spec.seed = field(j, "seed", spec.seed);
  spec.cap = field(j, "cap", spec.cap);
  if (j.contains("cantor") && j.contains("s")) {
    throw Error(ErrorKind::invalid_parameter, "give either 'cantor' or 's', not both");
  }
  if (j.contains("cantor")) {
    const json& c = j.at("cantor");
    reject_unknown(c, {"base", "digits"}, "cantor");
    spec.cantor.base = field(c, "base", spec.cantor.base);
    spec.cantor.digits = field(c, "digits", spec.cantor.digits);
  } else if (j.contains("s")) {
    spec.cantor = cantor_for_dimension(field(j, "s", 0.0));
  }
  spec.validate();
  return spec;
}

nlohmann::ordered_json to_json(const box::BoxSharpSpec& spec) {
  nlohmann::ordered_json j;
  j["d"] = spec.d;
  j["cantor"] = {{"base", spec.cantor.base}, {"digits", spec.cantor.digits}};
  j["t"] = spec.t;
  j["M"] = spec.M;
  j["N"] = spec.N;
  j["depth"] = spec.depth;
  j["seed"] = spec.seed;
  j["cap"] = spec.cap;
  return j;
}

PackingConfig parse_packing_config(const json& j) {
  reject_unknown(j, {"d", "s", "t", "schedule", "K", "caps", "b_first", "seed", "reject_degenerate"},
                 "packing config");
  PackingConfig cfg;
  cfg.d = field(j, "d", cfg.d);
  cfg.s = field(j, "s", cfg.s);
  cfg.t = field(j, "t", cfg.t);
  cfg.run.b_first = field(j, "b_first", false);
  cfg.run.step.reject_degenerate = field(j, "reject_degenerate", false);
  if (j.contains("seed")) cfg.seed = field<std::uint64_t>(j, "seed", 0);
  if (j.contains("caps")) {
    const json& c = j.at("caps");
    reject_unknown(c, {"max_lines", "max_marks"}, "caps");
    cfg.run.step.caps.max_lines = field(c, "max_lines", cfg.run.step.caps.max_lines);
    cfg.run.step.caps.max_marks = field(c, "max_marks", cfg.run.step.caps.max_marks);
  }
  const int K = field(j, "K", -1);
  std::string mode = "demo";
  std::vector<double> etas;
  double first = 0.5;
  if (j.contains("schedule")) {
    const json& s = j.at("schedule");
    reject_unknown(s, {"mode", "etas", "first"}, "schedule");
    mode = field(s, "mode", mode);
    etas = field(s, "etas", etas);
    first = field(s, "first", first);
  }
  if (mode != "demo" && mode != "strict") throw Error(ErrorKind::invalid_parameter, "schedule mode must be demo or strict");
  const auto m = mode == "strict" ? packing::ScheduleMode::strict : packing::ScheduleMode::demo;
  if (!etas.empty()) {
    if (K >= 0 && K != static_cast<int>(etas.size()) - 1) {
      throw Error(ErrorKind::invalid_parameter, "K disagrees with the length of schedule.etas");
    }
    cfg.schedule.etas = std::move(etas);
    cfg.schedule.mode = m;
  } else {
    if (K < 0) throw Error(ErrorKind::invalid_parameter, "packing config needs K or schedule.etas");
    cfg.schedule = m == packing::ScheduleMode::strict ? packing::EtaSchedule::strict(K, first)
                                                      : packing::EtaSchedule::demo(K);
  }
  cfg.schedule.validate();
  packing::initial_state(cfg.d, cfg.s, cfg.t);  // parameter range check
  return cfg;
}

nlohmann::ordered_json to_json(const PackingConfig& cfg) {
  nlohmann::ordered_json j;
  j["d"] = cfg.d;
  j["s"] = cfg.s;
  j["t"] = cfg.t;
  j["schedule"] = {{"mode", cfg.schedule.mode == packing::ScheduleMode::strict ? "strict" : "demo"},
                   {"etas", cfg.schedule.etas}};
  j["K"] = cfg.schedule.K();
  j["caps"] = {{"max_lines", cfg.run.step.caps.max_lines}, {"max_marks", cfg.run.step.caps.max_marks}};
  j["b_first"] = cfg.run.b_first;
  j["reject_degenerate"] = cfg.run.step.reject_degenerate;
  if (cfg.seed) j["seed"] = *cfg.seed;
  return j;
}

}  // namespace furstenberg::io

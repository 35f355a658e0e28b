#include "furstenberg/cli.hpp"

#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "furstenberg/boxcount.hpp"
#include "furstenberg/construct_box.hpp"
#include "furstenberg/construct_packing.hpp"
#include "furstenberg/error.hpp"
#include "furstenberg/io.hpp"
#include "furstenberg/verifier.hpp"

namespace furstenberg::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string scales;
  std::string format = "csv";
};

struct Scales {
  double max = 0.0;
  double min = 0.0;
};

Scales parse_scales(const std::string& text, Scales fallback) {
  if (text.empty()) return fallback;
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorKind::invalid_parameter, "--scales expects max,min");
  Scales s;
  try {
    s.max = std::stod(text.substr(0, comma));
    s.min = std::stod(text.substr(comma + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_parameter, "--scales expects two numbers, got '" + text + "'");
  }
  if (!(s.min > 0.0 && s.min <= s.max && s.max < 1.0)) {
    throw Error(ErrorKind::invalid_parameter, "--scales needs 0 < min <= max < 1");
  }
  return s;
}

nlohmann::json load_json(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::invalid_parameter, "--config is required");
  try {
    return nlohmann::json::parse(io::read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_parameter, "config " + path + " is not valid JSON: " + e.what());
  }
}

fs::path out_dir(const Options& opt, bool create) {
  if (opt.out_dir.empty()) throw Error(ErrorKind::invalid_parameter, "--out is required");
  const fs::path dir(opt.out_dir);
  if (create) {
    fs::create_directories(dir);
  } else if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::invalid_input, "artifact directory " + dir.string() + " does not exist");
  }
  return dir;
}

std::uint64_t resolve_seed(const Options& opt, const nlohmann::json& cfg) {
  if (opt.seed) return *opt.seed;
  if (cfg.contains("seed")) return cfg.at("seed").get<std::uint64_t>();
  throw Error(ErrorKind::invalid_parameter, "a seed is required (config field 'seed' or --seed)");
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

ojson thresholds_json(int d, double s, double t) {
  const verifier::Thresholds th = verifier::thresholds(d, s, t);
  return {{"d", d}, {"s", s}, {"t", t}, {"box", th.box}, {"packing", th.packing}, {"hausdorff", th.hausdorff}};
}

int construct_box(const Options& opt, std::ostream& out) {
  const nlohmann::json cfg = load_json(opt.config);
  box::BoxSharpSpec spec = io::parse_box_spec(cfg);
  spec.seed = resolve_seed(opt, cfg);
  const fs::path dir = out_dir(opt, true);
  const box::BoxConstruction c = box::prepare(spec);
  const PointCloud x = box::build_X(c);
  const LineFamily lines = box::build_lines(c);
  io::write_file(dir / "points.csv", io::points_csv(x));
  io::write_file(dir / "lines.csv", io::lines_csv(lines));

  ojson m;
  m["command"] = "construct-box";
  m["kind"] = "box";
  m["spec"] = io::to_json(spec);
  m["seed"] = spec.seed;
  m["achieved_s"] = spec.cantor.dimension();
  m["collapsed"] = spec.collapsed();
  m["counts"] = {{"points", x.size()}, {"lines", lines.size()}, {"copies", c.copies.size()}};
  m["resolution_floor"] = x.resolution_floor();
  m["thresholds"] = thresholds_json(spec.d, spec.cantor.dimension(), spec.t);
  io::write_file(dir / "manifest.json", dump(m));
  out << "construct-box: " << x.size() << " points, " << lines.size() << " lines -> " << dir.string() << "\n";
  return kExitOk;
}

int construct_packing(const Options& opt, std::ostream& out) {
  const nlohmann::json cfg_json = load_json(opt.config);
  io::PackingConfig cfg = io::parse_packing_config(cfg_json);
  cfg.seed = resolve_seed(opt, cfg_json);
  const fs::path dir = out_dir(opt, true);
  const packing::Trajectory traj = packing::run_alternating(cfg.d, cfg.s, cfg.t, cfg.schedule, cfg.run);
  const packing::MarkedLineState& last = traj.back();
  io::write_file(dir / "trajectory.csv", packing::trajectory_csv(traj));
  io::write_file(dir / "lines.csv", io::lines_csv(last.line_family()));
  io::write_file(dir / "marks.csv", io::marks_csv(last));
  io::write_file(dir / "points.csv", io::points_csv(last.mark_cloud()));

  ojson steps = ojson::array();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const packing::MarkedLineState& st = traj[k];
    const packing::SeparationReport sep = packing::check_separation(st);
    ojson row{{"k", st.step},
              {"eta", st.eta},
              {"option", st.history.empty() ? "-" : std::string(1, packing::to_char(st.history.back()))},
              {"num_lines", st.num_lines()},
              {"num_marks", st.num_marks()},
              {"predicted_factor", st.stats.predicted_factor},
              {"min_replacement", st.stats.min_replacement},
              {"max_replacement", st.stats.max_replacement},
              {"radius", st.stats.radius},
              {"degenerate", st.stats.degenerate},
              {"separation_ok", sep.ok}};
    if (k > 0) row["nesting_ok"] = packing::check_nesting(traj[k - 1], st).ok;
    steps.push_back(std::move(row));
  }
  ojson m;
  m["command"] = "construct-packing";
  m["kind"] = "packing";
  m["config"] = io::to_json(cfg);
  m["seed"] = *cfg.seed;
  m["decay_compliant"] = cfg.schedule.decay_compliant();
  m["counts"] = {{"lines", last.num_lines()}, {"marks", last.num_marks()}};
  m["resolution_floor"] = last.eta;
  m["steps"] = std::move(steps);
  m["thresholds"] = thresholds_json(cfg.d, cfg.s, cfg.t);
  io::write_file(dir / "manifest.json", dump(m));
  out << "construct-packing: K=" << cfg.schedule.K() << ", " << last.num_lines() << " lines, " << last.num_marks()
      << " marks -> " << dir.string() << "\n";
  if (!cfg.schedule.decay_compliant()) out << "note: demo schedule does not decay fast enough for the limit argument\n";
  return kExitOk;
}

struct Artifacts {
  ojson manifest;
  std::string kind;
  int d = 2;
  double s = 0.0;
  double t = 0.0;
  double floor = 0.0;
  PointCloud points{1, 1.0};
  LineFamily lines;
};

Artifacts load_artifacts(const fs::path& dir) {
  Artifacts a;
  for (const char* f : {"manifest.json", "points.csv", "lines.csv"}) {
    if (!fs::exists(dir / f)) throw Error(ErrorKind::invalid_input, "missing artifact " + (dir / f).string());
  }
  try {
    a.manifest = ojson::parse(io::read_file(dir / "manifest.json"));
    a.kind = a.manifest.at("kind").get<std::string>();
    a.floor = a.manifest.at("resolution_floor").get<double>();
    const ojson& th = a.manifest.at("thresholds");
    a.d = th.at("d").get<int>();
    a.s = th.at("s").get<double>();
    a.t = th.at("t").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_input, std::string("malformed manifest: ") + e.what());
  }
  a.points = io::parse_points_csv(io::read_file(dir / "points.csv"), a.floor);
  a.lines = io::parse_lines_csv(io::read_file(dir / "lines.csv"), a.floor);
  return a;
}

Scales default_scales(const Artifacts& a) {
  return a.kind == "box" ? Scales{std::ldexp(1.0, -4), std::ldexp(1.0, -12)}
                         : Scales{0.5, std::max(a.floor, std::ldexp(1.0, -12))};
}

void write_report(const fs::path& dir, const std::string& stem, const CoverReport& rep, const std::string& format) {
  if (format == "csv") {
    io::write_file(dir / (stem + ".csv"), cover_report_csv(rep));
    io::write_file(dir / (stem + ".json"), cover_report_json(rep));
    return;
  }
  ojson j = ojson::parse(cover_report_json(rep));
  ojson rows = ojson::array();
  for (const CoverRow& r : rep.rows) {
    rows.push_back({{"delta", r.delta}, {"count", r.count}, {"log_inv_delta", r.log_inv_delta}, {"log_count", r.log_count}});
  }
  j["rows"] = std::move(rows);
  io::write_file(dir / (stem + ".json"), dump(j));
}

int estimate(const Options& opt, std::ostream& out) {
  const fs::path dir = out_dir(opt, false);
  const Artifacts a = load_artifacts(dir);
  const Scales sc = parse_scales(opt.scales, default_scales(a));
  const std::vector<double> schedule = dyadic_schedule(sc.max, sc.min);
  const CoverReport x_rep = estimate_dimension(a.points, schedule);
  const CoverReport l_rep = estimate_family_dimension(a.lines, schedule);
  write_report(dir, "cover_X", x_rep, opt.format);
  write_report(dir, "cover_L", l_rep, opt.format);

  ojson th = thresholds_json(a.d, a.s, a.t);
  th["x_slope"] = x_rep.slope;
  th["l_slope"] = l_rep.slope;
  th["scales"] = {sc.max, sc.min};

  if (a.kind == "packing") {
    const io::PackingConfig cfg = io::parse_packing_config(nlohmann::json::parse(a.manifest.at("config").dump()));
    const packing::Trajectory traj = packing::run_alternating(cfg.d, cfg.s, cfg.t, cfg.schedule, cfg.run);
    ojson exps = ojson::array();
    for (std::size_t k = 1; k < traj.size(); ++k) {
      const packing::MarkedLineState& st = traj[k];
      const double denom = std::log(1.0 / st.eta);
      const std::size_t marks = grid_count(st.mark_cloud(), st.eta);
      const std::size_t cells = mesh_cover_count(st.line_family(), st.eta).count;
      exps.push_back({{"k", st.step},
                      {"eta", st.eta},
                      {"mark_count", marks},
                      {"mark_exponent", std::log(static_cast<double>(marks)) / denom},
                      {"line_cells", cells},
                      {"line_exponent", std::log(static_cast<double>(cells)) / denom}});
    }
    th["trajectory_exponents"] = std::move(exps);
  }
  io::write_file(dir / "thresholds.json", dump(th));
  out << "estimate: X slope " << format_double(x_rep.slope) << ", L slope " << format_double(l_rep.slope) << "\n";
  return kExitOk;
}

int verify(const Options& opt, std::ostream& out, std::ostream& err) {
  const fs::path dir = out_dir(opt, false);
  const Artifacts a = load_artifacts(dir);
  const Scales sc = parse_scales(opt.scales, default_scales(a));
  std::vector<double> schedule;
  for (double delta : dyadic_schedule(sc.max, sc.min)) {
    if (delta <= verifier::kMaxPigeonholeDelta && delta >= a.floor) schedule.push_back(delta);
  }

  std::optional<verifier::TwoPointFamily> pairs;
  if (a.kind == "packing" && fs::exists(dir / "marks.csv")) {
    pairs = verifier::pairs_from_marks(a.lines.lines, io::parse_marks_csv(io::read_file(dir / "marks.csv"), a.lines.size()));
    if (pairs->family.empty()) pairs.reset();
  }

  const double bracket = std::pow(3.0, a.d);
  ojson certs = ojson::array();
  std::string summary = "delta,branch,bound,measured,pass\n";
  ojson summary_json = ojson::array();
  std::size_t failures = 0;
  if (a.lines.empty()) err << "warning: empty line family, no certificates\n";

  const auto record = [&](const verifier::ExtractionCertificate& cert, std::size_t measured) {
    const bool pass = cert.witnesses_separated && static_cast<double>(cert.bound) <= bracket * static_cast<double>(measured);
    if (!pass) ++failures;
    ojson c = ojson::parse(verifier::certificate_json(cert, measured));
    c["pass"] = pass;
    certs.push_back(std::move(c));
    const std::string branch(verifier::to_string(cert.branch));
    summary += format_double(cert.delta) + "," + branch + "," + std::to_string(cert.bound) + "," +
               std::to_string(measured) + "," + (pass ? "true" : "false") + "\n";
    summary_json.push_back(
        {{"delta", cert.delta}, {"branch", branch}, {"bound", cert.bound}, {"measured", measured}, {"pass", pass}});
  };

  if (!a.lines.empty()) {
    for (double delta : schedule) {
      const std::size_t measured = grid_count(a.points, delta);
      record(verifier::pigeonhole_extract(a.lines, a.points, delta), measured);
      if (pairs && delta < 1.0) record(verifier::two_point_extract(*pairs, delta, a.t), measured);
    }
  }

  io::write_file(dir / "certificates.json", dump(certs));
  if (opt.format == "csv") {
    io::write_file(dir / "verify_summary.csv", summary);
  } else {
    io::write_file(dir / "verify_summary.json", dump(summary_json));
  }
  out << "verify: " << certs.size() << " certificates, " << failures << " failures\n";
  if (failures > 0) {
    err << "soundness violation: " << failures << " certificate(s) failed\n";
    return kExitUnsound;
  }
  return kExitOk;
}

std::string svg_plot(const CoverReport& rep, const std::string& title) {
  constexpr double W = 480, H = 360, pad = 48;
  double x0 = rep.rows.front().log_inv_delta, x1 = x0, y0 = rep.rows.front().log_count, y1 = y0;
  for (const CoverRow& r : rep.rows) {
    x0 = std::min(x0, r.log_inv_delta);
    x1 = std::max(x1, r.log_inv_delta);
    y0 = std::min(y0, r.log_count);
    y1 = std::max(y1, r.log_count);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const auto px = [&](double x) { return pad + (x - x0) / (x1 - x0) * (W - 2 * pad); };
  const auto py = [&](double y) { return H - pad - (y - y0) / (y1 - y0) * (H - 2 * pad); };
  const auto f = [](double v) { return format_double(std::round(v * 100.0) / 100.0); };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"360\" viewBox=\"0 0 480 360\">\n";
  s += "<rect width=\"480\" height=\"360\" fill=\"white\"/>\n";
  s += "<text x=\"240\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + " (slope " +
       format_double(std::round(rep.slope * 1e4) / 1e4) + ")</text>\n";
  s += "<line x1=\"" + f(pad) + "\" y1=\"" + f(H - pad) + "\" x2=\"" + f(W - pad) + "\" y2=\"" + f(H - pad) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + f(pad) + "\" y1=\"" + f(pad) + "\" x2=\"" + f(pad) + "\" y2=\"" + f(H - pad) +
       "\" stroke=\"black\"/>\n";
  s += "<text x=\"240\" y=\"352\" text-anchor=\"middle\" font-size=\"12\">log(1/delta)</text>\n";
  s += "<text x=\"14\" y=\"180\" font-size=\"12\" transform=\"rotate(-90 14 180)\" text-anchor=\"middle\">log N</text>\n";
  s += "<line x1=\"" + f(px(x0)) + "\" y1=\"" + f(py(rep.intercept + rep.slope * x0)) + "\" x2=\"" + f(px(x1)) +
       "\" y2=\"" + f(py(rep.intercept + rep.slope * x1)) + "\" stroke=\"steelblue\"/>\n";
  for (const CoverRow& r : rep.rows) {
    s += "<circle cx=\"" + f(px(r.log_inv_delta)) + "\" cy=\"" + f(py(r.log_count)) + "\" r=\"3\" fill=\"black\"/>\n";
  }
  return s + "</svg>\n";
}

CoverReport read_cover_csv(const fs::path& path) {
  std::istringstream in(io::read_file(path));
  std::string row;
  std::getline(in, row);
  if (row != "delta,count,log_inv_delta,log_count") throw Error(ErrorKind::invalid_input, "bad cover CSV " + path.string());
  std::vector<std::pair<double, std::size_t>> counts;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    std::istringstream cells(row);
    std::string delta, count;
    std::getline(cells, delta, ',');
    std::getline(cells, count, ',');
    counts.emplace_back(std::stod(delta), static_cast<std::size_t>(std::stoull(count)));
  }
  return fit_cover_report(std::move(counts), 1);
}

int report(const Options& opt, std::ostream& out) {
  const fs::path dir = out_dir(opt, false);
  ojson summary;
  int written = 0;
  for (const std::string stem : {"cover_X", "cover_L"}) {
    const fs::path csv = dir / (stem + ".csv");
    if (!fs::exists(csv)) continue;
    const CoverReport rep = read_cover_csv(csv);
    io::write_file(dir / (stem + ".svg"), svg_plot(rep, stem == "cover_X" ? "N_delta(X)" : "M_delta(L)"));
    summary[stem] = {{"slope", rep.slope}, {"residual", rep.residual}, {"num_scales", rep.rows.size()}};
    ++written;
  }
  if (written == 0) throw Error(ErrorKind::invalid_input, "no cover CSV in " + dir.string() + "; run estimate first");
  if (fs::exists(dir / "thresholds.json")) summary["thresholds"] = ojson::parse(io::read_file(dir / "thresholds.json"));
  io::write_file(dir / "report.json", dump(summary));
  out << "report: " << written << " plot(s) in " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Furstenberg-set construction and counting experiments"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  const auto add_common = [&](CLI::App* sub, bool with_config) {
    if (with_config) sub->add_option("--config", opt.config, "construction config JSON")->required();
    sub->add_option("--out", opt.out_dir, "artifact directory")->required();
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_option("--scales", opt.scales, "dyadic scale range max,min");
    sub->add_option("--format", opt.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };
  CLI::App* c_box = app.add_subcommand("construct-box", "build X and its line family");
  CLI::App* c_pack = app.add_subcommand("construct-packing", "run the marked-line construction");
  CLI::App* c_est = app.add_subcommand("estimate", "covering numbers and fitted slopes");
  CLI::App* c_ver = app.add_subcommand("verify", "lower-bound certificates");
  CLI::App* c_rep = app.add_subcommand("report", "SVG plots of the cover reports");
  add_common(c_box, true);
  add_common(c_pack, true);
  add_common(c_est, false);
  add_common(c_ver, false);
  add_common(c_rep, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUser;
  }
  for (CLI::App* sub : {c_box, c_pack, c_est, c_ver, c_rep}) {
    if (sub->parsed() && sub->count("--seed")) opt.seed = seed;
  }

  try {
    if (c_box->parsed()) return construct_box(opt, out);
    if (c_pack->parsed()) return construct_packing(opt, out);
    if (c_est->parsed()) return estimate(opt, out);
    if (c_ver->parsed()) return verify(opt, out, err);
    return report(opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::resource ? kExitResource : kExitUser;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUser;
  }
}

}  // namespace furstenberg::cli

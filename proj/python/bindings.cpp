#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "furstenberg/cantor.hpp"
#include "furstenberg/cli.hpp"
#include "furstenberg/construct_box.hpp"
#include "furstenberg/construct_packing.hpp"
#include "furstenberg/error.hpp"
#include "furstenberg/verifier.hpp"

namespace py = pybind11;
using namespace furstenberg;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointCloud cloud_from(const Array& pts, double floor) {
  if (pts.ndim() != 2) throw Error(ErrorKind::invalid_input, "points must be a 2-d array");
  const auto n = static_cast<std::size_t>(pts.shape(0)), d = static_cast<std::size_t>(pts.shape(1));
  std::vector<double> coords(pts.data(), pts.data() + n * d);
  return PointCloud(static_cast<int>(d), std::move(coords), floor);
}

Array array_from(const PointCloud& cloud) {
  Array out({static_cast<py::ssize_t>(cloud.size()), static_cast<py::ssize_t>(cloud.dim())});
  std::copy(cloud.coords().begin(), cloud.coords().end(), out.mutable_data());
  return out;
}

// Lines as an (n, 2d) array: unit direction then translation.
LineFamily family_from(const Array& rows, double floor) {
  if (rows.ndim() != 2 || rows.shape(1) % 2 != 0) throw Error(ErrorKind::invalid_input, "lines must be an (n, 2d) array");
  const auto d = static_cast<std::size_t>(rows.shape(1) / 2);
  LineFamily fam{static_cast<int>(d), {}, floor};
  for (py::ssize_t i = 0; i < rows.shape(0); ++i) {
    const double* r = rows.data(i, 0);
    fam.lines.push_back(AffineLine::standard_form(Vec(r + d, r + 2 * d), Vec(r, r + d)));
  }
  return fam;
}

Array array_from(const LineFamily& fam) {
  const auto d = static_cast<std::size_t>(fam.dim);
  Array out({static_cast<py::ssize_t>(fam.size()), static_cast<py::ssize_t>(2 * d)});
  double* p = out.mutable_data();
  for (const AffineLine& l : fam.lines) {
    p = std::copy(l.direction().unit().begin(), l.direction().unit().end(), p);
    p = std::copy(l.translation().begin(), l.translation().end(), p);
  }
  return out;
}

py::dict report_dict(const CoverReport& r) {
  py::list rows;
  for (const CoverRow& row : r.rows) rows.append(py::make_tuple(row.delta, row.count));
  py::dict d;
  d["slope"] = r.slope;
  d["intercept"] = r.intercept;
  d["residual"] = r.residual;
  d["monotone"] = r.monotone;
  d["rows"] = rows;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Finite-resolution Furstenberg set constructions and counting";
  py::register_exception<Error>(m, "Error", PyExc_ValueError);

  m.def("covering_count", [](int base, std::vector<int> digits, int k) {
    return covering_count(CantorSpec{base, std::move(digits)}, k);
  }, py::arg("base"), py::arg("digits"), py::arg("k"));
  m.def("cantor_points", [](int base, std::vector<int> digits, int depth) {
    return array_from(points_at_depth(CantorSpec{base, std::move(digits)}, depth));
  }, py::arg("base"), py::arg("digits"), py::arg("depth"));

  m.def("grid_count", [](const Array& pts, double delta, double floor) {
    return grid_count(cloud_from(pts, floor), delta);
  }, py::arg("points"), py::arg("delta"), py::arg("resolution_floor") = 1e-12);
  m.def("estimate_dimension", [](const Array& pts, const std::vector<double>& scales, double floor) {
    return report_dict(estimate_dimension(cloud_from(pts, floor), scales));
  }, py::arg("points"), py::arg("scales"), py::arg("resolution_floor") = 1e-12);
  m.def("dyadic_schedule", &dyadic_schedule, py::arg("delta_max"), py::arg("delta_min"));

  m.def("metric_d1", [](const Array& a, const Array& b) {
    return metric_d1(family_from(a, 0.0).lines.at(0), family_from(b, 0.0).lines.at(0));
  }, py::arg("line_a"), py::arg("line_b"), "Each line is a (1, 2d) array of direction then point.");
  m.def("mesh_cover_count", [](const Array& lines, double delta) {
    return mesh_cover_count(family_from(lines, 0.0), delta).count;
  }, py::arg("lines"), py::arg("delta"));

  m.def("build_box", [](int d, int base, std::vector<int> digits, double t, int M, int N, int depth) {
    box::BoxSharpSpec spec;
    spec.d = d;
    spec.cantor = CantorSpec{base, std::move(digits)};
    spec.t = t;
    spec.M = M;
    spec.N = N;
    spec.depth = depth;
    const box::BoxConstruction c = box::prepare(spec);
    const PointCloud x = box::build_X(c);
    return py::make_tuple(array_from(x), array_from(box::build_lines(c)), x.resolution_floor());
  }, py::arg("d") = 2, py::arg("base") = 3, py::arg("digits") = std::vector<int>{0, 2}, py::arg("t") = 1.5,
     py::arg("M") = 6, py::arg("N") = 6, py::arg("depth") = 6);

  m.def("run_packing", [](int d, double s, double t, std::vector<double> etas, bool b_first) {
    packing::RunOptions opts;
    opts.b_first = b_first;
    const packing::Trajectory traj =
        packing::run_alternating(d, s, t, packing::EtaSchedule{std::move(etas), packing::ScheduleMode::demo}, opts);
    py::list steps;
    for (const packing::MarkedLineState& st : traj) {
      py::dict row;
      row["eta"] = st.eta;
      row["option"] = st.history.empty() ? std::string("-") : std::string(1, packing::to_char(st.history.back()));
      row["num_lines"] = st.num_lines();
      row["num_marks"] = st.num_marks();
      row["pred_lines"] = st.pred_lines;
      row["pred_marks"] = st.pred_marks;
      row["separation_ok"] = packing::check_separation(st).ok;
      steps.append(row);
    }
    return steps;
  }, py::arg("d"), py::arg("s"), py::arg("t"), py::arg("etas"), py::arg("b_first") = false);

  m.def("thresholds", [](int d, double s, double t) {
    const verifier::Thresholds th = verifier::thresholds(d, s, t);
    return py::make_tuple(th.box, th.packing, th.hausdorff);
  }, py::arg("d"), py::arg("s"), py::arg("t"));
  m.def("pigeonhole_bound", [](const Array& lines, const Array& pts, double delta, double floor) {
    return verifier::pigeonhole_extract(family_from(lines, 0.0), cloud_from(pts, floor), delta).bound;
  }, py::arg("lines"), py::arg("points"), py::arg("delta"), py::arg("resolution_floor") = 1e-9);

  m.def("cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "furstenberg");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Run a command-line invocation in process; returns (exit code, stdout, stderr).");
}

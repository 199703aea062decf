#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "eqhms/cli.hpp"
#include "eqhms/error.hpp"
#include "eqhms/json_io.hpp"

namespace py = pybind11;
using namespace eqhms;

namespace {

py::tuple run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

std::string mirror_report(const std::string& geometry, const std::string& lambda, const std::string& precision,
                          bool degenerate) {
  auto geom = mirror::ToricMirrorGeometry::parse(geometry);
  auto lam = json_io::novikov_from_text(lambda);
  return json_io::mirror_report_to_json(mirror::correspondence_report(geom, lam, parse_rational(precision), degenerate))
      .dump();
}

std::string parse_novikov(const std::string& text) { return json_io::novikov_to_json(json_io::novikov_from_text(text)).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "eqhms native core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ArithmeticError);

  m.def("run_cli", &run_cli, py::arg("args"), "Run the command line; returns (exit_code, stdout, stderr).");
  m.def("mirror_report", &mirror_report, py::arg("geometry"), py::arg("lam"), py::arg("precision") = "4",
        py::arg("degenerate") = false);
  m.def("parse_novikov", &parse_novikov, py::arg("text"));
  m.def("jacobian_count", [](const std::string& name) {
    namespace fans = tropical::fans;
    tropical::NamedFan f;
    if (name == "p1") f = fans::p1();
    else if (name == "p2") f = fans::p2();
    else if (name == "p1xp1") f = fans::p1xp1();
    else if (name == "f1") f = fans::hirzebruch(1);
    else if (name == "c") f = fans::c();
    else if (name == "c2") f = fans::cn(2);
    else if (name == "bl0c2") f = fans::bl0c2();
    else throw InputError("unknown fan " + name);
    auto jc = tropical::jacobian_count(f.fan, f.phi);
    return py::make_tuple(jc.count, jc.max_cones, jc.equal);
  }, py::arg("fan"));
}

#include "eqhms/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "eqhms/error.hpp"
#include "eqhms/json_io.hpp"

namespace eqhms::cli {

namespace {

using json_io::json;

struct RunConfig {
  std::string input;
  std::string output;
  std::string precision_text;
  Rational precision{4};
  bool precision_given = false;
  int jet_order = 4;
  bool degenerate = false;

  // mirror / tropical
  std::string geometry = "cp1";
  std::string lambda;
  std::string fan;
  std::string lambda_vec;
};

json read_document(const std::string& source) {
  if (source.empty()) throw InputError("missing --input");
  std::string text;
  auto first = source.find_first_not_of(" \t\n");
  if (first != std::string::npos && (source[first] == '{' || source[first] == '[')) {
    text = source;
  } else {
    std::ifstream in(source);
    if (!in) throw InputError("cannot read " + source);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed JSON: ") + e.what());
  }
}

json residual_rows(const std::vector<ainfty::RelationResidual>& rows, const ainfty::GappedMonoid& mon) {
  json out = json::array();
  for (const auto& r : rows)
    out.push_back(json{{"k", r.k}, {"beta", mon.elements()[r.beta]}, {"residual", r.max_residual}});
  return out;
}

json axiom_json(const equivariant::AxiomReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.residuals) rows.push_back(json{{"name", r.name}, {"residual", r.max_residual}, {"pass", r.pass}});
  return json{{"pass", rep.pass}, {"residuals", rows}};
}

// ---------------------------------------------------------------------------

json run_mirror(const RunConfig& cfg) {
  auto geom = mirror::ToricMirrorGeometry::parse(cfg.geometry);
  if (cfg.lambda.empty()) throw InputError("missing --lambda");
  auto lambda = json_io::novikov_from_text(cfg.lambda);
  Rational E = cfg.precision;
  if (!cfg.precision_given && lambda.precision()) E = *lambda.precision();
  auto rep = mirror::correspondence_report(geom, lambda, E, cfg.degenerate);
  return json_io::mirror_report_to_json(rep);
}

std::pair<tropical::Fan, tropical::RatVec> load_fan(const std::string& source) {
  namespace fans = tropical::fans;
  static const std::map<std::string, tropical::NamedFan (*)()> named{
      {"p1", fans::p1}, {"p2", fans::p2}, {"c", fans::c}, {"p1xp1", fans::p1xp1}, {"bl0c2", fans::bl0c2}};
  if (auto it = named.find(source); it != named.end() && !std::filesystem::exists(source)) {
    auto f = it->second();
    return {f.fan, f.phi};
  }
  if (source == "c2" || source == "c3") {
    auto f = fans::cn(source[1] - '0');
    return {f.fan, f.phi};
  }
  if (source == "f1" || source == "f2") {
    auto f = fans::hirzebruch(source[1] - '0');
    return {f.fan, f.phi};
  }
  return json_io::fan_from_json(read_document(source));
}

json run_tropical(const RunConfig& cfg) {
  if (cfg.fan.empty()) throw InputError("missing --fan");
  auto [fan, phi] = load_fan(cfg.fan);
  auto val = tropical::validate(fan, phi);
  json issues = json::array();
  for (const auto& i : val.issues) issues.push_back(json{{"check", i.check}, {"witness", i.witness}});
  json out{{"fan", json_io::fan_to_json(fan, phi)},
           {"validation",
            {{"pass", val.pass()},
             {"primitive", val.primitive},
             {"unimodular", val.unimodular},
             {"full_dimensional", val.full_dimensional},
             {"pl_consistent", val.pl_consistent},
             {"strictly_convex", val.strictly_convex},
             {"issues", issues}}}};
  if (!val.pass()) throw InputError("invalid fan: " + val.issues[0].check + " fails (" + val.issues[0].witness + ")");

  auto poly = tropical::polyhedron(fan, phi);
  auto vecs = [](const std::vector<tropical::RatVec>& vs) {
    json a = json::array();
    for (const auto& v : vs) {
      json r = json::array();
      for (const auto& x : v) r.push_back(json_io::rational_to_json(x));
      a.push_back(r);
    }
    return a;
  };
  out["polyhedron"] = json{{"vertices", vecs(poly.vertices)}, {"rays", vecs(poly.rays)}};
  auto eps = tropical::epsilon_P(fan, phi);
  out["epsilon_P"] = eps.value ? json_io::rational_to_json(*eps.value) : json("inf");

  if (cfg.lambda_vec.empty()) throw InputError("missing --lambda-vec");
  auto lambda = json_io::novikov_vector_from_text(cfg.lambda_vec);
  auto crit = tropical::tropical_critical_points(fan, phi, lambda);
  const auto f = tropical::mirror_potential(fan, phi);
  json points = json::array();
  for (const auto& pt : crit.points) {
    auto lift = tropical::hensel_lift_critical(fan, phi, lambda, pt.cone, cfg.precision, f);
    json ls = json::array(), ys = json::array(), vals = json::array(), u = json::array();
    for (const auto& x : pt.lambda_sigma) ls.push_back(json_io::novikov_to_json(x));
    for (const auto& x : lift.y) ys.push_back(json_io::novikov_to_json(x));
    for (const auto& x : pt.valuations) vals.push_back(json_io::rational_to_json(x));
    for (const auto& x : pt.u) u.push_back(json_io::rational_to_json(x));
    double res = 0.0;
    for (const auto& r : lift.residual) res = std::max(res, r.max_abs_coefficient());
    points.push_back(json{{"cone", fan.max_cones[pt.cone]},
                          {"u", u},
                          {"valuations", vals},
                          {"lambda_sigma", ls},
                          {"lift",
                           {{"y", ys},
                            {"max_residual", res},
                            {"hessian_det", json_io::novikov_to_json(lift.hessian_det)},
                            {"nondegenerate", lift.nondegenerate}}}});
  }
  out["critical_points"] = points;
  auto jc = tropical::jacobian_count(fan, phi, lambda, cfg.precision);
  out["jacobian_count"] = json{{"count", jc.count}, {"max_cones", jc.max_cones}, {"equal", jc.equal}};
  return out;
}

json run_mf(const std::string& sub, const RunConfig& cfg) {
  auto doc = read_document(cfg.input);
  auto vars = json_io::vars_from_json(doc);
  if (sub == "verify") {
    auto m = json_io::mf_from_json(doc, vars);
    auto rep = mf::mf_verify(m);
    if (rep.pass) return json{{"ok", true}};
    return json{{"ok", false}, {"residual", rep.residual}};
  }
  if (sub == "stabilize") {
    if (!doc.contains("f")) throw InputError("stabilize needs \"f\" and \"w_list\"");
    auto m = json_io::mf_from_json(doc, vars);
    auto out = json_io::mf_to_json(m, vars);
    out["ok"] = mf::mf_verify(m).pass;
    return out;
  }
  // homdim
  const json& src = doc.contains("source") ? doc["source"] : doc;
  auto a = json_io::mf_from_json(src, vars);
  auto b = doc.contains("target") ? json_io::mf_from_json(doc["target"], vars) : a;
  mf::JetWindow<ComplexRational> window;
  window.order = cfg.jet_order;
  if (doc.contains("point")) {
    for (const auto& x : doc["point"]) window.point.push_back(json_io::complex_from_json(x));
    if (window.point.size() != vars.size()) throw InputError("point must have one coordinate per variable");
  } else {
    window.point.assign(vars.size(), ComplexRational(0));
  }
  auto h = mf::hom_cohomology_dim(a, b, window);
  return json{{"even", h.even}, {"odd", h.odd}, {"total", h.total()}, {"jet_order", cfg.jet_order}};
}

json run_check(const std::string& sub, const RunConfig& cfg) {
  auto doc = read_document(cfg.input);
  if (sub == "ainfty") {
    auto a = json_io::algebra_from_json(doc);
    auto rel = ainfty::check_ainfty(a);
    auto unit = ainfty::check_unitality(a);
    return json{{"pass", rel.pass && unit.pass},
                {"relations", residual_rows(rel.relations, a.monoid())},
                {"degree_violations", rel.degree_violations},
                {"ainfty_pass", rel.pass},
                {"unitality", {{"pass", unit.pass}, {"failures", unit.failures}}}};
  }
  if (sub == "gdiff") {
    if (doc.contains("basis")) {
      auto a = json_io::algebra_from_json(doc);
      auto rep = ainfty::check_gdiff_compat(a);
      return json{{"pass", rep.pass},
                  {"space", axiom_json(rep.space)},
                  {"interior", residual_rows(rep.interior, a.monoid())},
                  {"lie", residual_rows(rep.lie, a.monoid())},
                  {"interior_pass", rep.interior_pass},
                  {"lie_pass", rep.lie_pass},
                  {"unit_pass", rep.unit_pass},
                  {"consistent", rep.consistent}};
    }
    auto g = json_io::lie_from_json(doc.contains("lie_algebra") ? doc["lie_algebra"] : json("u1"));
    auto m = json_io::gdiff_from_json(doc.contains("space") ? doc["space"] : doc, g);
    return axiom_json(equivariant::check_gdiff_axioms(m, g));
  }
  // cartan
  auto g = json_io::lie_from_json(doc.contains("lie_algebra") ? doc["lie_algebra"] : json("u1"));
  auto m = json_io::gdiff_from_json(doc.contains("space") ? doc["space"] : doc, g);
  const int D = cfg.jet_order;
  auto dims = [](const std::map<int, int>& h) {
    json a = json::object();
    for (const auto& [k, d] : h) a[std::to_string(k)] = d;
    return a;
  };
  auto weil = equivariant::build_model(m, g, D, equivariant::ModelKind::Weil);
  auto cartan = equivariant::build_model(m, g, D, equivariant::ModelKind::Cartan);
  auto mq = equivariant::mathai_quillen(m, g, D);
  return json{{"D", D},
              {"safe_range", {cartan.min_degree, cartan.safe_max_degree}},
              {"weil", dims(equivariant::cohomology(weil))},
              {"cartan", dims(equivariant::cohomology(cartan))},
              {"mathai_quillen",
               {{"invertible", mq.invertible},
                {"lands_in_cartan", mq.lands_in_cartan},
                {"intertwines", mq.intertwines},
                {"dimensions_agree", mq.dimensions_agree}}}};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equivariant mirror symmetry toolkit", "eqhms"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--precision", cfg.precision_text, "energy/precision cutoff E (rational)");
    c->add_option("--jet-order", cfg.jet_order, "jet order D");
    c->add_flag("--degenerate", cfg.degenerate, "accept a degenerate critical point");
    c->add_option("-o,--output", cfg.output, "write the report to a file");
  };

  auto* mirror_cmd = app.add_subcommand("mirror", "critical points, branes and the correspondence report");
  mirror_cmd->add_option("--geometry", cfg.geometry, "cp1 or c");
  mirror_cmd->add_option("--lambda", cfg.lambda, "Novikov literal")->required();
  add_common(mirror_cmd);

  auto* trop_cmd = app.add_subcommand("tropical", "fan data, eps_P, tropical and lifted critical points");
  trop_cmd->add_option("--fan", cfg.fan, "fan JSON file or a builtin name")->required();
  trop_cmd->add_option("--lambda-vec", cfg.lambda_vec, "list of Novikov literals")->required();
  add_common(trop_cmd);

  auto* mf_cmd = app.add_subcommand("mf", "matrix factorizations");
  mf_cmd->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> mf_subs;
  for (const char* s : {"verify", "stabilize", "homdim"}) {
    auto* c = mf_cmd->add_subcommand(s);
    c->add_option("--input", cfg.input, "JSON file or inline document")->required();
    add_common(c);
    mf_subs.emplace_back(s, c);
  }

  auto* check_cmd = app.add_subcommand("check", "structure checks");
  check_cmd->require_subcommand(1);
  std::vector<std::pair<std::string, CLI::App*>> check_subs;
  for (const char* s : {"ainfty", "cartan", "gdiff"}) {
    auto* c = check_cmd->add_subcommand(s);
    c->add_option("--input", cfg.input, "JSON file or inline document")->required();
    add_common(c);
    check_subs.emplace_back(s, c);
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "eqhms: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (!cfg.precision_text.empty()) {
      cfg.precision = parse_rational(cfg.precision_text);
      cfg.precision_given = true;
    }
    if (sgn(cfg.precision) <= 0) throw InputError("--precision must be positive");
    if (cfg.jet_order < 1) throw InputError("--jet-order must be at least 1");

    json report;
    if (mirror_cmd->parsed()) {
      report = run_mirror(cfg);
    } else if (trop_cmd->parsed()) {
      report = run_tropical(cfg);
    } else if (mf_cmd->parsed()) {
      for (const auto& [name, c] : mf_subs)
        if (c->parsed()) report = run_mf(name, cfg);
    } else {
      for (const auto& [name, c] : check_subs)
        if (c->parsed()) report = run_check(name, cfg);
    }
    const std::string text = report.dump(2) + "\n";
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.output);
      if (!f) throw InputError("cannot write " + cfg.output);
      f << text;
    }
    return kOk;
  } catch (const HypothesisError& e) {
    err << "eqhms: hypothesis violated: " << e.what() << "\n";
    return kHypothesisError;
  } catch (const InputError& e) {
    err << "eqhms: " << e.what() << "\n";
    return kInputError;
  } catch (const json::exception& e) {
    err << "eqhms: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "eqhms: internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace eqhms::cli

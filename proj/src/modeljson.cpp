#include "supergeo/modeljson.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "supergeo/errors.hpp"

namespace supergeo {

namespace {

void dump_value(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += Json(key).dump();
        out += ':';
        dump_value(value, out);
      }
      out += '}';
      return;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_value(j[i], out);
      }
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) fail(ErrorKind::Validation, "cannot serialize a non-finite number");
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

// Pointer-tracked accessors, so schema errors name the offending element.

const Json& member(const Json& j, const char* key, const std::string& ptr) {
  if (!j.is_object()) fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) {
    fail(ErrorKind::Parse, "schema violation at " + ptr + ": missing \"" + key + "\"");
  }
  return *it;
}

std::string get_string(const Json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected a string");
  return j.get<std::string>();
}

bool get_bool(const Json& j, const std::string& ptr) {
  if (!j.is_boolean()) fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected a boolean");
  return j.get<bool>();
}

int get_int(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected an integer");
  }
  return j.get<int>();
}

double get_double(const Json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected a number");
  return j.get<double>();
}

const Json& get_array(const Json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected an array");
  return j;
}

std::vector<std::string> string_list(const Json& j, const std::string& ptr) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < get_array(j, ptr).size(); ++i) {
    out.push_back(get_string(j[i], ptr + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<int> int_list(const Json& j, const std::string& ptr) {
  std::vector<int> out;
  for (std::size_t i = 0; i < get_array(j, ptr).size(); ++i) {
    out.push_back(get_int(j[i], ptr + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<double> double_list(const Json& j, const std::string& ptr) {
  std::vector<double> out;
  for (std::size_t i = 0; i < get_array(j, ptr).size(); ++i) {
    out.push_back(get_double(j[i], ptr + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<std::vector<double>> point_list(const Json& j, const std::string& ptr) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < get_array(j, ptr).size(); ++i) {
    out.push_back(double_list(j[i], ptr + "/" + std::to_string(i)));
  }
  return out;
}

std::vector<SuperExpr> expr_list(const Json& j, const CoordinateSystem& cs,
                                 const std::string& ptr) {
  std::vector<SuperExpr> out;
  for (std::size_t i = 0; i < get_array(j, ptr).size(); ++i) {
    const std::string where = ptr + "/" + std::to_string(i);
    try {
      out.push_back(parse(get_string(j[i], where), cs));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Parse) throw;
      fail(ErrorKind::Parse, std::string(e.what()) + " (at " + where + ")");
    }
  }
  return out;
}

Json exprs_to_json(const std::vector<SuperExpr>& exprs, const CoordinateSystem& cs) {
  Json out = Json::array();
  for (const auto& e : exprs) out.push_back(to_string(e, cs));
  return out;
}

SuperManifoldModel resolve_ref(const Json& j, const ModelResolver& resolve,
                               const std::string& ptr) {
  if (j.is_string()) {
    if (!resolve) fail(ErrorKind::Parse, "schema violation at " + ptr + ": no resolver for name");
    return resolve(j.get<std::string>());
  }
  if (j.is_object()) return model_from_json(j);
  fail(ErrorKind::Parse, "schema violation at " + ptr + ": expected a model name or object");
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump_value(j, out);
  return out;
}

Json parse_json(const std::string& text, const std::string& where) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Parse, where + ": " + e.what());
  }
}

Json model_to_json(const SuperManifoldModel& model) {
  Json j;
  j["name"] = model.name;
  if (!model.description.empty()) j["description"] = model.description;
  j["dim"] = Json{{"even", model.even_dim}, {"odd", model.odd_dim}};
  j["compact_body"] = model.compact_body;

  Json charts = Json::array();
  for (const auto& ch : model.charts) {
    Json c;
    c["id"] = ch.id;
    c["coords"] = Json{{"even", ch.coords.even_names()}, {"odd", ch.coords.odd_names()}};
    c["domain"] = exprs_to_json(ch.domain, ch.coords);
    c["interior_samples"] = ch.interior_samples;
    Json box = Json::array();
    for (const auto& [lo, hi] : ch.seed_box) box.push_back(Json::array({lo, hi}));
    c["seed_box"] = box;
    charts.push_back(std::move(c));
  }
  j["charts"] = std::move(charts);

  Json transitions = Json::array();
  for (const auto& t : model.transitions) {
    const CoordinateSystem& cs = model.chart(t.from).coords;
    Json tj;
    tj["from"] = t.from;
    tj["to"] = t.to;
    Json comps = Json::array();
    for (const auto& e : t.even_components) comps.push_back(to_string(e, cs));
    for (const auto& e : t.odd_components) comps.push_back(to_string(e, cs));
    tj["components"] = std::move(comps);
    Json overlaps = Json::array();
    for (const auto& o : t.overlaps) {
      overlaps.push_back(Json{{"predicate", exprs_to_json(o.predicate, cs)},
                              {"samples", o.samples}});
    }
    tj["overlaps"] = std::move(overlaps);
    transitions.push_back(std::move(tj));
  }
  j["transitions"] = std::move(transitions);

  if (!model.triples.empty()) {
    Json triples = Json::array();
    for (const auto& t : model.triples) {
      triples.push_back(Json{{"a", t.a}, {"b", t.b}, {"c", t.c}, {"samples", t.samples}});
    }
    j["triples"] = std::move(triples);
  }
  if (model.pi) j["pi_structure"] = Json{{"pairing", model.pi->pairing}};
  return j;
}

SuperManifoldModel model_from_json(const Json& j) {
  SuperManifoldModel model;
  model.name = get_string(member(j, "name", ""), "/name");
  if (j.contains("description")) {
    model.description = get_string(j["description"], "/description");
  }
  const Json& dim = member(j, "dim", "");
  model.even_dim = get_int(member(dim, "even", "/dim"), "/dim/even");
  model.odd_dim = get_int(member(dim, "odd", "/dim"), "/dim/odd");
  model.compact_body = get_bool(member(j, "compact_body", ""), "/compact_body");

  const Json& charts = get_array(member(j, "charts", ""), "/charts");
  for (std::size_t i = 0; i < charts.size(); ++i) {
    const std::string ptr = "/charts/" + std::to_string(i);
    const Json& c = charts[i];
    const Json& coords = member(c, "coords", ptr);
    CoordinateSystem cs(string_list(member(coords, "even", ptr + "/coords"), ptr + "/coords/even"),
                        string_list(member(coords, "odd", ptr + "/coords"), ptr + "/coords/odd"));
    if (cs.even_count() != model.even_dim || cs.odd_count() != model.odd_dim) {
      fail(ErrorKind::Parse,
           "schema violation at " + ptr + "/coords: chart dimensions disagree with /dim");
    }
    Chart chart{get_string(member(c, "id", ptr), ptr + "/id"), std::move(cs), {}, {}, {}};
    if (c.contains("domain")) chart.domain = expr_list(c["domain"], chart.coords, ptr + "/domain");
    if (c.contains("interior_samples")) {
      chart.interior_samples = point_list(c["interior_samples"], ptr + "/interior_samples");
    }
    if (c.contains("seed_box")) {
      const Json& box = get_array(c["seed_box"], ptr + "/seed_box");
      for (std::size_t d = 0; d < box.size(); ++d) {
        const auto pair = double_list(box[d], ptr + "/seed_box/" + std::to_string(d));
        if (pair.size() != 2) {
          fail(ErrorKind::Parse, "schema violation at " + ptr + "/seed_box/" +
                                     std::to_string(d) + ": expected [lo, hi]");
        }
        chart.seed_box.emplace_back(pair[0], pair[1]);
      }
    }
    model.charts.push_back(std::move(chart));
  }

  if (j.contains("transitions")) {
    const Json& transitions = get_array(j["transitions"], "/transitions");
    for (std::size_t i = 0; i < transitions.size(); ++i) {
      const std::string ptr = "/transitions/" + std::to_string(i);
      const Json& t = transitions[i];
      TransitionMap map;
      map.from = get_string(member(t, "from", ptr), ptr + "/from");
      map.to = get_string(member(t, "to", ptr), ptr + "/to");
      const CoordinateSystem& cs = model.chart(map.from).coords;
      const auto comps = expr_list(member(t, "components", ptr), cs, ptr + "/components");
      if (static_cast<int>(comps.size()) != model.even_dim + model.odd_dim) {
        fail(ErrorKind::Parse, "schema violation at " + ptr +
                                   "/components: expected even then odd components, " +
                                   std::to_string(model.even_dim + model.odd_dim) + " total");
      }
      map.even_components.assign(comps.begin(), comps.begin() + model.even_dim);
      map.odd_components.assign(comps.begin() + model.even_dim, comps.end());
      if (t.contains("overlaps")) {
        const Json& overlaps = get_array(t["overlaps"], ptr + "/overlaps");
        for (std::size_t k = 0; k < overlaps.size(); ++k) {
          const std::string optr = ptr + "/overlaps/" + std::to_string(k);
          OverlapComponent comp;
          comp.predicate = expr_list(member(overlaps[k], "predicate", optr), cs, optr + "/predicate");
          comp.samples = point_list(member(overlaps[k], "samples", optr), optr + "/samples");
          map.overlaps.push_back(std::move(comp));
        }
      }
      model.transitions.push_back(std::move(map));
    }
  }

  if (j.contains("triples")) {
    const Json& triples = get_array(j["triples"], "/triples");
    for (std::size_t i = 0; i < triples.size(); ++i) {
      const std::string ptr = "/triples/" + std::to_string(i);
      const Json& t = triples[i];
      model.triples.push_back(TripleOverlap{
          get_string(member(t, "a", ptr), ptr + "/a"), get_string(member(t, "b", ptr), ptr + "/b"),
          get_string(member(t, "c", ptr), ptr + "/c"),
          point_list(member(t, "samples", ptr), ptr + "/samples")});
    }
  }

  if (j.contains("pi_structure")) {
    PiStructure pi;
    const Json& pairing = member(j["pi_structure"], "pairing", "/pi_structure");
    for (std::size_t i = 0; i < get_array(pairing, "/pi_structure/pairing").size(); ++i) {
      pi.pairing.push_back(int_list(pairing[i], "/pi_structure/pairing/" + std::to_string(i)));
    }
    model.pi = std::move(pi);
  }
  return model;
}

Json morphism_to_json(const MorphismModel& f) {
  Json j;
  j["name"] = f.name;
  j["source"] = model_to_json(f.source);
  j["target"] = model_to_json(f.target);
  Json entries = Json::array();
  for (const auto& e : f.entries) {
    const CoordinateSystem& cs = f.source.chart(e.source_chart).coords;
    entries.push_back(Json{{"source_chart", e.source_chart},
                           {"target_chart", e.target_chart},
                           {"even_components", exprs_to_json(e.even_components, cs)},
                           {"odd_components", exprs_to_json(e.odd_components, cs)},
                           {"validity", exprs_to_json(e.validity, cs)},
                           {"samples", e.samples}});
  }
  j["entries"] = std::move(entries);
  return j;
}

MorphismModel morphism_from_json(const Json& j, const ModelResolver& resolve) {
  MorphismModel f;
  f.name = get_string(member(j, "name", ""), "/name");
  f.source = resolve_ref(member(j, "source", ""), resolve, "/source");
  f.target = resolve_ref(member(j, "target", ""), resolve, "/target");
  const Json& entries = get_array(member(j, "entries", ""), "/entries");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string ptr = "/entries/" + std::to_string(i);
    const Json& ej = entries[i];
    MorphismEntry e;
    e.source_chart = get_string(member(ej, "source_chart", ptr), ptr + "/source_chart");
    e.target_chart = get_string(member(ej, "target_chart", ptr), ptr + "/target_chart");
    const CoordinateSystem& cs = f.source.chart(e.source_chart).coords;
    e.even_components =
        expr_list(member(ej, "even_components", ptr), cs, ptr + "/even_components");
    e.odd_components = expr_list(member(ej, "odd_components", ptr), cs, ptr + "/odd_components");
    if (ej.contains("validity")) e.validity = expr_list(ej["validity"], cs, ptr + "/validity");
    if (ej.contains("samples")) e.samples = point_list(ej["samples"], ptr + "/samples");
    f.entries.push_back(std::move(e));
  }
  return f;
}

Json submanifold_to_json(const SubmanifoldModel& z) {
  Json j;
  j["name"] = z.name;
  j["ambient"] = model_to_json(z.ambient);
  j["closed_body"] = z.closed_body;
  Json slices = Json::array();
  for (const auto& s : z.slices) {
    slices.push_back(Json{{"chart", s.chart},
                          {"zero_even", s.zero_even},
                          {"zero_odd", s.zero_odd},
                          {"frame_even", s.frame_even},
                          {"frame_odd", s.frame_odd}});
  }
  j["slices"] = std::move(slices);
  return j;
}

SubmanifoldModel submanifold_from_json(const Json& j, const ModelResolver& resolve) {
  SubmanifoldModel z{get_string(member(j, "name", ""), "/name"),
                     resolve_ref(member(j, "ambient", ""), resolve, "/ambient"),
                     {},
                     true};
  if (j.contains("closed_body")) z.closed_body = get_bool(j["closed_body"], "/closed_body");
  const Json& slices = get_array(member(j, "slices", ""), "/slices");
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const std::string ptr = "/slices/" + std::to_string(i);
    const Json& s = slices[i];
    z.slices.push_back(SubmanifoldSlice{
        get_string(member(s, "chart", ptr), ptr + "/chart"),
        int_list(member(s, "zero_even", ptr), ptr + "/zero_even"),
        int_list(member(s, "zero_odd", ptr), ptr + "/zero_odd"),
        int_list(member(s, "frame_even", ptr), ptr + "/frame_even"),
        int_list(member(s, "frame_odd", ptr), ptr + "/frame_odd")});
  }
  return z;
}

VectorField vector_field_from_json(const Json& j, const SuperManifoldModel& model) {
  VectorField field;
  const Json& per_chart = get_array(member(j, "per_chart", ""), "/per_chart");
  if (per_chart.size() != model.charts.size()) {
    fail(ErrorKind::Parse,
         "schema violation at /per_chart: expected one component list per chart");
  }
  for (std::size_t i = 0; i < per_chart.size(); ++i) {
    field.per_chart.push_back(expr_list(per_chart[i], model.charts[i].coords,
                                        "/per_chart/" + std::to_string(i)));
  }
  return field;
}

Json report_to_json(const IntersectionReport& report) {
  Json j;
  j["total"] = Json::array({report.total0, report.total1});
  j["skipped_seeds"] = report.skipped_seeds;
  j["newton_tol"] = report.newton_tol;
  j["sign_tol"] = report.sign_tol;
  Json points = Json::array();
  for (const auto& p : report.points) {
    points.push_back(Json{{"chart", p.chart},
                          {"x", p.x},
                          {"ambient_chart", p.ambient_chart},
                          {"signs", Json::array({p.signs.delta0, p.signs.delta1})},
                          {"cond0", p.cond0},
                          {"cond1", p.cond1}});
  }
  j["points"] = std::move(points);
  return j;
}

Json validation_to_json(const ValidationReport& report) {
  Json j;
  j["passed"] = report.passed;
  j["max_residual"] = report.max_residual;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    checks.push_back(Json{{"label", c.label},
                          {"passed", c.passed},
                          {"residual", c.residual},
                          {"detail", c.detail}});
  }
  j["checks"] = std::move(checks);
  return j;
}

Json classification_to_json(const std::string& model_name, const OrientabilityClass& cls) {
  Json j;
  j["model"] = model_name;
  switch (cls.tag) {
    case OrientabilityTag::Orientable: j["tag"] = "Orientable"; break;
    case OrientabilityTag::SemiOrientable: j["tag"] = "SemiOrientable"; break;
    case OrientabilityTag::Nonorientable: j["tag"] = "Nonorientable"; break;
  }
  j["components"] = cls.component_count;
  if (cls.generator) j["generator"] = Json::array({cls.generator->first, cls.generator->second});
  j["body_orientable"] = cls.body_orientable;
  j["bundle_orientable"] = cls.bundle_orientable;
  return j;
}

}  // namespace supergeo

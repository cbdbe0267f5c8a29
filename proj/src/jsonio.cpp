#include "valtree/jsonio.hpp"

#include <algorithm>

namespace valtree {

namespace {

Json mass_to_json(const ComplexRat& m) {
  if (m.is_real()) return Json(m.re.str());
  return Json::array({m.re.str(), m.im.str()});
}

ComplexRat mass_from_json(const Json& j) {
  if (j.is_string()) return ComplexRat(Rat::parse(j.get<std::string>()));
  if (j.is_array() && j.size() == 2)
    return ComplexRat(Rat::parse(j[0].get<std::string>()),
                      Rat::parse(j[1].get<std::string>()));
  throw domain_error("parse", "mass must be \"p/q\" or [re, im]");
}

void require_schema(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != name)
    throw domain_error("parse", "expected a document with schema \"" + name + "\"");
}

}  // namespace

Json skp_to_json(const Skp& s) {
  Json j;
  j["schema"] = "skp.v1";
  Json keys = Json::array();
  for (auto& k : s.keys()) keys.push_back(k.str());
  j["keys"] = std::move(keys);
  Json values = Json::array();
  for (auto& v : s.values()) values.push_back(v.str());
  j["values"] = std::move(values);
  j["swap"] = s.swapped();
  if (s.inf_sing_truncated) j["infinitely_singular_truncated"] = true;
  return j;
}

Skp skp_from_json(const Json& j) {
  require_schema(j, "skp.v1");
  std::vector<BiPoly> keys;
  for (auto& k : j.at("keys")) keys.push_back(parse_poly(k.get<std::string>()));
  std::vector<ExtRat> values;
  for (auto& v : j.at("values")) values.push_back(ExtRat::parse(v.get<std::string>()));
  bool swap = j.value("swap", false);
  Skp s(keys, values, swap);
  s.inf_sing_truncated = j.value("infinitely_singular_truncated", false);
  return s;
}

Json dualgraph_to_json(const DualGraph& g) {
  Json j;
  j["schema"] = "dualgraph.v1";
  j["root"] = 0;
  Json verts = Json::array();
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& vert = g.verts()[v];
    Json jv;
    jv["id"] = v;
    jv["a"] = vert.w.a;
    jv["b"] = vert.w.b;
    jv["kind"] = vert.kind == PointKind::Origin
                     ? "origin"
                     : (vert.kind == PointKind::Free ? "free" : "satellite");
    Json parents = Json::array();
    if (vert.parent1 >= 0) parents.push_back(vert.parent1);
    if (vert.parent2 >= 0) parents.push_back(vert.parent2);
    jv["parents"] = std::move(parents);
    verts.push_back(std::move(jv));
  }
  j["vertices"] = std::move(verts);
  Json edges = Json::array();
  for (auto& e : g.edges())
    if (e.alive) edges.push_back(Json::array({e.u_vertex, e.v_vertex}));
  j["edges"] = std::move(edges);
  Json att = Json::object();
  for (auto& [label, v] : g.attachments) att[label] = v;
  j["attachments"] = std::move(att);
  return j;
}

Json measure_to_json(const AtomicMeasure& m) {
  Json j;
  j["schema"] = "measure.v1";
  Json atoms = Json::array();
  for (auto& a : m.atoms()) {
    Json ja;
    ja["node"] = skp_to_json(a.node);
    ja["mass"] = mass_to_json(a.mass);
    if (a.curve) ja["curve"] = true;
    atoms.push_back(std::move(ja));
  }
  j["atoms"] = std::move(atoms);
  return j;
}

AtomicMeasure measure_from_json(const Json& j) {
  require_schema(j, "measure.v1");
  std::vector<Atom> atoms;
  for (auto& ja : j.at("atoms")) {
    Atom a;
    a.node = skp_from_json(ja.at("node"));
    a.mass = mass_from_json(ja.at("mass"));
    a.curve = ja.value("curve", false);
    atoms.push_back(std::move(a));
  }
  return AtomicMeasure(std::move(atoms));
}

Json equising_to_json(const EquisingData& d) {
  Json j;
  j["schema"] = "equi.v1";
  Json branches = Json::array();
  for (auto& b : d.branches) {
    Json jb;
    jb["label"] = b.label;
    jb["n"] = b.n;
    Json ca = Json::array();
    for (auto& a : b.charA) ca.push_back(a.str());
    jb["charA"] = std::move(ca);
    branches.push_back(std::move(jb));
  }
  j["branches"] = std::move(branches);
  Json contacts = Json::array();
  for (auto& [key, a] : d.contacts)
    contacts.push_back(Json::array({key.first, key.second, a.str()}));
  j["contacts"] = std::move(contacts);
  return j;
}

EquisingData equising_from_json(const Json& j) {
  require_schema(j, "equi.v1");
  EquisingData d;
  for (auto& jb : j.at("branches")) {
    EquisingData::Branch b;
    b.label = jb.at("label").get<std::string>();
    b.n = jb.at("n").get<long>();
    for (auto& a : jb.at("charA")) b.charA.push_back(Rat::parse(a.get<std::string>()));
    d.branches.push_back(std::move(b));
  }
  if (j.contains("contacts"))
    for (auto& jc : j.at("contacts")) {
      int a = jc.at(0).get<int>(), b = jc.at(1).get<int>();
      d.contacts[{std::min(a, b), std::max(a, b)}] = Rat::parse(jc.at(2).get<std::string>());
    }
  d.validate();
  return d;
}

IdealSpec::Generator parse_generator(const std::string& text,
                                     const std::vector<DeclaredBranch>& branches) {
  auto find_branch = [&](const std::string& name) {
    for (size_t i = 0; i < branches.size(); ++i)
      if (branches[i].name == name) return static_cast<int>(i);
    throw domain_error("parse", "unknown branch name '" + name + "' in a generator");
  };
  std::map<int, long> exps;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  bool expect_factor = true;
  while (true) {
    skip_ws();
    if (pos >= text.size()) break;
    if (!expect_factor) {
      if (text[pos] == '*') {
        ++pos;
        expect_factor = true;
        continue;
      }
      expect_factor = true;  // juxtaposition
    }
    size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                 text[pos] == '_'))
      ++pos;
    if (pos == start)
      throw domain_error("parse",
                         "expected a branch name at offset " + std::to_string(pos));
    std::string name = text.substr(start, pos - start);
    long exp = 1;
    skip_ws();
    if (pos < text.size() && text[pos] == '^') {
      ++pos;
      skip_ws();
      size_t es = pos;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
      if (pos == es) throw domain_error("parse", "expected an exponent");
      exp = std::stol(text.substr(es, pos - es));
      if (exp < 1) throw domain_error("parse", "exponents must be positive");
    }
    exps[find_branch(name)] += exp;
    expect_factor = false;
  }
  if (exps.empty()) throw domain_error("parse", "empty generator");
  IdealSpec::Generator g;
  for (auto& [b, e] : exps) g.push_back({b, e});
  return g;
}

std::string generator_to_string(const IdealSpec::Generator& gen,
                                const std::vector<DeclaredBranch>& branches) {
  std::string out;
  for (auto& f : gen) {
    if (!out.empty()) out += "*";
    out += branches[f.branch].name;
    if (f.exp > 1) out += "^" + std::to_string(f.exp);
  }
  return out;
}

Json ideal_to_json(const IdealSpec& spec) {
  Json j;
  j["schema"] = "ideal.v1";
  Json branches = Json::object();
  for (auto& b : spec.branches) {
    if (b.is_axis) continue;  // the axes are implicit
    branches[b.name] = b.param->str();
  }
  j["branches"] = std::move(branches);
  Json gens = Json::array();
  for (auto& g : spec.generators) gens.push_back(generator_to_string(g, spec.branches));
  j["generators"] = std::move(gens);
  return j;
}

IdealSpec ideal_from_json(const Json& j) {
  require_schema(j, "ideal.v1");
  IdealSpec spec;
  spec.branches.push_back(axis_branch(true));
  spec.branches.push_back(axis_branch(false));
  if (j.contains("branches"))
    for (auto& [name, text] : j.at("branches").items())
      spec.branches.push_back(make_branch(name, BranchParam::parse(text.get<std::string>())));
  for (auto& g : j.at("generators"))
    spec.generators.push_back(parse_generator(g.get<std::string>(), spec.branches));
  spec.validate();
  return spec;
}

Json invariants_to_json(const InvariantReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["monomial"] = r.monomial;
  j["rk"] = r.rk;
  j["rat_rk"] = r.rat_rk;
  j["tr_deg"] = r.tr_deg;
  j["skewness"] = r.alpha.str();
  j["thinness"] = r.thinness.str();
  j["multiplicity"] = r.mult;
  if (r.generic_mult) j["generic_multiplicity"] = *r.generic_mult;
  Json approx = Json::array();
  for (auto& a : r.approx) {
    Json ja;
    ja["index"] = a.index;
    ja["multiplicity"] = a.mult;
    ja["skewness"] = a.alpha.str();
    ja["thinness"] = a.thinness.str();
    approx.push_back(std::move(ja));
  }
  j["approximating_sequence"] = std::move(approx);
  Json semi = Json::array();
  for (auto& s : r.semigroup) semi.push_back(s.str());
  j["semigroup"] = std::move(semi);
  return j;
}

Json classical_to_json(const ClassicalInvariants& c) {
  Json j;
  j["n"] = c.n;
  j["g"] = c.g;
  j["beta"] = c.beta;
  j["e"] = c.e;
  j["n_i"] = c.nseq;
  j["beta_bar"] = c.beta_bar;
  return j;
}

Json eggers_to_json(const EggersTree& t) {
  Json j;
  j["schema"] = "eggers.v1";
  Json nodes = Json::array();
  for (auto& n : t.nodes) {
    Json jn;
    jn["param"] = n.param.str();
    jn["parent"] = n.parent;
    jn["branches"] = n.branches;
    jn["end"] = n.is_end;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

}  // namespace valtree

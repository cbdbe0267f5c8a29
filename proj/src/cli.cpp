#include "valtree/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "valtree/jsonio.hpp"
#include "valtree/selftest.hpp"

namespace valtree {

namespace {

struct CommonInputs {
  std::vector<std::string> branch_texts;
  std::string skp_file;
  std::string skp_file2;
  std::string poly_text;
  std::string ideal_text;
  std::string ideal2_text;
  std::string equi_file;
  bool json = false;
  bool dot = false;
  long trunc = 0;
  int jobs = 1;
  int vertex = -1;
};

std::vector<std::pair<std::string, BranchParam>> named_branches(const CommonInputs& in) {
  std::vector<std::pair<std::string, BranchParam>> out;
  for (size_t i = 0; i < in.branch_texts.size(); ++i)
    out.emplace_back("C" + std::to_string(i + 1), BranchParam::parse(in.branch_texts[i]));
  return out;
}

Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw domain_error("io", "cannot open '" + path + "'");
  Json j;
  f >> j;
  return j;
}

// Valuations named on the command line: SKP files first, then branches.
std::vector<Skp> input_valuations(const CommonInputs& in) {
  std::vector<Skp> vals;
  if (!in.skp_file.empty()) vals.push_back(skp_from_json(load_json(in.skp_file)));
  if (!in.skp_file2.empty()) vals.push_back(skp_from_json(load_json(in.skp_file2)));
  for (auto& [label, bp] : named_branches(in)) vals.push_back(skp_of_branch(bp, 48).skp);
  return vals;
}

IdealSpec parse_ideal(const std::string& text, const CommonInputs& in) {
  IdealSpec spec;
  spec.branches.push_back(axis_branch(true));
  spec.branches.push_back(axis_branch(false));
  for (auto& [label, bp] : named_branches(in)) spec.branches.push_back(make_branch(label, bp));

  // shorthand: m^k is the k-th power of the maximal ideal
  std::string s = text;
  auto strip = [](std::string v) {
    size_t a = v.find_first_not_of(" \t");
    size_t b = v.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
  };
  std::string whole = strip(s);
  if (whole == "m" || whole.rfind("m^", 0) == 0) {
    long k = whole == "m" ? 1 : std::stol(whole.substr(2));
    IdealSpec mk = IdealSpec::monomial(1, 1).power(k);
    mk.branches = spec.branches;  // keep any declared branches available
    return mk;
  }

  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string part = strip(s.substr(pos, comma == std::string::npos ? std::string::npos
                                                                      : comma - pos));
    if (!part.empty()) spec.generators.push_back(parse_generator(part, spec.branches));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  spec.validate();
  return spec;
}

std::string vertex_name(int v) { return "E" + std::to_string(v); }

void print_graph_text(const DualGraph& g, std::ostream& out) {
  out << "vertices:\n";
  for (size_t v = 0; v < g.vertex_count(); ++v) {
    const auto& vert = g.verts()[v];
    out << "  " << vertex_name(static_cast<int>(v)) << " (" << vert.w.a << "," << vert.w.b
        << ")";
    switch (vert.kind) {
      case PointKind::Origin:
        out << " origin";
        break;
      case PointKind::Free:
        out << " free(" << vertex_name(vert.parent1) << ")";
        break;
      case PointKind::Satellite:
        out << " satellite(" << vertex_name(vert.parent1) << "," << vertex_name(vert.parent2)
            << ")";
        break;
    }
    auto inv = vertex_invariants(g, static_cast<int>(v));
    out << "  A=" << inv.thinness.str() << " b=" << inv.generic_mult << " m=" << inv.mult
        << "\n";
  }
  out << "edges:";
  bool first = true;
  for (auto& e : g.edges()) {
    if (!e.alive) continue;
    out << (first ? " " : ", ") << vertex_name(e.u_vertex) << "-" << vertex_name(e.v_vertex);
    first = false;
  }
  out << "\n";
  if (!g.attachments.empty()) {
    out << "attachments:";
    first = true;
    for (auto& [label, v] : g.attachments) {
      out << (first ? " " : ", ") << label << " -> " << vertex_name(v);
      first = false;
    }
    out << "\n";
  }
}

void print_invariants_text(const InvariantReport& r, std::ostream& out) {
  out << "kind: " << r.kind << (r.monomial ? " (monomial)" : "") << "\n";
  out << "rk/rat.rk/tr.deg: " << r.rk << "/" << r.rat_rk << "/" << r.tr_deg << "\n";
  out << "skewness: " << r.alpha.str() << "\n";
  out << "thinness: " << r.thinness.str() << "\n";
  out << "multiplicity: " << r.mult << "\n";
  if (r.generic_mult) out << "generic multiplicity: " << *r.generic_mult << "\n";
  if (!r.approx.empty()) {
    out << "approximating sequence:";
    for (auto& a : r.approx)
      out << " (k=" << a.index << ", m=" << a.mult << ", alpha=" << a.alpha.str()
          << ", A=" << a.thinness.str() << ")";
    out << "\n";
  }
  out << "semigroup generators:";
  for (auto& s : r.semigroup) out << " " << s.str();
  out << "\n";
  if (r.kind == "curve") {
    out << "curve semigroup (x " << r.mult << "):";
    for (auto& s : r.semigroup)
      if (s.is_finite()) out << " " << (s.finite() * Rat(r.mult)).str();
    out << "\n";
  }
}

ZariskiFactorization factor_for(const CommonInputs& in) {
  return zariski_factor(parse_ideal(in.ideal_text, in));
}

int dispatch(const std::string& verb, const CommonInputs& in, std::ostream& out) {
  if (verb == "skp") {
    auto branches = named_branches(in);
    if (branches.size() != 1 && in.skp_file.empty())
      throw domain_error("usage", "skp needs exactly one --branch");
    Skp s = in.skp_file.empty() ? skp_of_branch(branches[0].second, 48).skp
                                : skp_from_json(load_json(in.skp_file));
    if (in.json)
      out << skp_to_json(s).dump(2) << "\n";
    else
      out << s.str() << "\n";
    return 0;
  }

  if (verb == "eval") {
    auto vals = input_valuations(in);
    if (vals.size() != 1) throw domain_error("usage", "eval needs one valuation input");
    BiPoly phi = parse_poly(in.poly_text);
    ExtRat v = eval(vals[0], phi);
    if (in.json) {
      Json j;
      j["value"] = v.str();
      out << j.dump(2) << "\n";
    } else {
      out << v.str() << "\n";
    }
    return 0;
  }

  if (verb == "invariants") {
    auto vals = input_valuations(in);
    if (vals.size() != 1) throw domain_error("usage", "invariants needs one valuation input");
    InvariantReport r = invariants(vals[0]);
    if (in.json)
      out << invariants_to_json(r).dump(2) << "\n";
    else
      print_invariants_text(r, out);
    return 0;
  }

  if (verb == "wedge") {
    auto vals = input_valuations(in);
    if (vals.size() != 2) throw domain_error("usage", "wedge needs exactly two valuations");
    Skp w = wedge(vals[0], vals[1]);
    if (in.json)
      out << skp_to_json(w).dump(2) << "\n";
    else
      out << w.str() << "\n";
    return 0;
  }

  if (verb == "desing" || verb == "desing-equi") {
    DualGraph g = verb == "desing"
                      ? minimal_desing_from_branches(named_branches(in))
                      : minimal_desing_from_equising(equising_from_json(load_json(in.equi_file)));
    if (in.dot)
      out << g.dot();
    else if (in.json)
      out << dualgraph_to_json(g).dump(2) << "\n";
    else
      print_graph_text(g, out);
    return 0;
  }

  if (verb == "eggers") {
    EquisingData data = in.equi_file.empty()
                            ? equising_data_from_branches(named_branches(in))
                            : equising_from_json(load_json(in.equi_file));
    EggersTree t = eggers_tree(data);
    if (in.json) {
      out << eggers_to_json(t).dump(2) << "\n";
    } else {
      out << "nodes:\n";
      for (size_t i = 0; i < t.nodes.size(); ++i) {
        out << "  " << i << ": param=" << t.nodes[i].param.str();
        if (t.nodes[i].parent >= 0) out << " parent=" << t.nodes[i].parent;
        if (t.nodes[i].is_end) out << " end";
        out << " branches=";
        for (size_t k = 0; k < t.nodes[i].branches.size(); ++k)
          out << (k ? "," : "") << data.branches[t.nodes[i].branches[k]].label;
        out << "\n";
      }
      out << "canonical: " << t.canonical_string() << "\n";
    }
    return 0;
  }

  if (verb == "classical") {
    auto branches = named_branches(in);
    if (branches.size() != 1) throw domain_error("usage", "classical needs one --branch");
    ClassicalInvariants c = classical_invariants(branches[0].second);
    if (in.json) {
      out << classical_to_json(c).dump(2) << "\n";
    } else {
      out << "n: " << c.n << "\ng: " << c.g << "\nbeta:";
      for (auto b : c.beta) out << " " << b;
      out << "\ne:";
      for (auto e : c.e) out << " " << e;
      out << "\nn_i:";
      for (auto m : c.nseq) out << " " << m;
      out << "\nbeta_bar:";
      for (auto b : c.beta_bar) out << " " << b;
      out << "\n";
    }
    return 0;
  }

  if (verb == "ideal-factor") {
    ZariskiFactorization z = factor_for(in);
    if (in.json) {
      Json j;
      j["measure"] = measure_to_json(z.measure);
      Json fs = Json::array();
      for (auto& f : z.factors) {
        Json jf;
        jf["valuation"] = skp_to_json(f.valuation);
        jf["type"] = f.divisorial ? "divisorial" : "curve";
        jf["unit_mass"] = f.unit_mass;
        jf["exponent"] = f.exponent;
        fs.push_back(std::move(jf));
      }
      j["factors"] = std::move(fs);
      out << j.dump(2) << "\n";
    } else {
      out << "measure: " << z.measure.str() << "\n";
      for (auto& f : z.factors)
        out << "factor: (" << (f.divisorial ? "divisorial" : "curve")
            << ", unit=" << f.unit_mass << ", exponent=" << f.exponent << ") "
            << f.valuation.str() << "\n";
    }
    return 0;
  }

  if (verb == "closure") {
    IdealSpec spec = parse_ideal(in.ideal_text, in);
    IdealSpec::Generator phi = parse_generator(in.poly_text, spec.branches);
    bool member = integral_closure_member(phi, spec);
    if (in.json) {
      Json j;
      j["member"] = member;
      out << j.dump(2) << "\n";
    } else {
      out << (member ? "member" : "not a member") << "\n";
    }
    return 0;
  }

  if (verb == "mult") {
    IdealSpec i = parse_ideal(in.ideal_text, in);
    IdealSpec j = in.ideal2_text.empty() ? i : parse_ideal(in.ideal2_text, in);
    Rat e = mixed_multiplicity(i, j);
    if (in.json) {
      Json jj;
      jj["multiplicity"] = e.str();
      out << jj.dump(2) << "\n";
    } else {
      out << e.str() << "\n";
    }
    return 0;
  }

  if (verb == "classmeasure") {
    DualGraph g = minimal_desing_from_branches(named_branches(in));
    if (in.vertex < 0 || in.vertex >= static_cast<int>(g.vertex_count()))
      throw domain_error("usage", "--vertex must name a vertex of the graph");
    AtomicMeasure rho = class_measure(g, in.vertex);
    if (in.json)
      out << measure_to_json(rho).dump(2) << "\n";
    else
      out << rho.str() << "\n";
    return 0;
  }

  if (verb == "selftest") {
    auto results = selftest::run_all(in.jobs);
    out << selftest::format_table(results);
    for (auto& r : results)
      if (!r.pass) return 1;
    return 0;
  }

  throw domain_error("usage", "unknown verb '" + verb + "'");
}

}  // namespace

int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"centered valuations on plane curve singularities"};
  app.require_subcommand(1);

  CommonInputs in;
  if (const char* env = std::getenv("VALTREE_TRUNC")) in.trunc = std::atol(env);

  std::vector<std::string> verbs = {"skp",     "eval",       "invariants", "wedge",
                                    "desing",  "desing-equi", "eggers",     "classical",
                                    "ideal-factor", "closure", "mult",       "classmeasure",
                                    "selftest"};
  std::map<std::string, CLI::App*> subs;
  for (auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v);
    sub->add_option("--branch", in.branch_texts, "branch parameterization");
    sub->add_option("--skp", in.skp_file, "SKP document (skp.v1)");
    sub->add_option("--skp2", in.skp_file2, "second SKP document");
    sub->add_option("--poly", in.poly_text, "polynomial or branch product");
    sub->add_option("--ideal", in.ideal_text, "ideal generators");
    sub->add_option("--ideal2", in.ideal2_text, "second ideal");
    sub->add_option("--equi", in.equi_file, "equisingularity data (equi.v1)");
    sub->add_option("--trunc", in.trunc, "truncation cap");
    sub->add_option("--jobs", in.jobs, "worker threads for corpus commands");
    sub->add_option("--vertex", in.vertex, "vertex index");
    sub->add_flag("--json", in.json, "JSON output");
    sub->add_flag("--dot", in.dot, "DOT output");
    subs[v] = sub;
  }

  std::vector<std::string> argv_store = args;
  std::vector<char*> argv;
  std::string prog = "valtree";
  argv.push_back(prog.data());
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  if (in.trunc > 0) set_truncation_cap(in.trunc);

  try {
    for (auto& [verb, sub] : subs)
      if (sub->parsed()) return dispatch(verb, in, out);
    err << "usage error: missing verb\n";
    return 2;
  } catch (const domain_error& e) {
    if (e.kind() == "usage") {
      err << "usage error: " << e.what() << "\n";
      return 2;
    }
    err << "error [" << e.kind() << "]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace valtree

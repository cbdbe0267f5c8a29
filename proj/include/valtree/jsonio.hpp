#ifndef VALTREE_JSONIO_HPP
#define VALTREE_JSONIO_HPP

#include <string>

#include "json.hpp"
#include "valtree/dualgraph.hpp"
#include "valtree/skp.hpp"
#include "valtree/treemeasure.hpp"

namespace valtree {

using Json = nlohmann::ordered_json;

// schema skp.v1: {"schema","keys":[poly strings],"values":["p/q"|"inf"],"swap":bool}
Json skp_to_json(const Skp& s);
Skp skp_from_json(const Json& j);

// schema dualgraph.v1
Json dualgraph_to_json(const DualGraph& g);

// schema measure.v1: atoms with node (skp object), mass "p/q" or [re, im]
Json measure_to_json(const AtomicMeasure& m);
AtomicMeasure measure_from_json(const Json& j);

// schema equi.v1: branches with characteristic parameters, pairwise contacts
Json equising_to_json(const EquisingData& d);
EquisingData equising_from_json(const Json& j);

// schema ideal.v1: named branch declarations plus generator product strings
Json ideal_to_json(const IdealSpec& spec);
IdealSpec ideal_from_json(const Json& j);

Json invariants_to_json(const InvariantReport& r);
Json classical_to_json(const ClassicalInvariants& c);
Json eggers_to_json(const EggersTree& t);

// Generator strings: '*'-separated factors "name" or "name^k" over declared
// branch names (the axes are "x" and "y").
IdealSpec::Generator parse_generator(const std::string& text,
                                     const std::vector<DeclaredBranch>& branches);
std::string generator_to_string(const IdealSpec::Generator& gen,
                                const std::vector<DeclaredBranch>& branches);

}  // namespace valtree

#endif

#ifndef EMB_JSONIO_HPP
#define EMB_JSONIO_HPP

#include <json.hpp>

#include "emb/multinorm.hpp"
#include "emb/quat.hpp"
#include "emb/split_embed.hpp"

namespace emb {

using Json = nlohmann::ordered_json;

// rationals travel as "p/q" in lowest terms
Rat rat_from_string(const std::string& s);
std::string rat_to_string(const Rat& x);

Place place_from_string(const std::string& s);

// {"diag": ["1","-1","2/3"]}
QuadraticForm form_from_json(const Json& j);
Json form_to_json(const QuadraticForm& q);

// {"rank":n,"det":"-1","disc":"...","hasse":{"2":-1,...},"signature":[p,q]}
Json invariants_to_json(const LocalInvariants& inv);

// {"factors":[{"kind":"Q"},{"kind":"quad","m":13},
//             {"kind":"biquad","a":13,"b":17}], "d":["13",["0","1"]]}
EtaleInvolutionAlgebra etale_from_json(const Json& j);
Json etale_to_json(const EtaleInvolutionAlgebra& A);

// componentwise element: entries are strings (rational) or coordinate lists
FElem felem_from_json(const EtaleF& F, const Json& j);
Json felem_to_json(const EtaleF& F, const FElem& a);

Json report_to_json(const SplitEmbeddingProblem& P, const ObstructionReport& rep);
Json certificate_to_json(const EtaleF& F, const NonsplitCertificate& cert);

// {"alpha":-1,"beta":-1,"entries":[["0","1","0"],...]}
SkewHermitianForm skew_form_from_json(const Json& j, const Config& cfg = {});

std::vector<Rat> parse_diag_list(const std::string& csv);

} // namespace emb

#endif

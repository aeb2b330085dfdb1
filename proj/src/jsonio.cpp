#include "emb/jsonio.hpp"

#include <sstream>

namespace emb {

Rat rat_from_string(const std::string& s) {
    if (s.empty()) throw domain_error("rational: empty string");
    Rat r;
    try {
        r = Rat(s);
    } catch (const std::invalid_argument&) {
        throw domain_error("rational: cannot parse '" + s + "'");
    }
    r.canonicalize();
    return r;
}

std::string rat_to_string(const Rat& x) { return x.get_str(); }

Place place_from_string(const std::string& s) { return Place::parse(s); }

QuadraticForm form_from_json(const Json& j) {
    if (!j.contains("diag") || !j["diag"].is_array())
        throw domain_error("form: expected {\"diag\": [...]}");
    std::vector<Rat> diag;
    for (const auto& e : j["diag"]) diag.push_back(rat_from_string(e.get<std::string>()));
    return QuadraticForm(diag);
}

Json form_to_json(const QuadraticForm& q) {
    Json j;
    Json d = Json::array();
    for (const auto& a : q.diag) d.push_back(rat_to_string(a));
    j["diag"] = d;
    return j;
}

Json invariants_to_json(const LocalInvariants& inv) {
    Json j;
    j["rank"] = inv.rank;
    j["det"] = rat_to_string(inv.det.rep());
    j["disc"] = rat_to_string(inv.disc.rep());
    Json h = Json::object();
    for (const auto& [v, s] : inv.hasse) h[v.str()] = s;
    j["hasse"] = h;
    j["signature"] = Json::array({inv.sig_pos, inv.sig_neg});
    return j;
}

namespace {

FactorElem factor_elem_from_json(const FieldFactor& f, const Json& j) {
    FactorElem e;
    if (j.is_string()) {
        e = FactorElem::from_rat(f, rat_from_string(j.get<std::string>()));
    } else if (j.is_number_integer()) {
        e = FactorElem::from_rat(f, Rat(j.get<long>()));
    } else if (j.is_array()) {
        for (const auto& c : j)
            e.c.push_back(c.is_string() ? rat_from_string(c.get<std::string>())
                                        : Rat(c.get<long>()));
        if (e.c.size() != static_cast<size_t>(f.degree()))
            throw domain_error("element: wrong coordinate count for " + f.str());
    } else {
        throw domain_error("element: expected string or coordinate list");
    }
    return e;
}

Json factor_elem_to_json(const FieldFactor& f, const FactorElem& e) {
    if (f.degree() == 1) return rat_to_string(e.c[0]);
    Json a = Json::array();
    for (const auto& c : e.c) a.push_back(rat_to_string(c));
    return a;
}

} // namespace

EtaleInvolutionAlgebra etale_from_json(const Json& j) {
    if (!j.contains("factors") || !j.contains("d"))
        throw domain_error("etale: expected {\"factors\": [...], \"d\": [...]}");
    EtaleF F;
    for (const auto& fj : j["factors"]) {
        std::string kind = fj.at("kind").get<std::string>();
        if (kind == "Q" || kind == "rational") {
            F.push_back(FieldFactor::rational());
        } else if (kind == "quad" || kind == "quadratic") {
            F.push_back(FieldFactor::quadratic(Int(fj.at("m").get<long>())));
        } else if (kind == "biquad" || kind == "biquadratic") {
            F.push_back(FieldFactor::biquadratic(Int(fj.at("a").get<long>()),
                                                 Int(fj.at("b").get<long>())));
        } else {
            throw domain_error("etale: unknown factor kind '" + kind + "'");
        }
    }
    const Json& dj = j["d"];
    if (!dj.is_array() || dj.size() != F.size())
        throw domain_error("etale: d needs one component per factor");
    FElem d;
    for (size_t k = 0; k < F.size(); ++k) d.push_back(factor_elem_from_json(F[k], dj[k]));
    return EtaleInvolutionAlgebra(F, d);
}

Json etale_to_json(const EtaleInvolutionAlgebra& A) {
    Json j;
    Json fs = Json::array();
    for (const auto& f : A.F) {
        Json fj;
        switch (f.kind()) {
            case FieldFactor::Kind::Rational: fj["kind"] = "Q"; break;
            case FieldFactor::Kind::Quadratic:
                fj["kind"] = "quad";
                fj["m"] = static_cast<long>(f.m().get_si());
                break;
            case FieldFactor::Kind::Biquadratic:
                fj["kind"] = "biquad";
                fj["a"] = static_cast<long>(f.a().get_si());
                fj["b"] = static_cast<long>(f.b().get_si());
                break;
        }
        fs.push_back(fj);
    }
    j["factors"] = fs;
    Json dj = Json::array();
    for (size_t k = 0; k < A.F.size(); ++k) dj.push_back(factor_elem_to_json(A.F[k], A.d[k]));
    j["d"] = dj;
    return j;
}

FElem felem_from_json(const EtaleF& F, const Json& j) {
    if (!j.is_array() || j.size() != F.size())
        throw domain_error("element: one component per factor expected");
    FElem a;
    for (size_t k = 0; k < F.size(); ++k) a.push_back(factor_elem_from_json(F[k], j[k]));
    return a;
}

Json felem_to_json(const EtaleF& F, const FElem& a) {
    Json j = Json::array();
    for (size_t k = 0; k < F.size(); ++k) j.push_back(factor_elem_to_json(F[k], a[k]));
    return j;
}

Json report_to_json(const SplitEmbeddingProblem& P, const ObstructionReport& rep) {
    Json j;
    switch (rep.verdict) {
        case ObstructionReport::Verdict::Embeds: j["verdict"] = "embeds"; break;
        case ObstructionReport::Verdict::LocallyObstructed:
            j["verdict"] = "locally_obstructed";
            break;
        case ObstructionReport::Verdict::GloballyObstructed:
            j["verdict"] = "globally_obstructed";
            break;
        case ObstructionReport::Verdict::Undecided: j["verdict"] = "undecided"; break;
    }
    if (rep.witness) j["witness"] = felem_to_json(P.source.F, *rep.witness);
    if (rep.witness_unit) j["witness_unit"] = rat_to_string(*rep.witness_unit);
    if (rep.bad_place) j["place"] = rep.bad_place->str();
    if (!rep.reason.empty()) j["reason"] = rep.reason;
    Json lt = Json::object();
    for (const auto& [v, lw] : rep.local_table) {
        Json e;
        e["ok"] = lw.ok;
        if (lw.ok && lw.a) e["a_v"] = felem_to_json(P.source.F, *lw.a);
        if (!lw.ok) e["reason"] = lw.reason;
        lt[v.str()] = e;
    }
    j["local"] = lt;
    if (rep.certificate) {
        Json c;
        c["p1"] = rep.certificate->p1.get_str();
        c["p2"] = rep.certificate->p2.get_str();
        c["hypotheses_ok"] = rep.certificate->hypotheses_ok;
        c["facts"] = rep.certificate->facts;
        Json sp = Json::array();
        for (const auto& p : rep.certificate->sampled_places) sp.push_back(p.get_str());
        c["sampled_places"] = sp;
        c["verified"] = rep.certificate->verified;
        j["certificate"] = c;
    }
    if (rep.bound) j["bound"] = rep.bound;
    return j;
}

Json certificate_to_json(const EtaleF& F, const NonsplitCertificate& cert) {
    Json j;
    j["a"] = felem_to_json(F, cert.a);
    j["v0"] = cert.v0.str();
    j["center"] = cert.Z.split ? "split" : ("Q(sqrt " + rat_to_string(cert.Z.disc) + ")");
    Json pinned = Json::array();
    for (const auto& v : cert.pinned) pinned.push_back(v.str());
    j["pinned"] = pinned;
    Json tc = Json::object();
    for (const auto& [v, b] : cert.twist_corrections) tc[v.str()] = felem_to_json(F, b);
    j["twist_corrections"] = tc;
    Json V = Json::array();
    for (const auto& v : cert.V) V.push_back(v.str());
    j["V"] = V;
    j["delta_bits"] = cert.delta_bits;
    j["verified"] = cert.verified;
    return j;
}

SkewHermitianForm skew_form_from_json(const Json& j, const Config& cfg) {
    Int alpha(j.at("alpha").get<long>()), beta(j.at("beta").get<long>());
    std::vector<PureQuaternion> entries;
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 3)
            throw domain_error("skew form: entries are [x,y,z] coordinate triples");
        PureQuaternion q;
        q.x = e[0].is_string() ? rat_from_string(e[0].get<std::string>()) : Rat(e[0].get<long>());
        q.y = e[1].is_string() ? rat_from_string(e[1].get<std::string>()) : Rat(e[1].get<long>());
        q.z = e[2].is_string() ? rat_from_string(e[2].get<std::string>()) : Rat(e[2].get<long>());
        entries.push_back(q);
    }
    return SkewHermitianForm(QuaternionAlgebra(alpha, beta, cfg), entries);
}

std::vector<Rat> parse_diag_list(const std::string& csv) {
    std::vector<Rat> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(rat_from_string(tok));
    }
    if (out.empty()) throw domain_error("diag: empty list");
    return out;
}

} // namespace emb

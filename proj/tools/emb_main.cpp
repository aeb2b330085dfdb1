// command-line surface: exact local invariants, embedding engines, demos
#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>

#include "emb/jsonio.hpp"

using namespace emb;

namespace {

Json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw domain_error("cannot open " + path);
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("json parse: ") + e.what());
    }
    return j;
}

void emit(const Json& j, bool json_mode) {
    if (json_mode) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    // modest human rendering: one key per line
    for (const auto& [k, v] : j.items())
        std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

std::map<Place, int> parse_hasse(const std::string& s) {
    std::map<Place, int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        auto colon = tok.find(':');
        if (colon == std::string::npos) throw domain_error("hasse: expected place:sign");
        out[Place::parse(tok.substr(0, colon))] = std::stoi(tok.substr(colon + 1));
    }
    return out;
}

Json demo_example_7_5(const Config& cfg) {
    Json out;
    out["demo"] = "example-7-5";
    EtaleF F = {FieldFactor::rational(), FieldFactor::quadratic(13)};
    FElem d = {FactorElem::from_rat(F[0], 13), FactorElem::from_rat(F[1], 17)};
    EtaleInvolutionAlgebra A(F, d);
    out["etale"] = etale_to_json(A);
    out["legendre_p1_p2"] = legendre(13, 17);

    QuadraticForm qt = trace_form(A, felem_one(F), cfg);
    LocalInvariants it = invariants(qt, cfg);
    std::map<Place, int> hasse = it.hasse;
    for (const Int& p : {Int(13), Int(17)}) hasse[Place::finite(p)] *= -1;
    QuadraticForm q = build_form_with_invariants(6, it.det, hasse,
                                                 {it.sig_pos, it.sig_neg}, cfg);
    out["trace_form"] = form_to_json(qt);
    out["target_form"] = form_to_json(q);
    out["flipped_at"] = Json::array({"13", "17"});

    SplitEmbeddingProblem P(A, q);
    ObstructionReport rep = global_embed(P, cfg);
    Json rj = report_to_json(P, rep);
    // re-verify every printed local witness independently
    bool local_all_ok = true;
    for (const auto& [v, lw] : rep.local_table) {
        bool ok = lw.ok && lw.a &&
                  locally_equivalent(trace_form(A, *lw.a, cfg), q, v, cfg);
        if (!ok) local_all_ok = false;
    }
    rj["local_all_ok_reverified"] = local_all_ok;
    out["report"] = rj;
    out["global"] = rj["verdict"];
    return out;
}

Json demo_example_4_6(const Config& cfg) {
    Json out;
    out["demo"] = "example-4-6";
    BiquadraticDatum B(13, 17);
    out["a"] = 13;
    out["b"] = 17;
    // the two places used to pin the quaternion algebra: 13 is a square,
    // 17 is not, at both
    for (const Int& p : {Int(3), Int(23)}) {
        Place v = Place::finite(p);
        out["place_" + p.get_str()] =
            Json{{"a_square", is_local_square(13, v, cfg)},
                 {"b_square", is_local_square(17, v, cfg)}};
    }
    auto hyp = check_local_degree_hypothesis(B, cfg.sample_bound, cfg);
    out["local_degree_hypothesis"] = Json{{"holds", hyp.holds},
                                          {"structural", hyp.structural},
                                          {"sampled", hyp.sampled.size()}};
    Rat s = multinorm_witness(B, cfg);
    out["witness"] = rat_to_string(s);
    Json phis = Json::array();
    for (int e = 0; e < 6; ++e) phis.push_back(phi_expression(B, e, s, cfg));
    out["phi_value"] = phi(B, s, cfg);
    out["phi_expressions"] = phis;

    // local norm-product membership at sampled places: some subfield splits,
    // so the local norm groups multiply out to everything
    long checked = 0;
    bool all_ok = true;
    Int p = 1;
    while (p < cfg.sample_bound) {
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        Place v = Place::finite(p);
        bool ok = false;
        for (int i = 1; i <= 3; ++i)
            if (B.in_split_set(i, v, cfg)) ok = true;
        all_ok = all_ok && ok;
        ++checked;
    }
    out["sampled_local_checks"] = Json{{"places", checked}, {"norm_product_full", all_ok}};

    QuaternionAlgebra D0 =
        quaternion_from_ramset({Place::finite(3), Place::finite(23)}, cfg);
    Json dj;
    dj["alpha"] = static_cast<long>(D0.alpha.get_si());
    dj["beta"] = static_cast<long>(D0.beta.get_si());
    Json ram = Json::array();
    for (const auto& v : ram_set(D0.alpha, D0.beta, cfg)) ram.push_back(v.str());
    dj["ram_reverified"] = ram;
    out["quaternion_D0"] = dj;
    out["norm_form_indefinite"] =
        norm_form_indefinite(Rat(D0.alpha), Rat(D0.beta), Rat(13));
    return out;
}

Json demo_theorem_b(int vsize, const Config& cfg) {
    Json out;
    out["demo"] = "theorem-b";
    if (vsize < 2 || vsize % 2 || vsize > 4)
        throw domain_error("theorem-b: --v-size must be 2 or 4");
    // a quaternion algebra ramified at vsize places, with a skew-hermitian
    // form whose Clifford center splits: V is the whole ramification set
    QuaternionAlgebra D = [&] {
        if (vsize == 2) return QuaternionAlgebra(-1, -1, cfg);
        return quaternion_from_ramset(
            {Place::finite(3), Place::finite(5), Place::finite(7), Place::finite(11)}, cfg);
    }();
    std::vector<PureQuaternion> entries = {PureQuaternion{1, 0, 0}, PureQuaternion{1, 0, 0}};
    SkewHermitianForm h(D, entries);
    out["quaternion"] = D.str();
    out["disc"] = rat_to_string(disc_involution(h, cfg).rep());
    std::vector<Place> V = bad_set_V(h, cfg);
    Json vj = Json::array();
    for (const auto& v : V) vj.push_back(v.str());
    out["V"] = vj;
    if (static_cast<int>(V.size()) != vsize)
        throw domain_error("theorem-b: bad set has unexpected size");

    // the delta classes: 2^{|V|} vectors modulo the all-ones vector
    Json table = Json::array();
    std::set<std::vector<int>> classes;
    for (unsigned long mask = 0; mask < (1ul << V.size()); ++mask) {
        DeltaVector dv;
        dv.V = V;
        for (size_t i = 0; i < V.size(); ++i) dv.bits.push_back((mask >> i) & 1);
        std::vector<int> norm = dv.bits;
        if (norm[0] == 1)
            for (auto& b : norm) b ^= 1;
        classes.insert(norm);
        Json row;
        row["bits"] = dv.bits;
        row["class"] = norm;
        row["zero_class"] = dv.is_zero_class();
        table.push_back(row);
    }
    out["delta_table"] = table;
    out["class_count"] = classes.size();
    out["isomorphism_classes_detected"] = classes.size();
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact local-global invariants for embeddings of etale algebras "
                 "with involution"};
    app.require_subcommand(1);
    bool json_mode = false;
    long bound = 0, checkpoint_cap = 0, factor_bound = 0;
    bool verbose = false;
    app.add_flag("--json", json_mode, "machine-readable output");
    app.add_option("--bound", bound, "witness search cap");
    app.add_option("--checkpoint-cap", checkpoint_cap, "checkpoint prime search cap");
    app.add_option("--factor-bound", factor_bound, "trial division bound");
    app.add_flag("--verbose", verbose, "extra diagnostics");

    // hilbert --a --b --place
    auto* c_hil = app.add_subcommand("hilbert", "Hilbert symbol (a,b)_v");
    std::string h_a, h_b, h_place;
    c_hil->add_option("--a", h_a)->required();
    c_hil->add_option("--b", h_b)->required();
    c_hil->add_option("--place", h_place)->required();

    auto* c_inv = app.add_subcommand("qf-invariants", "invariants of a diagonal form");
    std::string qi_diag, qi_file;
    c_inv->add_option("--diag", qi_diag, "comma-separated diagonal");
    c_inv->add_option("--form", qi_file, "form JSON file");

    auto* c_eq = app.add_subcommand("qf-equiv", "local/global equivalence");
    std::string qe_left, qe_right, qe_place;
    c_eq->add_option("--left", qe_left)->required();
    c_eq->add_option("--right", qe_right)->required();
    c_eq->add_option("--place", qe_place, "place (omit for global)");

    auto* c_sim = app.add_subcommand("qf-similar", "similarity over Q");
    std::string qs_left, qs_right;
    c_sim->add_option("--left", qs_left)->required();
    c_sim->add_option("--right", qs_right)->required();

    auto* c_build = app.add_subcommand("qf-build", "form with prescribed invariants");
    int qb_rank = 0;
    std::string qb_det, qb_hasse, qb_sig;
    c_build->add_option("--rank", qb_rank)->required();
    c_build->add_option("--det", qb_det)->required();
    c_build->add_option("--hasse", qb_hasse, "place:sign,place:sign,...");
    c_build->add_option("--signature", qb_sig, "p,q")->required();

    auto* c_tf = app.add_subcommand("etale-trace-form", "twisted trace form");
    std::string tf_etale, tf_a;
    c_tf->add_option("--etale", tf_etale)->required();
    c_tf->add_option("--a", tf_a, "element JSON (default 1)");

    auto* c_embed = app.add_subcommand("embed", "embedding engines");
    auto* c_es = c_embed->add_subcommand("split", "split orthogonal case");
    std::string es_etale, es_diag;
    c_es->add_option("--etale", es_etale)->required();
    c_es->add_option("--target-diag", es_diag)->required();
    auto* c_en = c_embed->add_subcommand("nonsplit", "quaternionic orthogonal case");
    std::string en_quat, en_form, en_etale, en_pins, en_twists;
    c_en->add_option("--quaternion", en_quat, "alpha,beta")->required();
    c_en->add_option("--form", en_form, "skew-hermitian form JSON");
    c_en->add_option("--etale", en_etale)->required();
    c_en->add_option("--pins", en_pins, "pins JSON file");
    c_en->add_option("--twists", en_twists, "comma-separated twist places");

    auto* c_mn = app.add_subcommand("multinorm", "multinorm obstructions");
    auto* c_mnb = c_mn->add_subcommand("biquad", "biquadratic witness");
    long mb_a = 0, mb_b = 0;
    c_mnb->add_option("--a", mb_a)->required();
    c_mnb->add_option("--b", mb_b)->required();

    auto* c_q = app.add_subcommand("quat", "quaternion algebras");
    auto* c_qr = c_q->add_subcommand("ram", "ramification set");
    long qr_alpha = 0, qr_beta = 0;
    c_qr->add_option("--alpha", qr_alpha)->required();
    c_qr->add_option("--beta", qr_beta)->required();

    auto* c_demo = app.add_subcommand("demo", "reproduce the worked examples");
    std::string demo_name;
    int demo_vsize = 2;
    c_demo->add_option("name", demo_name, "example-7-5 | example-4-6 | theorem-b")
        ->required();
    c_demo->add_option("--v-size", demo_vsize, "size of the bad set (theorem-b)");

    // allow the global flags after a subcommand name
    std::function<void(CLI::App*)> set_fallthrough = [&](CLI::App* a) {
        a->fallthrough();
        for (auto* sub : a->get_subcommands({})) set_fallthrough(sub);
    };
    set_fallthrough(&app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    Config cfg;
    if (bound > 0) cfg.witness_cap = bound;
    if (checkpoint_cap > 0) cfg.checkpoint_prime_cap = checkpoint_cap;
    if (factor_bound > 0) cfg.factor_bound = factor_bound;

    try {
        Json out;
        if (c_hil->parsed()) {
            out["symbol"] = hilbert_symbol(rat_from_string(h_a), rat_from_string(h_b),
                                           Place::parse(h_place), cfg);
        } else if (c_inv->parsed()) {
            QuadraticForm q = qi_diag.empty() ? form_from_json(load_json(qi_file))
                                              : QuadraticForm(parse_diag_list(qi_diag));
            out = invariants_to_json(invariants(q, cfg));
        } else if (c_eq->parsed()) {
            QuadraticForm l(parse_diag_list(qe_left)), r(parse_diag_list(qe_right));
            if (qe_place.empty()) {
                out["equivalent"] = globally_equivalent(l, r, cfg);
                out["scope"] = "global";
            } else {
                Place v = Place::parse(qe_place);
                out["equivalent"] = locally_equivalent(l, r, v, cfg);
                out["scope"] = v.str();
            }
        } else if (c_sim->parsed()) {
            QuadraticForm l(parse_diag_list(qs_left)), r(parse_diag_list(qs_right));
            auto lam = similar(l, r, cfg);
            out["similar"] = lam.has_value();
            if (lam) out["lambda"] = rat_to_string(*lam);
        } else if (c_build->parsed()) {
            std::vector<std::string> sig;
            std::stringstream ss(qb_sig);
            std::string tok;
            while (std::getline(ss, tok, ',')) sig.push_back(tok);
            if (sig.size() != 2) throw domain_error("signature: expected p,q");
            QuadraticForm q = build_form_with_invariants(
                qb_rank, SquareClass::of(rat_from_string(qb_det), cfg),
                qb_hasse.empty() ? std::map<Place, int>{} : parse_hasse(qb_hasse),
                {std::stoi(sig[0]), std::stoi(sig[1])}, cfg);
            out = form_to_json(q);
            out["invariants"] = invariants_to_json(invariants(q, cfg));
        } else if (c_tf->parsed()) {
            EtaleInvolutionAlgebra A = etale_from_json(load_json(tf_etale));
            FElem a = tf_a.empty() ? felem_one(A.F) : felem_from_json(A.F, Json::parse(tf_a));
            QuadraticForm q = trace_form(A, a, cfg);
            out = form_to_json(q);
            out["invariants"] = invariants_to_json(invariants(q, cfg));
        } else if (c_es->parsed()) {
            EtaleInvolutionAlgebra A = etale_from_json(load_json(es_etale));
            QuadraticForm target(parse_diag_list(es_diag));
            bool odd = target.rank() % 2;
            SplitEmbeddingProblem P(A, target, odd);
            ObstructionReport rep = global_embed(P, cfg);
            out = report_to_json(P, rep);
        } else if (c_en->parsed()) {
            auto comma = en_quat.find(',');
            if (comma == std::string::npos)
                throw domain_error("quaternion: expected alpha,beta");
            QuaternionAlgebra D(Int(en_quat.substr(0, comma)),
                                Int(en_quat.substr(comma + 1)), cfg);
            EtaleInvolutionAlgebra A = etale_from_json(load_json(en_etale));
            std::map<Place, FElem> pins;
            std::set<Place> twists;
            if (!en_pins.empty()) {
                Json pj = load_json(en_pins);
                for (const auto& [k, v] : pj.items())
                    pins[Place::parse(k)] = felem_from_json(A.F, v);
            }
            if (!en_twists.empty()) {
                std::stringstream ss(en_twists);
                std::string tok;
                while (std::getline(ss, tok, ',')) twists.insert(Place::parse(tok));
            }
            if (!en_form.empty()) {
                SkewHermitianForm h = skew_form_from_json(load_json(en_form), cfg);
                ZDescriptor hz = clifford_center(h, cfg);
                ZDescriptor az = derived_center(A.F, A.d, cfg);
                out["center_consistent"] =
                    hz.split == az.split && (hz.split || hz.disc == az.disc);
            }
            NonsplitCertificate cert =
                nonsplit_global_a(D, A.dim_F(), A.F, A.d, pins, twists, cfg);
            out.update(certificate_to_json(A.F, cert));
        } else if (c_mnb->parsed()) {
            BiquadraticDatum B(mb_a, mb_b);
            Rat s = multinorm_witness(B, cfg);
            out["witness"] = rat_to_string(s);
            out["phi_value"] = phi(B, s, cfg);
            long checked = 0;
            bool ok = true;
            Int p = 1;
            while (p < cfg.sample_bound) {
                mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
                bool split = false;
                for (int i = 1; i <= 3; ++i)
                    if (B.in_split_set(i, Place::finite(p), cfg)) split = true;
                ok = ok && split;
                ++checked;
            }
            out["sampled_local_checks"] = Json{{"places", checked}, {"all_ok", ok}};
        } else if (c_qr->parsed()) {
            Json ram = Json::array();
            for (const auto& v : ram_set(qr_alpha, qr_beta, cfg)) ram.push_back(v.str());
            out["ram"] = ram;
        } else if (c_demo->parsed()) {
            if (demo_name == "example-7-5") out = demo_example_7_5(cfg);
            else if (demo_name == "example-4-6") out = demo_example_4_6(cfg);
            else if (demo_name == "theorem-b") out = demo_theorem_b(demo_vsize, cfg);
            else throw domain_error("unknown demo '" + demo_name + "'");
        }
        emit(out, json_mode);
        return 0;
    } catch (const std::invalid_argument& e) {
        Json err{{"error", {{"kind", "parse"}, {"what", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 1;
    } catch (const bound_exceeded& e) {
        Json err{{"error", {{"kind", "bound-exceeded"}, {"what", e.what()},
                            {"bound", e.bound}}}};
        std::cout << err.dump(2) << "\n";
        return 3;
    } catch (const domain_error& e) {
        Json err{{"error", {{"kind", "domain"}, {"what", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        Json err{{"error", {{"kind", "internal"}, {"what", e.what()}}}};
        std::cout << err.dump(2) << "\n";
        return 2;
    }
}

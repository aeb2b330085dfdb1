#include "emb/multinorm.hpp"

#include <algorithm>

namespace emb {

BiquadraticDatum::BiquadraticDatum(const Int& a_, const Int& b_) : a(a_), b(b_) {
    // validates: a, b squarefree, distinct, degree-4 field
    FieldFactor::biquadratic(a, b);
}

Rat BiquadraticDatum::subfield_gen(int i) const {
    switch (i) {
        case 1: return Rat(a);
        case 2: return Rat(b);
        case 3: return SquareClass::of(Rat(a * b)).rep();
        default: throw domain_error("subfield_gen: index 1..3");
    }
}

bool BiquadraticDatum::in_split_set(int i, const Place& v, const Config& cfg) const {
    return is_local_square(subfield_gen(i), v, cfg);
}

LocalDegreeReport check_local_degree_hypothesis(const BiquadraticDatum& B,
                                                long sample_bound, const Config& cfg) {
    LocalDegreeReport rep;
    auto some_split = [&](const Place& v) {
        return B.in_split_set(1, v, cfg) || B.in_split_set(2, v, cfg) ||
               B.in_split_set(3, v, cfg);
    };
    // odd unramified places are automatic: the three Legendre symbols of
    // a, b, ab multiply to +1, so they cannot all be -1
    rep.structural = true;
    rep.holds = true;
    std::vector<Rat> data{Rat(B.a), Rat(B.b)};
    for (const Place& v : support_places(data, cfg)) {
        rep.checked_places.push_back(v);
        if (!some_split(v)) {
            rep.holds = false;
            rep.structural = false;
        }
    }
    Int p = 2;
    while (p < sample_bound) {
        mpz_nextprime(p.get_mpz_t(), p.get_mpz_t());
        rep.sampled.push_back(p);
        if (!some_split(Place::finite(p))) {
            rep.holds = false;
            rep.structural = false;
        }
    }
    return rep;
}

int phi_expression(const BiquadraticDatum& B, int expr, const Rat& x, const Config& cfg) {
    if (x == 0) throw domain_error("phi: zero input");
    // (split set, paired generator): the six equal products
    static const int table[6][2] = {{1, 2}, {1, 3}, {2, 3}, {2, 1}, {3, 1}, {3, 2}};
    if (expr < 0 || expr > 5) throw domain_error("phi_expression: index 0..5");
    int set_i = table[expr][0];
    Rat gen = B.subfield_gen(table[expr][1]);
    int prod = 1;
    for (const Place& v : support_places({gen, x, Rat(B.a), Rat(B.b)}, cfg)) {
        if (!B.in_split_set(set_i, v, cfg)) continue;
        prod *= hilbert_symbol(gen, x, v, cfg);
    }
    return prod;
}

int phi(const BiquadraticDatum& B, const Rat& x, const Config& cfg) {
    return phi_expression(B, 0, x, cfg);
}

Rat multinorm_witness(const BiquadraticDatum& B, const Config& cfg) {
    LocalDegreeReport hyp = check_local_degree_hypothesis(B, 100, cfg);
    if (!hyp.holds)
        throw domain_error("multinorm_witness: local degree hypothesis fails");
    // u1 in S1, u2 outside S1, with b a nonsquare at both
    std::set<Int> skip;
    for (const Place& v : support_places({Rat(B.a), Rat(B.b)}, cfg))
        if (v.is_finite()) skip.insert(v.prime());
    auto find_u = [&](bool in_s1) {
        return next_prime_such_that(2, cfg.aux_prime_cap, [&](const Int& p) {
            if (skip.count(p)) return false;
            Place v = Place::finite(p);
            return B.in_split_set(1, v, cfg) == in_s1 &&
                   !is_local_square(Rat(B.b), v, cfg);
        });
    };
    Int u1 = find_u(true), u2 = find_u(false);
    Rat s = prescribe_symbols(Rat(B.b), {{Place::finite(u1), -1}, {Place::finite(u2), -1}},
                              cfg);
    if (phi(B, s, cfg) != -1)
        throw domain_error("multinorm_witness: construction failed verification");
    return s;
}

bool norm_form_indefinite(const Rat& alpha, const Rat& beta, const Rat& a) {
    if (alpha == 0 || beta == 0) throw domain_error("norm_form_indefinite: zero input");
    if (a <= 0) throw domain_error("norm_form_indefinite: a must be positive");
    // diagonal entries 1, -a alpha, -a beta, a alpha beta: indefinite unless
    // all positive
    return !(alpha < 0 && beta < 0);
}

} // namespace emb

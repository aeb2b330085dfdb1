#ifndef EMB_MULTINORM_HPP
#define EMB_MULTINORM_HPP

#include "emb/solvers.hpp"

namespace emb {

// F = Q(sqrt a, sqrt b) with its three quadratic subfields
// K1 = Q(sqrt a), K2 = Q(sqrt b), K3 = Q(sqrt ab)
struct BiquadraticDatum {
    Int a, b;
    BiquadraticDatum(const Int& a_, const Int& b_);

    // generator of the i-th subfield (1-based): a, b, or squarefree(ab)
    Rat subfield_gen(int i) const;
    // v splits in K_i (i.e. K_{i,v} = Q_v)?
    bool in_split_set(int i, const Place& v, const Config& cfg = {}) const;
};

struct LocalDegreeReport {
    bool holds = false;
    bool structural = false;            // proven at all places, not just sampled
    std::vector<Place> checked_places;  // ramified places checked directly
    std::vector<Int> sampled;           // additional sampled primes
};

// every place of Q must split in at least one quadratic subfield
LocalDegreeReport check_local_degree_hypothesis(const BiquadraticDatum& B,
                                                long sample_bound, const Config& cfg = {});

// the obstruction character phi(x) = prod over v in S1 of (b, x)_v,
// reduced to the joint support; expression index 0..5 selects one of the six
// equivalent products (S1/S2/S3 against the two complementary generators)
int phi(const BiquadraticDatum& B, const Rat& x, const Config& cfg = {});
int phi_expression(const BiquadraticDatum& B, int expr, const Rat& x,
                   const Config& cfg = {});

// s with phi(s) = -1: s is a local norm-product everywhere but not a global
// one. Construction: u1 in S1 and u2 outside S1 with b a nonsquare at both,
// then a symbol prescription on b.
Rat multinorm_witness(const BiquadraticDatum& B, const Config& cfg = {});

// is q = x0^2 - a alpha x1^2 - a beta x2^2 + a alpha beta x3^2 indefinite
// over R? (a > 0 required)
bool norm_form_indefinite(const Rat& alpha, const Rat& beta, const Rat& a);

} // namespace emb

#endif

#ifndef EMB_SPLIT_EMBED_HPP
#define EMB_SPLIT_EMBED_HPP

#include "emb/etale.hpp"

namespace emb {

// Does (E, sigma) embed into (M_n(Q), adjoint of target)? For odd n the
// source carries an extra unit factor (Q, id) next to the normal-form part.
struct SplitEmbeddingProblem {
    EtaleInvolutionAlgebra source;
    bool plus_unit_factor = false;
    QuadraticForm target;

    SplitEmbeddingProblem(EtaleInvolutionAlgebra src, QuadraticForm tgt,
                          bool plus_unit = false)
        : source(std::move(src)), plus_unit_factor(plus_unit), target(std::move(tgt)) {
        if (source.dim_E() + (plus_unit_factor ? 1 : 0) != target.rank())
            throw domain_error("SplitEmbeddingProblem: rank mismatch");
    }
};

struct LocalWitness {
    bool ok = false;
    std::optional<FElem> a; // witness in F (even part)
    std::string reason;
};

// machine-checked certificate of the biquadratic parity obstruction
struct ParityCertificate {
    Int p1, p2;
    bool hypotheses_ok = false;
    std::vector<std::string> facts;     // verified numeric steps
    std::vector<Int> sampled_places;    // odd v with p1 nonsquare: p2 checked square in F2_v
    bool verified = false;
};

struct ObstructionReport {
    enum class Verdict { Embeds, LocallyObstructed, GloballyObstructed, Undecided };
    Verdict verdict = Verdict::Undecided;
    std::optional<FElem> witness;        // a with q_a equivalent to target
    std::optional<Rat> witness_unit;     // component on the extra unit factor
    std::optional<Place> bad_place;
    std::string reason;
    std::map<Place, LocalWitness> local_table;
    std::optional<ParityCertificate> certificate;
    long bound = 0;
};

// local embedding test at one place (even-rank problems)
LocalWitness local_embed_test(const SplitEmbeddingProblem& P, const Place& v,
                              const Config& cfg = {});

// thrown by odd_reduction when the peeled value is not represented: the
// local hypothesis fails at the carried place
struct odd_reduction_failure : domain_error {
    Place v;
    odd_reduction_failure(const Place& vv, const std::string& w) : domain_error(w), v(vv) {}
};

// odd-rank reduction: peel alpha = d(target)/d(trace form of the even part),
// return the even problem with a Witt-cancelled target
SplitEmbeddingProblem odd_reduction(const SplitEmbeddingProblem& P, const Config& cfg = {});

ObstructionReport global_embed(const SplitEmbeddingProblem& P, const Config& cfg = {});

// the two-prime counterexample pattern: F = Q x Q(sqrt p1), d = (p1, p2),
// Hasse flips exactly at {p1, p2}; nullopt when the hypotheses fail
std::optional<ParityCertificate> parity_obstruction(const Int& p1, const Int& p2,
                                                    const std::set<Place>& flips,
                                                    const Config& cfg = {});

} // namespace emb

#endif

#ifndef EMB_ETALE_HPP
#define EMB_ETALE_HPP

#include "emb/qform.hpp"
#include "emb/solvers.hpp"

namespace emb {

// E = F[x]/(x^2 - d) with the involution x -> -x; F = prod of the factors.
struct EtaleInvolutionAlgebra {
    EtaleF F;
    FElem d;

    EtaleInvolutionAlgebra(EtaleF factors, FElem dd);
    int dim_F() const;
    int dim_E() const { return 2 * dim_F(); }
    std::string str() const;
};

// element u + v x of E, componentwise over the factors
struct EElem {
    FElem u, v;
};

EElem ee_from_F(const FElem& u);
EElem ee_mul(const EtaleInvolutionAlgebra& A, const EElem& x, const EElem& y);
EElem ee_conj(const EtaleInvolutionAlgebra& A, const EElem& x); // sigma
EElem ee_inv(const EtaleInvolutionAlgebra& A, const EElem& x);
bool ee_invertible(const EtaleInvolutionAlgebra& A, const EElem& x);
bool ee_equal(const EElem& x, const EElem& y);

// diagonalized trace form of (v,w) -> Tr_{E/Q}(a v sigma(w)), a invertible in F
QuadraticForm trace_form(const EtaleInvolutionAlgebra& A, const FElem& a,
                         const Config& cfg = {});

// h_v(q_a) / h_v(q_1): the corestriction symbol Cor_{F ⊗ Q_v / Q_v}(a, d)
// realized through the trace-form identity
int cor_term(const EtaleInvolutionAlgebra& A, const FElem& a, const Place& v,
             const Config& cfg = {});

// same value through the completions: prod over w | v of (a, d)_w
int cor_term_symbols(const EtaleInvolutionAlgebra& A, const FElem& a, const Place& v,
                     const Config& cfg = {});

// element of F with corestriction symbol -1 at v, built from small local
// class representatives (nullopt when every completion of d over v is a
// square, making the corestriction pairing trivial there)
std::optional<FElem> cor_flipper(const EtaleInvolutionAlgebra& A, const Place& v,
                                 const Config& cfg = {});

// y with x = y sigma(y)^{-1}, given x sigma(x) = 1
EElem hilbert90_solve(const EtaleInvolutionAlgebra& A, const EElem& x,
                      const Config& cfg = {});

// can the etale algebra E = prod E_j (no involution) embed into M_{n/2}(D)
// where D has the given ramification set? Per factor: every completion over
// every ramified place must have even local degree.
struct SplitsReport {
    bool ok = true;
    struct Entry {
        int factor;
        bool ok;
        std::optional<Place> failing_place;
    };
    std::vector<Entry> per_factor;
};
SplitsReport splits_csa(const EtaleF& E_factors, const std::set<Place>& D_ram, int n,
                        const Config& cfg = {});

// invertible elements of F realizing every sign pattern at the real embeddings
std::vector<FElem> real_sign_patterns(const EtaleF& F);

} // namespace emb

#endif

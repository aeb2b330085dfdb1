#ifndef EMB_QUAT_HPP
#define EMB_QUAT_HPP

#include "emb/etale.hpp"

namespace emb {

// (alpha, beta): i^2 = alpha, j^2 = beta, ij = k = -ji
struct QuaternionAlgebra {
    Int alpha, beta;
    std::vector<Place> ram; // computed on construction

    QuaternionAlgebra(const Int& a, const Int& b, const Config& cfg = {});
    bool is_split() const { return ram.empty(); }
    bool ramified_at(const Place& v) const;
    std::string str() const { return "(" + alpha.get_str() + "," + beta.get_str() + ")"; }
};

std::vector<Place> ram_set(const Int& alpha, const Int& beta, const Config& cfg = {});
QuaternionAlgebra quaternion_from_ramset(const std::set<Place>& R, const Config& cfg = {});

// pure quaternion x i + y j + z k
struct PureQuaternion {
    Rat x, y, z;
    bool is_zero() const { return x == 0 && y == 0 && z == 0; }
};

// diagonal skew-hermitian form <q_1, ..., q_m> over (D, canonical involution)
struct SkewHermitianForm {
    QuaternionAlgebra D;
    std::vector<PureQuaternion> entries;

    SkewHermitianForm(QuaternionAlgebra d, std::vector<PureQuaternion> qs);
    int dim() const { return static_cast<int>(entries.size()); }
    Rat nrd(int i) const; // reduced norm of the i-th entry
};

// discriminant of the adjoint orthogonal involution:
// class of (-1)^m prod Nrd(q_i)
SquareClass disc_involution(const SkewHermitianForm& h, const Config& cfg = {});

struct ZDescriptor {
    bool split = true;
    Rat disc = 1; // squarefree representative; Z = Q(sqrt disc) when not split
    bool split_at(const Place& v, const Config& cfg = {}) const {
        return split || is_local_square(disc, v, cfg);
    }
};
ZDescriptor clifford_center(const SkewHermitianForm& h, const Config& cfg = {});

// V = { v in ram(D) : Z_v split }, the places carrying delta data
std::vector<Place> bad_set_V(const SkewHermitianForm& h, const Config& cfg = {});

// relative Clifford-class shift of twisting by a: at each support place the
// corestriction bit, killed where Z_v is a field
std::map<Place, int> clifford_shift(const EtaleF& F, const FElem& a, const FElem& d,
                                    const ZDescriptor& Z, const Config& cfg = {});

// F_2 data over V modulo the all-ones vector
struct DeltaVector {
    std::vector<Place> V;
    std::vector<int> bits;

    bool is_zero_class() const;
    bool same_class(const DeltaVector& o) const;
    DeltaVector plus(const DeltaVector& o) const;
};
DeltaVector delta_difference(const std::map<Place, int>& shift,
                             const std::vector<Place>& V);

// Clifford center of the involutions theta_a attached to E = F[x]/(x^2-d)
// inside M_m(D): disc = (-1)^m N_{F/Q}(d)
ZDescriptor derived_center(const EtaleF& F, const FElem& d, const Config& cfg = {});

// checkpoint place with the additional center constraint
Place check_star(const EtaleF& F, const FElem& d, const ZDescriptor& Z,
                 const std::set<Place>& avoid, const Config& cfg = {});
// at every ramified place with split center, some component of d must stay a
// local nonsquare
bool check_sharp(const EtaleF& F, const FElem& d, const QuaternionAlgebra& D,
                 const Config& cfg = {});

struct NonsplitCertificate {
    FElem a;
    Place v0;
    ZDescriptor Z;
    std::vector<Place> pinned;                  // S = ram ∪ inf ∪ twists ∪ given pins
    std::map<Place, FElem> corrected_pins;      // pins after twist corrections
    std::map<Place, FElem> twist_corrections;   // b_v with nontrivial cor symbol
    std::vector<Place> V;
    std::vector<int> delta_bits;                // all zero when verified
    bool verified = false;
};

// the global construction: a in F^x matching the (corrected) local pins up to
// squares on S, with trivial corestriction symbols outside S ∪ {v0}, and zero
// delta difference over V; requires (#) and a checkpoint place
NonsplitCertificate nonsplit_global_a(const QuaternionAlgebra& D, int m, const EtaleF& F,
                                      const FElem& d, const std::map<Place, FElem>& pins,
                                      const std::set<Place>& twist_places,
                                      const Config& cfg = {});

// the quadratic form of the adjoint involution at a place where D splits,
// through an explicit splitting over L = Q(sqrt gamma) with gamma a local
// square at v (or over Q when gamma is a perfect square)
struct SplitPlaceForm {
    Place v;
    std::optional<FieldFactor> L; // nullopt: entries rational
    std::vector<FactorElem> diag; // entries in L (or Q)
    int rank = 0;
    bool det_is_square_at_v = false;
    bool disc_matches_involution = false; // delta-class check against disc_involution
    int hasse_at_v = 1;
    int witt_index_at_v = 0;
    std::optional<std::pair<int, int>> signature; // real v only
};
SplitPlaceForm split_place_form(const SkewHermitianForm& h, const Place& v,
                                const Config& cfg = {});

} // namespace emb

#endif

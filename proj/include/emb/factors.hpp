#ifndef EMB_FACTORS_HPP
#define EMB_FACTORS_HPP

#include <optional>
#include <string>
#include <vector>

#include "emb/places.hpp"

namespace emb {

// One factor of an etale Q-algebra: Q, Q(sqrt m), or Q(sqrt a, sqrt b).
class FieldFactor {
public:
    enum class Kind { Rational, Quadratic, Biquadratic };

    static FieldFactor rational();
    static FieldFactor quadratic(const Int& m);          // m squarefree, not 0 or 1
    static FieldFactor biquadratic(const Int& a, const Int& b); // squarefree, distinct, != 0,1

    Kind kind() const { return kind_; }
    int degree() const;
    const Int& m() const { return m_; }  // quadratic
    const Int& a() const { return m_; }  // biquadratic
    const Int& b() const { return b_; }

    // number of real embeddings (1, 2 or 0, 4 or 0)
    int real_embeddings() const;
    std::string str() const;

    friend bool operator==(const FieldFactor& x, const FieldFactor& y) {
        return x.kind_ == y.kind_ && x.m_ == y.m_ && x.b_ == y.b_;
    }

private:
    FieldFactor(Kind k, Int m, Int b) : kind_(k), m_(std::move(m)), b_(std::move(b)) {}
    Kind kind_;
    Int m_, b_;
};

// Element of a factor in its power basis:
//   Rational:    c0
//   Quadratic:   c0 + c1 sqrt(m)
//   Biquadratic: c0 + c1 sqrt(a) + c2 sqrt(b) + c3 sqrt(ab)   (ab not reduced)
struct FactorElem {
    std::vector<Rat> c;

    static FactorElem from_rat(const FieldFactor& f, const Rat& x);
    bool is_zero() const;
    bool is_rational() const;
    std::string str(const FieldFactor& f) const;
};

FactorElem fe_add(const FieldFactor& f, const FactorElem& x, const FactorElem& y);
FactorElem fe_sub(const FieldFactor& f, const FactorElem& x, const FactorElem& y);
FactorElem fe_neg(const FieldFactor& f, const FactorElem& x);
FactorElem fe_mul(const FieldFactor& f, const FactorElem& x, const FactorElem& y);
FactorElem fe_inv(const FieldFactor& f, const FactorElem& x);
FactorElem fe_scale(const FieldFactor& f, const Rat& s, const FactorElem& x);
Rat fe_trace(const FieldFactor& f, const FactorElem& x);
Rat fe_norm(const FieldFactor& f, const FactorElem& x);
bool fe_is_square(const FieldFactor& f, const FactorElem& x, const Config& cfg = {});
// exact square root within the factor, when one exists
std::optional<FactorElem> fe_sqrt(const FieldFactor& f, const FactorElem& x);

// exact sign at real embedding e (0-based; quadratic: 0 is sqrt(m) > 0)
int fe_sign_at(const FieldFactor& f, const FactorElem& x, int e);

// A place of a factor field lying over a place of Q.
struct ExtPlace {
    enum class Kind { SplitCopy, Inert, Ramified, Complex };

    Place base;
    int factor_index = 0;
    Kind kind = Kind::SplitCopy;
    int copy = 0;        // split copy / real embedding index
    int local_degree = 1;
    Int residue_q = 0;   // residue field size at finite tame places

    std::string str() const;
};

// Local factorization F_j ⊗ Q_v = ∏ completions. Sum of local degrees equals
// the factor degree.
std::vector<ExtPlace> ext_places(const FieldFactor& f, int factor_index,
                                 const Place& v, const Config& cfg = {});

// valuation of x at a finite ExtPlace (normalized: uniformizer has value 1)
long ext_val(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
             const Config& cfg = {});

// x ∈ F_w^x a square?
bool is_ext_square(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                   const Config& cfg = {});

// quadratic character of the residue of the unit part of x, at a finite
// odd nonsplit completion (the residue formula's main ingredient)
int ext_unit_character(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                       const Config& cfg = {});

// Square class of the image of x in the completion at a split copy,
// as a canonical rational representative (p^{0,1} * unit rep).
Rat split_copy_class_rep(const FieldFactor& f, const FactorElem& x, const ExtPlace& w,
                         const Config& cfg = {});

} // namespace emb

#endif

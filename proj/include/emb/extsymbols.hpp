#ifndef EMB_EXTSYMBOLS_HPP
#define EMB_EXTSYMBOLS_HPP

#include "emb/factors.hpp"

namespace emb {

// Hilbert symbol of a, b over the completion F_w of the factor field.
// Tame places use the residue formula, archimedean places sign evaluation,
// split copies the base-field symbol of the images. A nonsplit dyadic place
// is evaluated through Hilbert reciprocity over the factor field (the dyadic
// place is then unique, so its symbol is the product of all the others).
int ext_hilbert_symbol(const FieldFactor& f, const FactorElem& a, const FactorElem& b,
                       const ExtPlace& w, const Config& cfg = {});

// Square test at the nonsplit dyadic place of a real or imaginary quadratic
// field: x is a square iff it pairs trivially with a verified generating set
// of F_w^x / (F_w^x)^2 (the Hilbert pairing is nondegenerate with radical
// the squares).
bool dyadic_nonsplit_quad_square(const FieldFactor& f, const FactorElem& x,
                                 const Config& cfg = {});

} // namespace emb

#endif

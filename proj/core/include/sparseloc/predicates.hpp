#pragma once

#include "sparseloc/geometry.hpp"

namespace sparseloc::predicates {

// Sign-exact geometric predicates. A floating-point evaluation is used when its
// error bound certifies the sign; otherwise the determinant is recomputed in
// exact rational arithmetic.

/// +1 if a, b, c turn counter-clockwise, -1 clockwise, 0 collinear.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

/// +1 if d is strictly inside the circle through a, b, c (given counter-clockwise),
/// -1 outside, 0 cocircular.
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

}  // namespace sparseloc::predicates

#pragma once

#include <vector>

#include "supergeo/atlas.hpp"
#include "supergeo/intersection.hpp"

namespace supergeo {

// Affine-cell atlas of the complex Grassmannian of k|l planes in C^{m|n},
// realified at generation time: every complex coordinate contributes a
// (re, im) pair of real coordinates, in that order, so the even dimension is
// 2(k(m-k) + l(n-l)) and the odd one 2(k(n-l) + l(m-k)).  Charts are indexed
// by the column sets normalized to the identity, id "<evens>|<odds>" (digit
// strings; the odd half is dropped when there are no odd columns).  Every
// ordered chart pair gets a transition with deterministic overlap samples,
// and models with at least three charts declare all commuting triples.
SuperManifoldModel build_supergrassmannian(int k, int l, int m, int n);

// Pi-symmetric variant: k|k planes in C^{m|m} invariant under the odd
// involution that swaps the even and odd halves.  Plane matrices have the
// block form [[A, B], [-B, A]], so charts are indexed by k-subsets of the
// columns alone (id = digit string) and the free entries of A and B supply
// matching even and odd coordinates; the atlas carries the index-aligned pi
// structure.  The body is the ordinary Grassmannian Gr(k, m).
SuperManifoldModel build_pi_grassmannian(int k, int m);

// Positive rescaling of the per-chart gradient of sum_j c_j |z_j|^2 /
// sum_j |z_j|^2 on the body of a k=1 pi Grassmannian (projective space); the
// rescaling clears denominators so zero finding sees polynomial components.
// For distinct constants, one per chart, the field has exactly one zero per
// chart, at the origin, and every zero has index +1, which is what makes the
// Euler pair come out to (m, m).
VectorField standard_morse_field(const SuperManifoldModel& model,
                                 const std::vector<double>& constants);

}  // namespace supergeo

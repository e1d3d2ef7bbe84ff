#pragma once

#include "zdirac/lattice.hpp"

namespace zdirac {

struct InertiaOptions {
    // Diagonal pivots are taken greedily from an independent set; a node
    // qualifies when |a_ii| >= pivot_ratio * max_j |a_ij|.
    double pivot_ratio = 1e-10;
    // Dense-block pivots below collision_tol * max|block| count as a hit.
    double collision_tol = 16 * 2.220446049250313e-16;
};

struct InertiaStats {
    long eliminated = 0;
    long remainder = 0;
    long components = 0;
    long max_block = 0;
};

// Number of eigenvalues of the symmetric matrix M strictly below lambda
// (negative inertia of M - lambda I). M must be stored with both triangles.
long inertia_count(const SparseSym& M, double lambda, const InertiaOptions& opt = {}, InertiaStats* stats = nullptr);

// Retries with lambda + nudge, lambda - nudge, lambda + 2 nudge, ... on ShiftCollision.
long inertia_count_nudged(const SparseSym& M, double lambda, double nudge = 1e-9, int retries = 3,
                          const InertiaOptions& opt = {});

}  // namespace zdirac

#pragma once

// Independently constructed reference groups and exhaustive oracles used to
// pin expected values in the tests. Everything here is deliberately separate
// from the library's own group machinery: closures are computed by plain
// BFS multiplication, block systems by enumerating partitions, centralizers
// by scanning all of S_d.

#include <vector>

#include "perm.hpp"

namespace galmono::testsupport {

Permutation from_cycles_1based(int degree, const std::vector<std::vector<int>>& cycles);

PermGroup symmetric_group(int n);
PermGroup cyclic_group(int n);

/// S2 wr Sk acting on 2k points with blocks {2i, 2i+1}.
PermGroup full_sign_wreath(int k);
/// S2 wr Sk intersected with A_{2k}: the even-sign-pattern subgroup.
PermGroup even_sign_wreath(int k);

/// Mon(W/Z) reference for the normalized five-point problem on 40 points:
/// correlated sign flips over the twisted-pair blocks extended by the even
/// sign wreath on the 20 underlying points. Its order is 2^19 * 10!.
PermGroup five_point_normalized_reference();

/// S2 wr (S2 wr S16 cap A32) cap A64 on 64 points; order 2^46 * 16!.
PermGroup three_view_reference();

/// The two published generators of the calibrated-homography group on 12
/// points (order 96).
PermGroup homography_reference();
/// The two published centralizer generators of that group.
std::vector<Permutation> homography_centralizer_generators();

// exhaustive oracles (small degrees / small orders only)
std::vector<Permutation> brute_force_elements(const PermGroup& g, size_t cap = 2000000);
BigInt brute_force_order(const PermGroup& g, size_t cap = 2000000);
std::vector<BlockSystem> brute_force_block_systems(const PermGroup& g);  // d <= 12
std::vector<Permutation> brute_force_centralizer(const PermGroup& g);    // d <= 8

}  // namespace galmono::testsupport

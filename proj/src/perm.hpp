#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "types.hpp"

namespace galmono {

using BigInt = boost::multiprecision::cpp_int;

/// Image-array permutation, 0-based internally; all rendered output is
/// 1-based.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(int degree);  // identity
  static Permutation from_images(std::vector<int> images);

  int degree() const { return static_cast<int>(img_.size()); }
  int operator[](int i) const { return img_[i]; }
  const std::vector<int>& images() const { return img_; }

  bool is_identity() const;
  bool is_even() const;
  Permutation inverse() const;
  /// apply *this first, then next
  Permutation then(const Permutation& next) const;
  /// smallest moved point, or -1 for the identity
  int first_moved() const;
  long order() const;

  std::vector<std::vector<int>> cycles() const;  // nontrivial cycles, 0-based
  std::string cycle_string() const;              // 1-based, "()" for identity

  bool operator==(const Permutation& o) const { return img_ == o.img_; }
  bool operator<(const Permutation& o) const { return img_ < o.img_; }

private:
  std::vector<int> img_;
};

/// Equal-size G-invariant partition of {0..d-1}; blocks sorted by smallest
/// element, elements ascending.
struct BlockSystem {
  std::vector<std::vector<int>> blocks;

  int num_blocks() const { return static_cast<int>(blocks.size()); }
  int block_size() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].size()); }
  bool operator==(const BlockSystem& o) const { return blocks == o.blocks; }
};

class PermGroup {
public:
  PermGroup() = default;
  /// Drops identity generators and duplicates.
  PermGroup(int degree, std::vector<Permutation> generators);

  int degree() const { return degree_; }
  const std::vector<Permutation>& generators() const { return gens_; }
  bool trivial() const { return gens_.empty(); }

  BigInt order() const;
  bool contains(const Permutation& p) const;

  std::vector<std::vector<int>> orbits() const;
  bool is_transitive() const;
  /// true iff every generator is even (then the group lies in A_d)
  bool all_even() const;

  /// Smallest block of a G-block-system containing {a, b} (Atkinson).
  /// Requires a transitive group.
  std::vector<int> minimal_block(int a, int b) const;
  /// Full partition variant of minimal_block.
  BlockSystem minimal_block_system(int a, int b) const;
  /// Every nontrivial block system, closed under joins. Degrees <= 64 only.
  std::vector<BlockSystem> all_block_systems() const;
  bool is_primitive() const;

  /// Centralizer of a transitive group in Sym({0..d-1}): each element is
  /// determined by the image of point 0, propagated along a Schreier tree
  /// and verified on all generator edges.
  PermGroup centralizer_in_sym() const;
  /// All centralizer elements including the identity.
  std::vector<Permutation> centralizer_elements() const;

  /// Induced action on the blocks of B (degree = number of blocks).
  PermGroup action_on_blocks(const BlockSystem& B) const;
  /// Setwise stabilizer of B.blocks[block_index], restricted to that block
  /// (Schreier generators of the block-point stabilizer in the block
  /// action).
  PermGroup block_stabilizer_action(const BlockSystem& B, int block_index) const;

private:
  void ensure_chain() const;

  int degree_ = 0;
  std::vector<Permutation> gens_;
  mutable std::shared_ptr<const class StabilizerChain> chain_;
};

BigInt factorial(int n);

/// Invariant factors d1 | d2 | ... | dk of a finite abelian group given by
/// its element-order multiset; empty for the trivial group.
std::vector<int> abelian_invariants(const std::vector<Permutation>& elements);

struct GroupReport {
  int degree = 0;
  BigInt order = 1;
  bool transitive = false;
  bool all_even = false;
  bool primitive = false;
  std::vector<BlockSystem> block_systems;
  /// Hasse edges (i, j): system i properly refines system j with nothing in
  /// between.
  std::vector<std::pair<int, int>> lattice_edges;
  std::vector<Permutation> deck_elements;  // includes identity
  int deck_order = 1;
  bool deck_abelian = true;
  std::vector<int> deck_abelian_invariants;
  bool is_full_symmetric = false;
  bool is_alternating = false;
};

/// Assembles order, transitivity, parity, the block-system lattice and the
/// deck group (= centralizer in the full symmetric group).
GroupReport structure_report(const PermGroup& g);

}  // namespace galmono

#include "reference_groups.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace galmono::testsupport {

Permutation from_cycles_1based(int degree, const std::vector<std::vector<int>>& cycles) {
  std::vector<int> img(degree);
  std::iota(img.begin(), img.end(), 0);
  for (const auto& c : cycles) {
    for (size_t i = 0; i < c.size(); ++i) {
      int from = c[i] - 1;
      int to = c[(i + 1) % c.size()] - 1;
      img[from] = to;
    }
  }
  return Permutation::from_images(img);
}

PermGroup symmetric_group(int n) {
  std::vector<Permutation> gens;
  if (n >= 2) {
    std::vector<int> swap01(n);
    std::iota(swap01.begin(), swap01.end(), 0);
    std::swap(swap01[0], swap01[1]);
    gens.push_back(Permutation::from_images(swap01));
  }
  if (n >= 3) {
    std::vector<int> cycle(n);
    for (int i = 0; i < n; ++i) cycle[i] = (i + 1) % n;
    gens.push_back(Permutation::from_images(cycle));
  }
  return PermGroup(n, gens);
}

PermGroup cyclic_group(int n) {
  std::vector<int> cycle(n);
  for (int i = 0; i < n; ++i) cycle[i] = (i + 1) % n;
  return PermGroup(n, {Permutation::from_images(cycle)});
}

namespace {

// permutation of 2k points induced by a permutation of the k blocks
Permutation lift_block_perm(int k, const std::vector<int>& block_images) {
  std::vector<int> img(2 * k);
  for (int b = 0; b < k; ++b) {
    img[2 * b] = 2 * block_images[b];
    img[2 * b + 1] = 2 * block_images[b] + 1;
  }
  return Permutation::from_images(img);
}

Permutation block_swap01(int k) {
  std::vector<int> ids(k);
  std::iota(ids.begin(), ids.end(), 0);
  std::swap(ids[0], ids[1]);
  return lift_block_perm(k, ids);
}

Permutation block_cycle(int k) {
  std::vector<int> ids(k);
  for (int i = 0; i < k; ++i) ids[i] = (i + 1) % k;
  return lift_block_perm(k, ids);
}

Permutation flips(int degree, const std::vector<int>& pairs_to_flip) {
  // flips the pair {2j, 2j+1} for each listed j
  std::vector<int> img(degree);
  std::iota(img.begin(), img.end(), 0);
  for (int j : pairs_to_flip) std::swap(img[2 * j], img[2 * j + 1]);
  return Permutation::from_images(img);
}

}  // namespace

PermGroup full_sign_wreath(int k) {
  std::vector<Permutation> gens{flips(2 * k, {0}), block_swap01(k)};
  if (k >= 3) gens.push_back(block_cycle(k));
  return PermGroup(2 * k, gens);
}

PermGroup even_sign_wreath(int k) {
  std::vector<Permutation> gens{flips(2 * k, {0, 1}), block_swap01(k)};
  if (k >= 3) gens.push_back(block_cycle(k));
  return PermGroup(2 * k, gens);
}

PermGroup five_point_normalized_reference() {
  // 40 points (i, s) with index 2 i + s: i indexes the 20 X-solutions
  // (twisted pairs {2j, 2j+1}), s the two lifts with t negated.
  const int k = 10;
  const int degree = 40;
  auto lift = [&](const Permutation& xperm) {
    std::vector<int> img(degree);
    for (int i = 0; i < 20; ++i)
      for (int s = 0; s < 2; ++s) img[2 * i + s] = 2 * xperm[i] + s;
    return Permutation::from_images(img);
  };
  PermGroup x_level = even_sign_wreath(k);
  std::vector<Permutation> gens;
  for (const auto& g : x_level.generators()) gens.push_back(lift(g));
  // correlated lift flips: both members of twisted pair j flip together
  for (int j = 0; j < k; ++j) gens.push_back(flips(degree, {2 * j, 2 * j + 1}));
  return PermGroup(degree, gens);
}

PermGroup three_view_reference() {
  const int degree = 64;
  auto lift = [&](const Permutation& inner) {
    std::vector<int> img(degree);
    for (int i = 0; i < 32; ++i)
      for (int s = 0; s < 2; ++s) img[2 * i + s] = 2 * inner[i] + s;
    return Permutation::from_images(img);
  };
  PermGroup inner = even_sign_wreath(16);  // on 32 points
  std::vector<Permutation> gens;
  for (const auto& g : inner.generators()) gens.push_back(lift(g));
  // even sign patterns over the 32 lift pairs: one same-block double flip
  // and one cross-block double flip generate them all under conjugation
  gens.push_back(flips(degree, {0, 1}));
  gens.push_back(flips(degree, {0, 2}));
  return PermGroup(degree, gens);
}

PermGroup homography_reference() {
  Permutation g1 = from_cycles_1based(
      12, {{1, 2}, {3, 4}, {5, 12, 8, 9}, {6, 11, 7, 10}});
  Permutation g2 = from_cycles_1based(12, {{1, 11, 5}, {2, 10, 8}, {3, 9, 7}, {4, 12, 6}});
  return PermGroup(12, {g1, g2});
}

std::vector<Permutation> homography_centralizer_generators() {
  return {from_cycles_1based(12, {{1, 3}, {2, 4}, {5, 7}, {6, 8}, {9, 11}, {10, 12}}),
          from_cycles_1based(12, {{1, 4}, {2, 3}, {5, 8}, {6, 7}, {9, 12}, {10, 11}})};
}

std::vector<Permutation> brute_force_elements(const PermGroup& g, size_t cap) {
  std::set<Permutation> closed;
  std::vector<Permutation> queue{Permutation(g.degree())};
  closed.insert(queue.front());
  while (!queue.empty()) {
    Permutation cur = queue.back();
    queue.pop_back();
    for (const auto& gen : g.generators()) {
      Permutation next = cur.then(gen);
      if (closed.insert(next).second) {
        if (closed.size() > cap)
          fail(ErrorCode::InvalidArgument, "brute force closure exceeded cap");
        queue.push_back(next);
      }
    }
  }
  return {closed.begin(), closed.end()};
}

BigInt brute_force_order(const PermGroup& g, size_t cap) {
  return BigInt(brute_force_elements(g, cap).size());
}

namespace {

void equal_partitions(int d, int block_size, std::vector<int>& assignment,
                      std::vector<std::vector<int>>& blocks,
                      std::vector<std::vector<std::vector<int>>>& out) {
  int first = -1;
  for (int i = 0; i < d; ++i)
    if (assignment[i] < 0) {
      first = i;
      break;
    }
  if (first < 0) {
    out.push_back(blocks);
    return;
  }
  // start a new block with the smallest unassigned point (canonical order)
  blocks.emplace_back();
  blocks.back().push_back(first);
  assignment[first] = static_cast<int>(blocks.size()) - 1;

  std::vector<int> free_pts;
  for (int i = first + 1; i < d; ++i)
    if (assignment[i] < 0) free_pts.push_back(i);

  std::vector<int> chosen;
  std::function<void(size_t, int)> choose = [&](size_t from, int need) {
    if (need == 0) {
      for (int p : chosen) {
        blocks.back().push_back(p);
        assignment[p] = static_cast<int>(blocks.size()) - 1;
      }
      equal_partitions(d, block_size, assignment, blocks, out);
      for (int p : chosen) assignment[p] = -1;
      blocks.back().resize(1);
      return;
    }
    for (size_t i = from; i + need <= free_pts.size() + 1 && i < free_pts.size(); ++i) {
      chosen.push_back(free_pts[i]);
      choose(i + 1, need - 1);
      chosen.pop_back();
    }
  };
  choose(0, block_size - 1);

  assignment[first] = -1;
  blocks.pop_back();
}

}  // namespace

std::vector<BlockSystem> brute_force_block_systems(const PermGroup& g) {
  const int d = g.degree();
  if (d > 12) fail(ErrorCode::InvalidArgument, "brute force blocks: degree too large");
  std::vector<BlockSystem> found;
  for (int size = 2; size < d; ++size) {
    if (d % size != 0) continue;
    std::vector<int> assignment(d, -1);
    std::vector<std::vector<int>> blocks;
    std::vector<std::vector<std::vector<int>>> partitions;
    equal_partitions(d, size, assignment, blocks, partitions);
    for (auto& part : partitions) {
      // G-invariance: every generator maps blocks onto blocks
      std::vector<int> owner(d);
      for (size_t b = 0; b < part.size(); ++b)
        for (int p : part[b]) owner[p] = static_cast<int>(b);
      bool invariant = true;
      for (const auto& gen : g.generators()) {
        for (const auto& blk : part) {
          int target = owner[gen[blk[0]]];
          for (int p : blk)
            if (owner[gen[p]] != target) {
              invariant = false;
              break;
            }
          if (!invariant) break;
        }
        if (!invariant) break;
      }
      if (invariant) {
        BlockSystem bs;
        bs.blocks = part;
        found.push_back(bs);
      }
    }
  }
  std::sort(found.begin(), found.end(), [](const BlockSystem& a, const BlockSystem& b) {
    if (a.block_size() != b.block_size()) return a.block_size() < b.block_size();
    return a.blocks < b.blocks;
  });
  return found;
}

std::vector<Permutation> brute_force_centralizer(const PermGroup& g) {
  const int d = g.degree();
  if (d > 8) fail(ErrorCode::InvalidArgument, "brute force centralizer: degree too large");
  std::vector<int> img(d);
  std::iota(img.begin(), img.end(), 0);
  std::vector<Permutation> out;
  do {
    Permutation p = Permutation::from_images(img);
    bool commutes = true;
    for (const auto& gen : g.generators())
      if (!(p.then(gen) == gen.then(p))) {
        commutes = false;
        break;
      }
    if (commutes) out.push_back(p);
  } while (std::next_permutation(img.begin(), img.end()));
  return out;
}

}  // namespace galmono::testsupport

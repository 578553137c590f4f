#include "perm.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace galmono {

Permutation::Permutation(int degree) : img_(degree) {
  std::iota(img_.begin(), img_.end(), 0);
}

Permutation Permutation::from_images(std::vector<int> images) {
  const int d = static_cast<int>(images.size());
  std::vector<bool> seen(d, false);
  for (int v : images) {
    if (v < 0 || v >= d || seen[v])
      fail(ErrorCode::InvalidArgument, "permutation images are not a bijection");
    seen[v] = true;
  }
  Permutation p;
  p.img_ = std::move(images);
  return p;
}

bool Permutation::is_identity() const {
  for (int i = 0; i < degree(); ++i)
    if (img_[i] != i) return false;
  return true;
}

bool Permutation::is_even() const {
  // parity from cycle decomposition
  std::vector<bool> seen(img_.size(), false);
  int transpositions = 0;
  for (int i = 0; i < degree(); ++i) {
    if (seen[i]) continue;
    int len = 0;
    for (int j = i; !seen[j]; j = img_[j]) {
      seen[j] = true;
      ++len;
    }
    transpositions += len - 1;
  }
  return transpositions % 2 == 0;
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(img_.size());
  for (int i = 0; i < degree(); ++i) inv[img_[i]] = i;
  Permutation p;
  p.img_ = std::move(inv);
  return p;
}

Permutation Permutation::then(const Permutation& next) const {
  std::vector<int> r(img_.size());
  for (int i = 0; i < degree(); ++i) r[i] = next.img_[img_[i]];
  Permutation p;
  p.img_ = std::move(r);
  return p;
}

int Permutation::first_moved() const {
  for (int i = 0; i < degree(); ++i)
    if (img_[i] != i) return i;
  return -1;
}

long Permutation::order() const {
  long ord = 1;
  for (const auto& c : cycles()) ord = std::lcm(ord, static_cast<long>(c.size()));
  return ord;
}

std::vector<std::vector<int>> Permutation::cycles() const {
  std::vector<std::vector<int>> out;
  std::vector<bool> seen(img_.size(), false);
  for (int i = 0; i < degree(); ++i) {
    if (seen[i] || img_[i] == i) {
      seen[i] = true;
      continue;
    }
    std::vector<int> c;
    for (int j = i; !seen[j]; j = img_[j]) {
      seen[j] = true;
      c.push_back(j);
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::string Permutation::cycle_string() const {
  auto cs = cycles();
  if (cs.empty()) return "()";
  std::string s;
  for (const auto& c : cs) {
    s += '(';
    for (size_t i = 0; i < c.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(c[i] + 1);
    }
    s += ')';
  }
  return s;
}

// ---------------------------------------------------------------------------
// Deterministic Schreier-Sims with explicit base (degrees <= 64 in practice).

class StabilizerChain {
public:
  StabilizerChain(int degree, const std::vector<Permutation>& gens)
      : degree_(degree) {
    // at most one level per point; reserving keeps Level references stable
    // across the recursive inserts below
    levels_.reserve(static_cast<size_t>(std::max(degree, 1)));
    for (const auto& g : gens)
      if (!g.is_identity()) insert(g, find_insert_level(g, 0));
  }

  BigInt order() const {
    BigInt o = 1;
    for (const auto& lv : levels_) o *= static_cast<int>(lv.orbit.size());
    return o;
  }

  bool contains(const Permutation& p) const {
    Permutation r = p;
    if (sift(r)) return r.is_identity();
    return false;
  }

private:
  struct Level {
    int base = 0;
    std::vector<Permutation> gens;
    std::vector<int> orbit;                              // discovery order
    std::vector<std::optional<Permutation>> transversal; // point -> u with u(base)=point
    size_t processed_points = 0;  // Schreier pairs (point, gen) already sifted
    size_t processed_gens = 0;
  };

  // Sifts p through the chain; on success p becomes the residue.
  bool sift(Permutation& p) const {
    for (const auto& lv : levels_) {
      if (p.is_identity()) return true;
      int image = p[lv.base];
      if (image == lv.base) continue;
      const auto& u = lv.transversal[image];
      if (!u) return false;
      p = p.then(u->inverse());
    }
    return true;
  }

  void insert(const Permutation& g, size_t level) {
    if (g.is_identity()) return;
    if (level == levels_.size()) {
      Level nl;
      nl.base = g.first_moved();
      nl.transversal.assign(degree_, std::nullopt);
      nl.orbit.push_back(nl.base);
      nl.transversal[nl.base] = Permutation(degree_);
      levels_.push_back(std::move(nl));
    }
    Level& lv = levels_[level];
    if (g[lv.base] == lv.base) {
      insert(g, level + 1);
      return;
    }
    lv.gens.push_back(g);
    extend_orbit(level);
    process_schreier(level);
  }

  void extend_orbit(size_t level) {
    Level& lv = levels_[level];
    // BFS continues from scratch over the grown generator set; the orbit
    // vector only ever grows, so discovery order stays stable.
    size_t head = 0;
    while (head < lv.orbit.size()) {
      int p = lv.orbit[head++];
      for (const auto& s : lv.gens) {
        int q = s[p];
        if (!lv.transversal[q]) {
          lv.transversal[q] = lv.transversal[p]->then(s);
          lv.orbit.push_back(q);
        }
      }
    }
  }

  void process_schreier(size_t level) {
    Level& lv = levels_[level];
    for (;;) {
      size_t np = lv.orbit.size(), ng = lv.gens.size();
      if (lv.processed_points == np && lv.processed_gens == ng) break;
      // new point x all gens; all points x new gens
      std::vector<std::pair<size_t, size_t>> todo;
      for (size_t pi = lv.processed_points; pi < np; ++pi)
        for (size_t gi = 0; gi < ng; ++gi) todo.emplace_back(pi, gi);
      for (size_t pi = 0; pi < lv.processed_points; ++pi)
        for (size_t gi = lv.processed_gens; gi < ng; ++gi) todo.emplace_back(pi, gi);
      lv.processed_points = np;
      lv.processed_gens = ng;
      for (auto [pi, gi] : todo) {
        int p = lv.orbit[pi];
        const Permutation& s = lv.gens[gi];
        const Permutation& up = *lv.transversal[p];
        const Permutation& uq = *lv.transversal[s[p]];
        Permutation r = up.then(s).then(uq.inverse());
        if (r.is_identity()) continue;
        if (!sift_from(r, level + 1)) insert(r, find_insert_level(r, level + 1));
      }
    }
  }

  bool sift_from(Permutation& p, size_t from) const {
    for (size_t i = from; i < levels_.size(); ++i) {
      if (p.is_identity()) return true;
      const Level& lv = levels_[i];
      int image = p[lv.base];
      if (image == lv.base) continue;
      if (!lv.transversal[image]) return false;
      p = p.then(lv.transversal[image]->inverse());
    }
    return p.is_identity();
  }

  size_t find_insert_level(const Permutation& residue, size_t from) const {
    size_t lv = from;
    while (lv < levels_.size() && residue[levels_[lv].base] == levels_[lv].base)
      ++lv;
    return lv;
  }

  int degree_;
  std::vector<Level> levels_;
};

// ---------------------------------------------------------------------------

PermGroup::PermGroup(int degree, std::vector<Permutation> generators)
    : degree_(degree) {
  for (auto& g : generators) {
    if (g.degree() != degree)
      fail(ErrorCode::InvalidArgument, "generator degree mismatch");
    if (g.is_identity()) continue;
    if (std::find(gens_.begin(), gens_.end(), g) == gens_.end())
      gens_.push_back(std::move(g));
  }
}

void PermGroup::ensure_chain() const {
  if (!chain_) chain_ = std::make_shared<StabilizerChain>(degree_, gens_);
}

BigInt PermGroup::order() const {
  if (degree_ == 0) return 1;
  ensure_chain();
  return chain_->order();
}

bool PermGroup::contains(const Permutation& p) const {
  if (p.degree() != degree_)
    fail(ErrorCode::InvalidArgument, "contains: degree mismatch");
  if (p.is_identity()) return true;
  ensure_chain();
  return chain_->contains(p);
}

std::vector<std::vector<int>> PermGroup::orbits() const {
  std::vector<int> owner(degree_, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < degree_; ++s) {
    if (owner[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    std::vector<int> orbit{s};
    owner[s] = id;
    for (size_t head = 0; head < orbit.size(); ++head) {
      for (const auto& g : gens_) {
        int q = g[orbit[head]];
        if (owner[q] < 0) {
          owner[q] = id;
          orbit.push_back(q);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    out.push_back(std::move(orbit));
  }
  return out;
}

bool PermGroup::is_transitive() const {
  return degree_ > 0 && orbits().size() == 1;
}

bool PermGroup::all_even() const {
  for (const auto& g : gens_)
    if (!g.is_even()) return false;
  return true;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  // returns the representative that was absorbed (or -1 if already merged)
  int unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return -1;
    if (a > b) std::swap(a, b);  // keep smallest point as representative
    parent[b] = a;
    return b;
  }
};

BlockSystem partition_from_uf(UnionFind& uf, int d) {
  std::map<int, std::vector<int>> classes;
  for (int i = 0; i < d; ++i) classes[uf.find(i)].push_back(i);
  BlockSystem bs;
  for (auto& [rep, cls] : classes) bs.blocks.push_back(std::move(cls));
  return bs;
}

}  // namespace

BlockSystem PermGroup::minimal_block_system(int a, int b) const {
  if (!is_transitive())
    fail(ErrorCode::NotTransitive, "minimal_block requires a transitive group");
  if (a == b || a < 0 || b < 0 || a >= degree_ || b >= degree_)
    fail(ErrorCode::InvalidArgument, "minimal_block: bad pair");
  // Atkinson's union-find algorithm
  UnionFind uf(degree_);
  uf.unite(a, b);
  std::vector<int> queue{b};
  while (!queue.empty()) {
    int gamma = queue.back();
    queue.pop_back();
    int delta = uf.find(gamma);
    for (const auto& g : gens_) {
      int u = g[gamma];
      int v = g[delta];
      int absorbed = uf.unite(u, v);
      if (absorbed >= 0) queue.push_back(absorbed);
    }
  }
  return partition_from_uf(uf, degree_);
}

std::vector<int> PermGroup::minimal_block(int a, int b) const {
  BlockSystem bs = minimal_block_system(a, b);
  for (const auto& blk : bs.blocks)
    if (std::find(blk.begin(), blk.end(), a) != blk.end()) return blk;
  return {};
}

namespace {

BlockSystem join(const BlockSystem& p, const BlockSystem& q, int d) {
  UnionFind uf(d);
  for (const auto& blk : p.blocks)
    for (size_t i = 1; i < blk.size(); ++i) uf.unite(blk[0], blk[i]);
  for (const auto& blk : q.blocks)
    for (size_t i = 1; i < blk.size(); ++i) uf.unite(blk[0], blk[i]);
  return partition_from_uf(uf, d);
}

bool refines_pair(const BlockSystem& fine, const BlockSystem& coarse) {
  if (fine.block_size() >= coarse.block_size()) return false;
  // every fine block must lie inside one coarse block
  std::vector<int> owner;
  int d = 0;
  for (const auto& blk : coarse.blocks) d += static_cast<int>(blk.size());
  owner.assign(d, -1);
  for (size_t j = 0; j < coarse.blocks.size(); ++j)
    for (int p : coarse.blocks[j]) owner[p] = static_cast<int>(j);
  for (const auto& blk : fine.blocks)
    for (int p : blk)
      if (owner[p] != owner[blk[0]]) return false;
  return true;
}

}  // namespace

std::vector<BlockSystem> PermGroup::all_block_systems() const {
  if (degree_ > 64)
    fail(ErrorCode::DegreeTooLarge, "block lattice restricted to degree <= 64");
  if (!is_transitive())
    fail(ErrorCode::NotTransitive, "block systems require a transitive group");
  std::vector<BlockSystem> systems;
  auto is_trivial = [&](const BlockSystem& bs) {
    return bs.num_blocks() <= 1 || bs.num_blocks() == degree_;
  };
  auto add = [&](const BlockSystem& bs) {
    if (is_trivial(bs)) return false;
    if (std::find(systems.begin(), systems.end(), bs) != systems.end()) return false;
    systems.push_back(bs);
    return true;
  };
  for (int b = 1; b < degree_; ++b) add(minimal_block_system(0, b));
  // close under joins; every block system arises as a join of minimal ones
  bool grew = true;
  while (grew) {
    grew = false;
    size_t count = systems.size();
    for (size_t i = 0; i < count && !grew; ++i)
      for (size_t j = i + 1; j < count && !grew; ++j)
        grew = add(join(systems[i], systems[j], degree_));
  }
  std::sort(systems.begin(), systems.end(), [](const BlockSystem& a, const BlockSystem& b) {
    if (a.block_size() != b.block_size()) return a.block_size() < b.block_size();
    return a.blocks < b.blocks;
  });
  return systems;
}

bool PermGroup::is_primitive() const {
  if (!is_transitive()) return false;
  for (int b = 1; b < degree_; ++b) {
    auto blk = minimal_block(0, b);
    if (static_cast<int>(blk.size()) != degree_) return false;
  }
  return true;
}

std::vector<Permutation> PermGroup::centralizer_elements() const {
  if (!is_transitive())
    fail(ErrorCode::NotTransitive, "centralizer algorithm requires transitivity");
  // Schreier tree rooted at 0
  std::vector<int> parent(degree_, -1), via(degree_, -1);
  std::vector<int> bfs{0};
  std::vector<bool> seen(degree_, false);
  seen[0] = true;
  for (size_t head = 0; head < bfs.size(); ++head) {
    int p = bfs[head];
    for (size_t gi = 0; gi < gens_.size(); ++gi) {
      int q = gens_[gi][p];
      if (!seen[q]) {
        seen[q] = true;
        parent[q] = p;
        via[q] = static_cast<int>(gi);
        bfs.push_back(q);
      }
    }
  }

  std::vector<Permutation> out;
  for (int image_of_0 = 0; image_of_0 < degree_; ++image_of_0) {
    std::vector<int> c(degree_, -1);
    c[0] = image_of_0;
    // propagate c(g(u)) = g(c(u)) along the tree
    for (size_t head = 1; head < bfs.size(); ++head) {
      int q = bfs[head];
      c[q] = gens_[via[q]][c[parent[q]]];
    }
    // verify on every generator edge and check bijectivity
    bool ok = true;
    std::vector<bool> hit(degree_, false);
    for (int u = 0; u < degree_ && ok; ++u) {
      if (c[u] < 0 || hit[c[u]]) ok = false;
      if (ok) hit[c[u]] = true;
    }
    for (int u = 0; u < degree_ && ok; ++u)
      for (const auto& g : gens_) {
        if (c[g[u]] != g[c[u]]) {
          ok = false;
          break;
        }
      }
    if (ok) out.push_back(Permutation::from_images(c));
  }
  return out;
}

PermGroup PermGroup::centralizer_in_sym() const {
  auto elems = centralizer_elements();
  std::vector<Permutation> gens;
  for (auto& e : elems)
    if (!e.is_identity()) gens.push_back(std::move(e));
  return PermGroup(degree_, std::move(gens));
}

PermGroup PermGroup::action_on_blocks(const BlockSystem& B) const {
  const int k = B.num_blocks();
  std::vector<int> owner(degree_, -1);
  for (int j = 0; j < k; ++j)
    for (int p : B.blocks[j]) owner[p] = j;
  std::vector<Permutation> gens;
  for (const auto& g : gens_) {
    std::vector<int> img(k, -1);
    for (int j = 0; j < k; ++j) {
      int target = owner[g[B.blocks[j][0]]];
      // well-definedness check: all of the block must land in one block
      for (int p : B.blocks[j])
        if (owner[g[p]] != target)
          fail(ErrorCode::InvalidArgument, "partition is not G-invariant");
      img[j] = target;
    }
    gens.push_back(Permutation::from_images(std::move(img)));
  }
  return PermGroup(k, std::move(gens));
}

PermGroup PermGroup::block_stabilizer_action(const BlockSystem& B,
                                             int block_index) const {
  if (block_index < 0 || block_index >= B.num_blocks())
    fail(ErrorCode::InvalidArgument, "block index out of range");
  const int k = B.num_blocks();
  std::vector<int> owner(degree_, -1);
  for (int j = 0; j < k; ++j)
    for (int p : B.blocks[j]) owner[p] = j;

  // orbit of the chosen block under G with a transversal of full-degree
  // permutations, then Schreier generators of the block stabilizer
  std::vector<std::optional<Permutation>> trans(k);
  std::vector<int> orbit{block_index};
  trans[block_index] = Permutation(degree_);
  for (size_t head = 0; head < orbit.size(); ++head) {
    for (const auto& g : gens_) {
      int to = owner[g[B.blocks[orbit[head]][0]]];
      if (!trans[to]) {
        trans[to] = trans[orbit[head]]->then(g);
        orbit.push_back(to);
      }
    }
  }

  const auto& block = B.blocks[block_index];
  std::vector<int> pos(degree_, -1);
  for (size_t i = 0; i < block.size(); ++i) pos[block[i]] = static_cast<int>(i);

  std::vector<Permutation> restricted;
  for (int b : orbit) {
    for (const auto& g : gens_) {
      int to = owner[g[B.blocks[b][0]]];
      Permutation s = trans[b]->then(g).then(trans[to]->inverse());
      // s stabilizes the chosen block setwise; restrict it
      std::vector<int> img(block.size());
      for (size_t i = 0; i < block.size(); ++i) {
        int q = s[block[i]];
        if (pos[q] < 0)
          fail(ErrorCode::InvalidArgument, "Schreier generator does not stabilize block");
        img[i] = pos[q];
      }
      restricted.push_back(Permutation::from_images(std::move(img)));
    }
  }
  return PermGroup(static_cast<int>(block.size()), std::move(restricted));
}

BigInt factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

namespace {

// element-order multiset of C_{d1} x ... x C_{dk}
std::multiset<long> product_order_multiset(const std::vector<int>& factors) {
  std::multiset<long> orders;
  std::vector<int> idx(factors.size(), 0);
  for (;;) {
    long o = 1;
    for (size_t i = 0; i < factors.size(); ++i) {
      int d = factors[i];
      o = std::lcm(o, static_cast<long>(d / std::gcd(d, idx[i])));
    }
    orders.insert(o);
    size_t i = 0;
    while (i < factors.size()) {
      if (++idx[i] < factors[i]) break;
      idx[i] = 0;
      ++i;
    }
    if (i == factors.size()) break;
  }
  return orders;
}

// ascending chains d1 | d2 | ... | dk with product n, each di >= 2
void invariant_chains(int remaining, int min_factor, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (remaining == 1) {
    out.push_back(cur);
    return;
  }
  for (int d = std::max(2, min_factor); d <= remaining; ++d) {
    if (remaining % d != 0) continue;
    if (!cur.empty() && d % cur.back() != 0) continue;
    cur.push_back(d);
    invariant_chains(remaining / d, d, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<int> abelian_invariants(const std::vector<Permutation>& elements) {
  const size_t n = elements.size();
  if (n <= 1) return {};
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (!(elements[i].then(elements[j]) == elements[j].then(elements[i])))
        fail(ErrorCode::InvalidArgument, "abelian_invariants: group is not abelian");
  std::multiset<long> orders;
  for (const auto& e : elements) orders.insert(e.order());

  // The element-order multiset determines a finite abelian group, so match
  // it against every invariant-factor decomposition of |G|.
  std::vector<std::vector<int>> chains;
  std::vector<int> cur;
  invariant_chains(static_cast<int>(n), 2, cur, chains);
  for (const auto& chain : chains)
    if (product_order_multiset(chain) == orders) return chain;
  fail(ErrorCode::InvalidArgument, "abelian_invariants: no decomposition matched");
}

GroupReport structure_report(const PermGroup& g) {
  GroupReport r;
  r.degree = g.degree();
  r.order = g.order();
  r.transitive = g.is_transitive();
  r.all_even = g.all_even();
  if (r.transitive && r.degree <= 64) {
    r.block_systems = g.all_block_systems();
    r.primitive = r.block_systems.empty();
    // Hasse edges of the refinement lattice
    const auto& sys = r.block_systems;
    for (size_t i = 0; i < sys.size(); ++i)
      for (size_t j = 0; j < sys.size(); ++j) {
        if (i == j || !refines_pair(sys[i], sys[j])) continue;
        bool covered = false;
        for (size_t k = 0; k < sys.size() && !covered; ++k)
          if (k != i && k != j && refines_pair(sys[i], sys[k]) &&
              refines_pair(sys[k], sys[j]))
            covered = true;
        if (!covered) r.lattice_edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
      }
    r.deck_elements = g.centralizer_elements();
    r.deck_order = static_cast<int>(r.deck_elements.size());
    r.deck_abelian = true;
    for (size_t i = 0; i < r.deck_elements.size() && r.deck_abelian; ++i)
      for (size_t j = i + 1; j < r.deck_elements.size(); ++j)
        if (!(r.deck_elements[i].then(r.deck_elements[j]) ==
              r.deck_elements[j].then(r.deck_elements[i]))) {
          r.deck_abelian = false;
          break;
        }
    if (r.deck_abelian) r.deck_abelian_invariants = abelian_invariants(r.deck_elements);
  }
  BigInt full = factorial(r.degree);
  r.is_full_symmetric = (r.order == full);
  r.is_alternating = (r.degree >= 2 && r.order * 2 == full && r.all_even);
  return r;
}

}  // namespace galmono

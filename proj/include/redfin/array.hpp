#pragma once

// Symbolic array: an immutable base (array variable or constant array) plus
// an ordered store chain. Stores share structure through a persistent linked
// list, so copies are O(1) and two arrays diverging from a common state keep
// a common chain ancestor, which the merge below exploits.
//
// Reads materialize as nested Ite over the chain (newest store first) on top
// of a base select; constant folding collapses the chain when the read index
// and store indices are concrete, so fully concrete reads resolve exactly
// like a concrete memory would (last write wins, default otherwise).

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <vector>

#include "redfin/expr.hpp"

namespace redfin {

class SymArray {
 public:
  SymArray() = default;

  // base must be an array-sorted Var or ConstArray node.
  explicit SymArray(SymValue base) : base_(base) {
    if (base.sort() != Sort::Array) throw SortError("SymArray base must have array sort");
  }

  static SymArray constant(Context& ctx, SymValue default_value) {
    return SymArray(ctx.const_array(default_value));
  }

  SymValue base() const { return base_; }
  size_t store_depth() const { return chain_ ? chain_->depth : 0; }

  // Identical representation: same base and same chain node.
  friend bool operator==(const SymArray& a, const SymArray& b) {
    return a.base_ == b.base_ && a.chain_ == b.chain_;
  }

  SymArray store(Context& ctx, SymValue index, SymValue value) const {
    require_index(index);
    if (value.sort() != Sort::Bv64) throw SortError("array store value must be bv64");
    (void)ctx;
    SymArray out = *this;
    out.chain_ = std::make_shared<const StoreNode>(StoreNode{chain_, index, value, store_depth() + 1});
    return out;
  }

  SymValue read(Context& ctx, SymValue index) const {
    require_index(index);
    SymValue result = base_select(ctx, index);
    // Oldest-to-newest wrapping leaves the newest store's test outermost,
    // so the newest matching store wins, exactly like store-chain semantics.
    for (const StoreNode* s : chain_to_vector(chain_.get()))
      result = ctx.ite(ctx.eq(index, s->index), s->value, result);
    return result;
  }

  // Componentwise conditional merge: reading the result at any index equals
  // Ite(cond, read(then_arr), read(else_arr)). Built as the common chain
  // prefix plus guarded stores for each branch's divergent suffix.
  static SymArray merge(Context& ctx, SymValue cond, const SymArray& then_arr, const SymArray& else_arr) {
    if (cond.sort() != Sort::Bool) throw SortError("array merge condition must be bool");
    if (then_arr.base_ != else_arr.base_)
      throw SortError("array merge requires a common base");
    if (auto c = ctx.known_bool(cond)) return *c ? then_arr : else_arr;
    if (then_arr.chain_ == else_arr.chain_) return then_arr;

    const StoreNode* a = then_arr.chain_.get();
    const StoreNode* b = else_arr.chain_.get();
    std::shared_ptr<const StoreNode> ancestor = common_ancestor(then_arr.chain_, else_arr.chain_);

    SymArray merged(then_arr.base_);
    merged.chain_ = ancestor;
    const size_t anc_depth = ancestor ? ancestor->depth : 0;
    for (const StoreNode* s : suffix_after(a, anc_depth))
      merged = merged.store(ctx, s->index, ctx.ite(cond, s->value, else_arr.read(ctx, s->index)));
    for (const StoreNode* s : suffix_after(b, anc_depth))
      merged = merged.store(ctx, s->index, ctx.ite(cond, then_arr.read(ctx, s->index), s->value));
    return merged;
  }

 private:
  struct StoreNode {
    std::shared_ptr<const StoreNode> prev;
    SymValue index;
    SymValue value;
    size_t depth;
  };

  static void require_index(SymValue index) {
    if (index.sort() != Sort::Bv8) throw SortError("array index must be bv8");
  }

  SymValue base_select(Context& ctx, SymValue index) const {
    return ctx.select(base_, index);  // folds to the default for ConstArray bases
  }

  static std::vector<const StoreNode*> chain_to_vector(const StoreNode* chain) {
    std::vector<const StoreNode*> out;
    for (const StoreNode* s = chain; s; s = s->prev.get()) out.push_back(s);
    std::reverse(out.begin(), out.end());  // oldest first
    return out;
  }

  // Oldest-first list of stores strictly deeper than anc_depth.
  static std::vector<const StoreNode*> suffix_after(const StoreNode* chain, size_t anc_depth) {
    std::vector<const StoreNode*> out;
    for (const StoreNode* s = chain; s && s->depth > anc_depth; s = s->prev.get()) out.push_back(s);
    std::reverse(out.begin(), out.end());
    return out;
  }

  static std::shared_ptr<const StoreNode> common_ancestor(std::shared_ptr<const StoreNode> a,
                                                          std::shared_ptr<const StoreNode> b) {
    while (a && b && a != b) {
      const size_t da = a->depth, db = b->depth;
      if (da >= db) a = a->prev;
      if (db >= da) b = b->prev;
    }
    return (a == b) ? a : nullptr;
  }

  SymValue base_;
  std::shared_ptr<const StoreNode> chain_;
};

}  // namespace redfin

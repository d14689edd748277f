#pragma once

#include "ittt/autodiff.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ittt {

/// Value-only copy of a ParamStore, used for resets and anchors. Restoring is
/// bitwise exact and validates names/shapes/order. Optimizer state is never
/// part of a snapshot.
struct ParamSnapshot {
    std::vector<std::pair<std::string, Tensor>> entries;

    bool bitwise_equal(const ParamSnapshot& o) const;
};

/// Named, ordered collection of trainable leaves. Iteration order is the
/// insertion order and is stable across snapshot/restore; everything that
/// serializes parameters relies on that.
class ParamStore {
public:
    NodePtr add(const std::string& name, Tensor init);
    const NodePtr& at(const std::string& name) const;
    bool contains(const std::string& name) const;

    const std::vector<std::pair<std::string, NodePtr>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t value_count() const;  // total number of scalars

    void zero_grads();

    ParamSnapshot snapshot() const;
    void restore(const ParamSnapshot& snap);
    bool bitwise_equal(const ParamSnapshot& snap) const;

private:
    std::vector<std::pair<std::string, NodePtr>> entries_;
};

}  // namespace ittt

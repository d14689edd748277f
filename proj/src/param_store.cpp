#include "ittt/param_store.hpp"

#include "ittt/common.hpp"

namespace ittt {

bool ParamSnapshot::bitwise_equal(const ParamSnapshot& o) const {
    if (entries.size() != o.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].first != o.entries[i].first) return false;
        if (!entries[i].second.bitwise_equal(o.entries[i].second)) return false;
    }
    return true;
}

NodePtr ParamStore::add(const std::string& name, Tensor init) {
    if (contains(name)) throw ContractError("parameter '" + name + "' already exists");
    NodePtr n = leaf(std::move(init));
    entries_.emplace_back(name, n);
    return n;
}

const NodePtr& ParamStore::at(const std::string& name) const {
    for (const auto& [n, node] : entries_) {
        if (n == name) return node;
    }
    throw ContractError("unknown parameter '" + name + "'");
}

bool ParamStore::contains(const std::string& name) const {
    for (const auto& [n, node] : entries_) {
        if (n == name) return true;
    }
    return false;
}

std::size_t ParamStore::value_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_) n += e.second->value.numel();
    return n;
}

void ParamStore::zero_grads() {
    for (auto& [name, node] : entries_) {
        node->ensure_grad();
        for (double& g : node->grad.values()) g = 0.0;
    }
}

ParamSnapshot ParamStore::snapshot() const {
    ParamSnapshot snap;
    snap.entries.reserve(entries_.size());
    for (const auto& [name, node] : entries_) snap.entries.emplace_back(name, node->value);
    return snap;
}

void ParamStore::restore(const ParamSnapshot& snap) {
    if (snap.entries.size() != entries_.size()) {
        throw ContractError("restore: snapshot has " + std::to_string(snap.entries.size()) +
                            " parameters, store has " + std::to_string(entries_.size()));
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& [sname, svalue] = snap.entries[i];
        auto& [name, node] = entries_[i];
        if (sname != name) {
            throw ContractError("restore: name mismatch at index " + std::to_string(i) + ": '" +
                                sname + "' vs '" + name + "'");
        }
        if (!svalue.same_shape(node->value)) {
            throw ContractError("restore: shape mismatch for '" + name + "': " + svalue.shape_str() +
                                " vs " + node->value.shape_str());
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i].second->value = snap.entries[i].second;
}

bool ParamStore::bitwise_equal(const ParamSnapshot& snap) const {
    if (snap.entries.size() != entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (snap.entries[i].first != entries_[i].first) return false;
        if (!snap.entries[i].second.bitwise_equal(entries_[i].second->value)) return false;
    }
    return true;
}

}  // namespace ittt

#pragma once

#include "ittt/tensor.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace ittt {

/// One vertex of a define-by-run computation graph. A node owns its forward
/// value; its backward rule scatters the node's accumulated output-gradient
/// into the parents' gradients. Graphs are rebuilt every forward pass and
/// freed when the root goes out of scope; parameter leaves outlive graphs
/// (see ParamStore) and keep accumulating until the optimizer zeroes them.
struct Node {
    Tensor value;
    Tensor grad;  // allocated lazily on first accumulation; shape == value.shape
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;

    bool has_grad() const { return grad.numel() > 0; }
    void ensure_grad();                       // allocate zero grad if absent
    void accumulate_grad(const Tensor& g);    // grad += g
    double scalar() const;                    // value as scalar; contract error if numel != 1
};

using NodePtr = std::shared_ptr<Node>;

/// Wrap a tensor as a constant leaf (no gradient flows into it).
NodePtr constant(Tensor value);
/// Wrap a tensor as a differentiable leaf (used by ParamStore).
NodePtr leaf(Tensor value);
/// Detach: constant node holding a copy of x's value.
NodePtr detach(const NodePtr& x);

// ---- differentiable ops -------------------------------------------------
// All ops validate shapes eagerly and throw DimensionError naming the
// offending shapes. No broadcasting beyond the explicit *_rowvec/"scalar"
// forms below; backward rules stay auditable that way.

NodePtr matmul(const NodePtr& a, const NodePtr& b);         // [m,k]x[k,n] -> [m,n]
NodePtr add(const NodePtr& a, const NodePtr& b);            // same shape
NodePtr sub(const NodePtr& a, const NodePtr& b);            // same shape
NodePtr add_rowvec(const NodePtr& a, const NodePtr& v);     // [m,n] + [n] per row
NodePtr sub_rowvec(const NodePtr& a, const NodePtr& v);     // [m,n] - [n] per row
NodePtr scale(const NodePtr& a, double c);
NodePtr square(const NodePtr& a);
NodePtr relu(const NodePtr& a);
NodePtr elu(const NodePtr& a, double alpha = 1.0);
NodePtr concat(const NodePtr& a, const NodePtr& b, int axis);  // 2-D, axis 0 or 1
NodePtr sum(const NodePtr& a);                               // scalar
NodePtr col_mean(const NodePtr& a);                          // [m,n] -> [n]
NodePtr softmax_rows(const NodePtr& a);                      // row-wise softmax

// scalar losses
NodePtr mse(const NodePtr& a, const NodePtr& b);             // mean((a-b)^2)
NodePtr l1(const NodePtr& a, const NodePtr& b);              // mean(|a-b|)
NodePtr softmax_ce(const NodePtr& logits, const NodePtr& one_hot);  // mean row CE

/// Reverse-mode sweep from a scalar loss. Seeds d(loss)/d(loss) = 1 and runs
/// every reachable backward rule once in reverse topological order. Gradients
/// accumulate; they are not cleared here (the optimizer's step clears them).
void backward(const NodePtr& loss);

}  // namespace ittt

#include "ittt/autodiff.hpp"

#include "ittt/common.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

namespace ittt {

void Node::ensure_grad() {
    if (!has_grad()) grad = Tensor(value.shape());
}

void Node::accumulate_grad(const Tensor& g) {
    ensure_grad();
    add_inplace(grad, g);
}

double Node::scalar() const {
    if (value.numel() != 1) {
        throw ContractError("expected scalar node, got shape " + value.shape_str());
    }
    return value(0);
}

NodePtr constant(Tensor value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    return n;
}

NodePtr leaf(Tensor value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->ensure_grad();
    return n;
}

NodePtr detach(const NodePtr& x) { return constant(x->value); }

namespace {

NodePtr make_op(Tensor value, std::vector<NodePtr> parents, std::function<void(Node&)> rule) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (const auto& p : parents) {
        if (p->requires_grad) {
            n->requires_grad = true;
            break;
        }
    }
    if (n->requires_grad) {
        n->parents = std::move(parents);
        n->backward_fn = std::move(rule);
    }
    return n;
}

void check_same_shape(const NodePtr& a, const NodePtr& b, const char* who) {
    if (!a->value.same_shape(b->value)) {
        throw DimensionError(std::string(who) + ": shape mismatch " + a->value.shape_str() +
                             " vs " + b->value.shape_str());
    }
}

void check_rowvec(const NodePtr& a, const NodePtr& v, const char* who) {
    if (a->value.ndim() != 2 || v->value.ndim() != 1 || v->value.numel() != a->value.cols()) {
        throw DimensionError(std::string(who) + ": expected [m,n] and [n], got " +
                             a->value.shape_str() + " and " + v->value.shape_str());
    }
}

}  // namespace

NodePtr matmul(const NodePtr& a, const NodePtr& b) {
    Tensor out({a->value.rows(), b->value.cols()});
    matmul_nn_acc(a->value, b->value, out);  // validates shapes
    return make_op(std::move(out), {a, b}, [a, b](Node& n) {
        // dL/dA = g B^T, dL/dB = A^T g
        if (a->requires_grad) {
            a->ensure_grad();
            matmul_nt_acc(n.grad, b->value, a->grad);
        }
        if (b->requires_grad) {
            b->ensure_grad();
            matmul_tn_acc(a->value, n.grad, b->grad);
        }
    });
}

NodePtr add(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "add");
    Tensor out = a->value;
    add_inplace(out, b->value);
    return make_op(std::move(out), {a, b}, [a, b](Node& n) {
        if (a->requires_grad) a->accumulate_grad(n.grad);
        if (b->requires_grad) b->accumulate_grad(n.grad);
    });
}

NodePtr sub(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "sub");
    Tensor out = a->value;
    axpy_inplace(out, -1.0, b->value);
    return make_op(std::move(out), {a, b}, [a, b](Node& n) {
        if (a->requires_grad) a->accumulate_grad(n.grad);
        if (b->requires_grad) {
            b->ensure_grad();
            axpy_inplace(b->grad, -1.0, n.grad);
        }
    });
}

NodePtr add_rowvec(const NodePtr& a, const NodePtr& v) {
    check_rowvec(a, v, "add_rowvec");
    const std::size_t m = a->value.rows(), c = a->value.cols();
    Tensor out = a->value;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < c; ++j) out(i, j) += v->value(j);
    return make_op(std::move(out), {a, v}, [a, v, m, c](Node& n) {
        if (a->requires_grad) a->accumulate_grad(n.grad);
        if (v->requires_grad) {
            v->ensure_grad();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < c; ++j) v->grad(j) += n.grad(i, j);
        }
    });
}

NodePtr sub_rowvec(const NodePtr& a, const NodePtr& v) {
    check_rowvec(a, v, "sub_rowvec");
    const std::size_t m = a->value.rows(), c = a->value.cols();
    Tensor out = a->value;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < c; ++j) out(i, j) -= v->value(j);
    return make_op(std::move(out), {a, v}, [a, v, m, c](Node& n) {
        if (a->requires_grad) a->accumulate_grad(n.grad);
        if (v->requires_grad) {
            v->ensure_grad();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < c; ++j) v->grad(j) -= n.grad(i, j);
        }
    });
}

NodePtr scale(const NodePtr& a, double c) {
    Tensor out = a->value;
    for (double& x : out.values()) x *= c;
    return make_op(std::move(out), {a}, [a, c](Node& n) {
        if (a->requires_grad) {
            a->ensure_grad();
            axpy_inplace(a->grad, c, n.grad);
        }
    });
}

NodePtr square(const NodePtr& a) {
    Tensor out = a->value;
    for (double& x : out.values()) x *= x;
    return make_op(std::move(out), {a}, [a](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < n.grad.numel(); ++i) a->grad(i) += 2.0 * a->value(i) * n.grad(i);
    });
}

NodePtr relu(const NodePtr& a) {
    Tensor out = a->value;
    for (double& x : out.values())
        if (x < 0.0) x = 0.0;
    return make_op(std::move(out), {a}, [a](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < n.grad.numel(); ++i)
            if (a->value(i) > 0.0) a->grad(i) += n.grad(i);
    });
}

NodePtr elu(const NodePtr& a, double alpha) {
    Tensor out = a->value;
    for (double& x : out.values())
        if (x <= 0.0) x = alpha * std::expm1(x);
    return make_op(std::move(out), {a}, [a, alpha](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        for (std::size_t i = 0; i < n.grad.numel(); ++i) {
            const double x = a->value(i);
            const double d = x > 0.0 ? 1.0 : alpha * std::exp(x);
            a->grad(i) += d * n.grad(i);
        }
    });
}

NodePtr concat(const NodePtr& a, const NodePtr& b, int axis) {
    const Tensor& av = a->value;
    const Tensor& bv = b->value;
    if (av.ndim() != 2 || bv.ndim() != 2) {
        throw DimensionError("concat: expected 2-D tensors, got " + av.shape_str() + " and " + bv.shape_str());
    }
    if (axis != 0 && axis != 1) throw ContractError("concat: axis must be 0 or 1");
    const std::size_t off_axis_a = axis == 0 ? av.cols() : av.rows();
    const std::size_t off_axis_b = axis == 0 ? bv.cols() : bv.rows();
    if (off_axis_a != off_axis_b) {
        throw DimensionError("concat: off-axis extents disagree, " + av.shape_str() + " vs " + bv.shape_str());
    }
    Tensor out;
    if (axis == 0) {
        out = Tensor({av.rows() + bv.rows(), av.cols()});
        std::memcpy(out.data(), av.data(), av.numel() * sizeof(double));
        std::memcpy(out.data() + av.numel(), bv.data(), bv.numel() * sizeof(double));
    } else {
        out = Tensor({av.rows(), av.cols() + bv.cols()});
        for (std::size_t i = 0; i < av.rows(); ++i) {
            std::memcpy(out.data() + i * out.cols(), av.data() + i * av.cols(), av.cols() * sizeof(double));
            std::memcpy(out.data() + i * out.cols() + av.cols(), bv.data() + i * bv.cols(),
                        bv.cols() * sizeof(double));
        }
    }
    const std::size_t ar = av.rows(), ac = av.cols(), bc = bv.cols();
    return make_op(std::move(out), {a, b}, [a, b, axis, ar, ac, bc](Node& n) {
        if (axis == 0) {
            if (a->requires_grad) {
                a->ensure_grad();
                for (std::size_t i = 0; i < a->grad.numel(); ++i) a->grad(i) += n.grad(i);
            }
            if (b->requires_grad) {
                b->ensure_grad();
                const std::size_t off = a->value.numel();
                for (std::size_t i = 0; i < b->grad.numel(); ++i) b->grad(i) += n.grad(off + i);
            }
        } else {
            const std::size_t oc = ac + bc;
            if (a->requires_grad) {
                a->ensure_grad();
                for (std::size_t i = 0; i < ar; ++i)
                    for (std::size_t j = 0; j < ac; ++j) a->grad(i, j) += n.grad(i * oc + j);
            }
            if (b->requires_grad) {
                b->ensure_grad();
                for (std::size_t i = 0; i < ar; ++i)
                    for (std::size_t j = 0; j < bc; ++j) b->grad(i, j) += n.grad(i * oc + ac + j);
            }
        }
    });
}

NodePtr sum(const NodePtr& a) {
    double s = 0.0;
    for (double v : a->value.values()) s += v;
    return make_op(Tensor::scalar(s), {a}, [a](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        const double g = n.grad(0);
        for (std::size_t i = 0; i < a->grad.numel(); ++i) a->grad(i) += g;
    });
}

NodePtr col_mean(const NodePtr& a) {
    const Tensor& av = a->value;
    if (av.ndim() != 2) throw DimensionError("col_mean: expected 2-D tensor, got " + av.shape_str());
    const std::size_t m = av.rows(), c = av.cols();
    Tensor out({c});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < c; ++j) out(j) += av(i, j);
    for (std::size_t j = 0; j < c; ++j) out(j) /= static_cast<double>(m);
    return make_op(std::move(out), {a}, [a, m, c](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        const double inv = 1.0 / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < c; ++j) a->grad(i, j) += inv * n.grad(j);
    });
}

namespace {

// Row-wise softmax of a [m,n] tensor, numerically shifted by the row max.
Tensor softmax_value(const Tensor& logits) {
    const std::size_t m = logits.rows(), c = logits.cols();
    Tensor p({m, c});
    for (std::size_t i = 0; i < m; ++i) {
        double mx = logits(i, 0);
        for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            const double e = std::exp(logits(i, j) - mx);
            p(i, j) = e;
            z += e;
        }
        for (std::size_t j = 0; j < c; ++j) p(i, j) /= z;
    }
    return p;
}

}  // namespace

NodePtr softmax_rows(const NodePtr& a) {
    if (a->value.ndim() != 2) {
        throw DimensionError("softmax_rows: expected 2-D tensor, got " + a->value.shape_str());
    }
    Tensor p = softmax_value(a->value);
    auto out = make_op(std::move(p), {a}, [a](Node& n) {
        if (!a->requires_grad) return;
        a->ensure_grad();
        const std::size_t m = n.value.rows(), c = n.value.cols();
        // per row: da = p .* (g - <g, p>)
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < c; ++j) dot += n.grad(i, j) * n.value(i, j);
            for (std::size_t j = 0; j < c; ++j) a->grad(i, j) += n.value(i, j) * (n.grad(i, j) - dot);
        }
    });
    return out;
}

NodePtr mse(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "mse");
    const std::size_t n_el = a->value.numel();
    double s = 0.0;
    for (std::size_t i = 0; i < n_el; ++i) {
        const double d = a->value(i) - b->value(i);
        s += d * d;
    }
    s /= static_cast<double>(n_el);
    return make_op(Tensor::scalar(s), {a, b}, [a, b, n_el](Node& n) {
        const double g = 2.0 * n.grad(0) / static_cast<double>(n_el);
        if (a->requires_grad) {
            a->ensure_grad();
            for (std::size_t i = 0; i < n_el; ++i) a->grad(i) += g * (a->value(i) - b->value(i));
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (std::size_t i = 0; i < n_el; ++i) b->grad(i) -= g * (a->value(i) - b->value(i));
        }
    });
}

NodePtr l1(const NodePtr& a, const NodePtr& b) {
    check_same_shape(a, b, "l1");
    const std::size_t n_el = a->value.numel();
    double s = 0.0;
    for (std::size_t i = 0; i < n_el; ++i) s += std::abs(a->value(i) - b->value(i));
    s /= static_cast<double>(n_el);
    return make_op(Tensor::scalar(s), {a, b}, [a, b, n_el](Node& n) {
        const double g = n.grad(0) / static_cast<double>(n_el);
        // subgradient: sign(d), 0 at d == 0
        if (a->requires_grad) {
            a->ensure_grad();
            for (std::size_t i = 0; i < n_el; ++i) {
                const double d = a->value(i) - b->value(i);
                if (d != 0.0) a->grad(i) += d > 0.0 ? g : -g;
            }
        }
        if (b->requires_grad) {
            b->ensure_grad();
            for (std::size_t i = 0; i < n_el; ++i) {
                const double d = a->value(i) - b->value(i);
                if (d != 0.0) b->grad(i) -= d > 0.0 ? g : -g;
            }
        }
    });
}

NodePtr softmax_ce(const NodePtr& logits, const NodePtr& one_hot) {
    check_same_shape(logits, one_hot, "softmax_ce");
    if (one_hot->requires_grad) {
        throw ContractError("softmax_ce: targets must not require gradients");
    }
    const std::size_t m = logits->value.rows(), c = logits->value.cols();
    Tensor p = softmax_value(logits->value);
    double loss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            const double t = one_hot->value(i, j);
            if (t != 0.0) loss -= t * std::log(std::max(p(i, j), 1e-300));
        }
    }
    loss /= static_cast<double>(m);
    auto probs = std::make_shared<Tensor>(std::move(p));
    return make_op(Tensor::scalar(loss), {logits, one_hot}, [logits, one_hot, probs, m, c](Node& n) {
        if (!logits->requires_grad) return;
        logits->ensure_grad();
        const double g = n.grad(0) / static_cast<double>(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < c; ++j)
                logits->grad(i, j) += g * ((*probs)(i, j) - one_hot->value(i, j));
    });
}

void backward(const NodePtr& loss) {
    if (!loss) throw ContractError("backward: null loss node");
    if (loss->value.numel() != 1) {
        throw ContractError("backward: loss must be scalar, got shape " + loss->value.shape_str());
    }
    if (!loss->requires_grad) return;  // nothing reachable requires gradients

    // Iterative post-order DFS over the requires_grad subgraph.
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    struct Frame {
        Node* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack;
    stack.push_back({loss.get(), 0});
    visited.insert(loss.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            Node* p = f.node->parents[f.next_parent++].get();
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    loss->accumulate_grad(Tensor::scalar(1.0));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn && n->has_grad()) n->backward_fn(*n);
    }
}

}  // namespace ittt

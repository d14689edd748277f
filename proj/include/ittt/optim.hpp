#pragma once

#include "ittt/param_store.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ittt {

enum class OptKind { SGD, Adam };

struct OptimizerConfig {
    OptKind kind = OptKind::Adam;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// SGD / Adam over a ParamStore. Moment state is keyed by entry order and is
/// lazily sized on the first step; gradients are zeroed after each apply so
/// that successive backward calls accumulate between steps.
class Optimizer {
public:
    explicit Optimizer(OptimizerConfig cfg) : cfg_(cfg) {}

    void step(ParamStore& params);
    std::int64_t step_count() const { return step_count_; }
    const OptimizerConfig& config() const { return cfg_; }

private:
    OptimizerConfig cfg_;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
    std::int64_t step_count_ = 0;
};

struct FdEntry {
    std::string name;
    double max_rel_err = 0.0;
};

struct FdReport {
    std::vector<FdEntry> per_param;
    double max_rel_err = 0.0;
    double tol = 0.0;

    bool pass() const { return max_rel_err <= tol; }
};

/// Compare analytic gradients against central finite differences, parameter
/// element by parameter element. `make_loss` must rebuild the scalar graph
/// from the current parameter values on every call. Relative error uses a
/// unit floor: |a - n| / max(|a|, |n|, 1).
FdReport finite_diff_check(const std::function<NodePtr()>& make_loss, ParamStore& params,
                           double h, double tol);

}  // namespace ittt

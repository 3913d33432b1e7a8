#ifndef WECON_EVAL_HPP
#define WECON_EVAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wecon/hypervolume.hpp"
#include "wecon/model.hpp"
#include "wecon/pareto.hpp"
#include "wecon/problems.hpp"

namespace wecon {

struct EvalOptions {
    int lattice_H = 100;
    bool augment = false;
    DecodeMode decode = DecodeMode::Greedy;
    std::optional<HvContext> ctx;  // overrides the built-in table
    bool diagnostics = false;
    int threads = 0;  // 0 = hardware concurrency
    bool multistart = false;
    std::uint64_t sample_seed = 1;
};

struct DiagRow {
    int weight_index = 0;
    std::vector<double> lambda;
    int first_action = -1;
    double cosine = 0.0;
};

struct InstanceEval {
    std::string id;
    double hv = 0.0;
    ParetoArchive archive;
    double wall_s = 0.0;
    std::vector<DiagRow> diag;
};

struct EvalReport {
    double mean_hv = 0.0;
    double total_s = 0.0;
    int weights = 0;
    int augments = 1;
    std::vector<InstanceEval> per_instance;
};

/// Decode every (weight, augmentation) subproblem of each instance, pool
/// the solutions, Pareto-filter, and report normalized hypervolume against
/// the built-in or supplied reference/ideal points. Instances are
/// processed in parallel; results are deterministic for greedy decoding.
EvalReport evaluate(const ParameterTable<float>& params, const ModelConfig& cfg,
                    const std::vector<Instance>& instances, const EvalOptions& opt);

}  // namespace wecon

#endif  // WECON_EVAL_HPP

#include "wecon/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <stdexcept>
#include <thread>

#include "wecon/weights.hpp"

namespace wecon {

namespace {

InstanceEval eval_one(const ParameterTable<float>& params, const ModelConfig& cfg,
                      const Instance& inst, const std::vector<WeightVector>& weights,
                      const EvalOptions& opt, std::size_t instance_index) {
    const auto t0 = std::chrono::steady_clock::now();
    InstanceEval out;
    out.id = inst.id;

    std::vector<Instance> variants;
    if (opt.augment && is_euclidean(inst.kind))
        variants = augment(inst);
    else
        variants.push_back(inst);

    std::vector<int> starts{0};
    if (opt.multistart &&
        (inst.kind == ProblemKind::BiTSP || inst.kind == ProblemKind::TriTSP)) {
        starts.resize(inst.n);
        for (int i = 0; i < inst.n; ++i) starts[i] = i;
    }

    std::vector<std::vector<double>> pool;
    pool.reserve(variants.size() * weights.size() * starts.size());
    for (std::size_t a = 0; a < variants.size(); ++a) {
        for (std::size_t w = 0; w < weights.size(); ++w) {
            for (int s : starts) {
                Rng rng(mix_seed(opt.sample_seed, instance_index, a * weights.size() + w,
                                 static_cast<std::uint64_t>(s)));
                Solution sol =
                    rollout(params, cfg, variants[a], weights[w], opt.decode, 1, rng, s);
                pool.push_back(sol.objectives);
            }
        }
    }
    out.archive = pareto_filter(pool);

    HvContext ctx;
    if (opt.ctx) {
        ctx = *opt.ctx;
    } else {
        auto builtin = builtin_hv_context(inst.kind, inst.n);
        if (!builtin)
            throw std::runtime_error("no built-in reference point for " + kind_name(inst.kind) +
                                     " n=" + std::to_string(inst.n) +
                                     "; pass explicit --ref/--ideal");
        ctx = *builtin;
    }
    out.hv = hypervolume(out.archive, ctx);

    if (opt.diagnostics) {
        for (std::size_t w = 0; w < weights.size(); ++w) {
            Tape<float> t(false);
            BoundParams<float> p(t, params, false);
            EncoderOutput<float> enc = encode(t, p, inst, weights[w], cfg);
            DiagRow row;
            row.weight_index = static_cast<int>(w);
            row.lambda = weights[w].lambda;
            row.cosine = encoder_cosine(t.val(enc.H), t.val(enc.A));
            Rng rng(mix_seed(opt.sample_seed, instance_index, w));
            Solution sol = rollout(params, cfg, inst, weights[w], DecodeMode::Greedy, 1, rng, 0);
            const bool forced =
                inst.kind == ProblemKind::BiTSP || inst.kind == ProblemKind::TriTSP;
            row.first_action = forced ? sol.sequence.at(1) : sol.sequence.at(0);
            out.diag.push_back(std::move(row));
        }
    }

    out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

EvalReport evaluate(const ParameterTable<float>& params, const ModelConfig& cfg,
                    const std::vector<Instance>& instances, const EvalOptions& opt) {
    if (instances.empty()) throw std::invalid_argument("evaluate: no instances");
    for (const Instance& inst : instances)
        if (inst.kind != instances[0].kind)
            throw std::invalid_argument("evaluate: dataset mixes problem kinds");
    const auto t0 = std::chrono::steady_clock::now();
    const int kappa = kappa_of(instances[0].kind);
    const std::vector<WeightVector> weights = das_dennis_weights(kappa, opt.lattice_H);

    EvalReport report;
    report.weights = static_cast<int>(weights.size());
    report.augments =
        opt.augment && is_euclidean(instances[0].kind) ? (instances[0].kind == ProblemKind::BiCVRP
                                                              ? 8
                                                              : (kappa == 2 ? 64 : 512))
                                                       : 1;
    report.per_instance.resize(instances.size());

    unsigned hw = std::thread::hardware_concurrency();
    int threads = opt.threads > 0 ? opt.threads : static_cast<int>(hw ? hw : 1);
    threads = std::min<int>(threads, static_cast<int>(instances.size()));

    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(instances.size());
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= instances.size()) return;
            try {
                report.per_instance[i] = eval_one(params, cfg, instances[i], weights, opt, i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> ts;
        for (int i = 0; i < threads; ++i) ts.emplace_back(worker);
        for (auto& t : ts) t.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);

    double sum = 0.0;
    for (const auto& pe : report.per_instance) sum += pe.hv;
    report.mean_hv = sum / static_cast<double>(report.per_instance.size());
    report.total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace wecon

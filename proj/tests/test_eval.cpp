#include <doctest.h>

#include "wecon/eval.hpp"
#include "wecon/oracle.hpp"

using namespace wecon;

namespace {

ModelConfig tiny_cfg() {
    ModelConfig cfg;
    cfg.d = 16;
    cfg.L = 1;
    cfg.M = 2;
    return cfg;
}

}  // namespace

TEST_CASE("augmented evaluation never loses hypervolume") {
    const ModelConfig cfg = tiny_cfg();
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 5);
    std::vector<Instance> insts;
    for (int i = 0; i < 3; ++i) insts.push_back(generate_instance(ProblemKind::BiTSP, 6, 60 + i));

    EvalOptions plain_opt;
    plain_opt.lattice_H = 12;
    plain_opt.ctx = HvContext{{10.0, 10.0}, {0.0, 0.0}};
    EvalOptions aug_opt = plain_opt;
    aug_opt.augment = true;

    const auto plain_rep = evaluate(table, cfg, insts, plain_opt);
    const auto aug_rep = evaluate(table, cfg, insts, aug_opt);
    CHECK(aug_rep.augments == 64);
    CHECK(plain_rep.augments == 1);
    for (int i = 0; i < 3; ++i) {
        CHECK(aug_rep.per_instance[i].hv >= plain_rep.per_instance[i].hv - 1e-12);
        CHECK(plain_rep.per_instance[i].hv >= 0.0);
        CHECK(plain_rep.per_instance[i].hv <= 1.0);
        CHECK(aug_rep.per_instance[i].hv <= 1.0);
    }
    CHECK(aug_rep.mean_hv >= plain_rep.mean_hv - 1e-12);
}

TEST_CASE("evaluation is deterministic and multithreading does not change it") {
    const ModelConfig cfg = tiny_cfg();
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 7);
    std::vector<Instance> insts;
    for (int i = 0; i < 4; ++i) insts.push_back(generate_instance(ProblemKind::BiTSP, 6, 90 + i));
    EvalOptions opt;
    opt.lattice_H = 10;
    opt.ctx = HvContext{{10.0, 10.0}, {0.0, 0.0}};
    opt.threads = 1;
    const auto a = evaluate(table, cfg, insts, opt);
    opt.threads = 4;
    const auto b = evaluate(table, cfg, insts, opt);
    REQUIRE(a.per_instance.size() == b.per_instance.size());
    for (std::size_t i = 0; i < a.per_instance.size(); ++i)
        CHECK(a.per_instance[i].hv == b.per_instance[i].hv);
}

TEST_CASE("missing built-in reference points are a hard error") {
    const ModelConfig cfg = tiny_cfg();
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 7);
    std::vector<Instance> insts{generate_instance(ProblemKind::BiTSP, 6, 1)};
    EvalOptions opt;
    opt.lattice_H = 4;
    CHECK_THROWS_WITH_AS(evaluate(table, cfg, insts, opt),
                         doctest::Contains("no built-in reference point"), std::runtime_error);

    // listed sizes resolve without explicit points
    std::vector<Instance> listed{generate_instance(ProblemKind::BiTSP, 20, 1)};
    const auto rep = evaluate(table, cfg, listed, opt);
    CHECK(rep.per_instance[0].hv >= 0.0);
    CHECK(rep.per_instance[0].hv <= 1.0);
}

TEST_CASE("diagnostics rows carry one first action and cosine per weight") {
    const ModelConfig cfg = tiny_cfg();
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 3);
    std::vector<Instance> insts{generate_instance(ProblemKind::BiTSP, 6, 2)};
    EvalOptions opt;
    opt.lattice_H = 8;
    opt.ctx = HvContext{{10.0, 10.0}, {0.0, 0.0}};
    opt.diagnostics = true;
    const auto rep = evaluate(table, cfg, insts, opt);
    REQUIRE(rep.per_instance[0].diag.size() == 9);
    for (const auto& row : rep.per_instance[0].diag) {
        CHECK(row.first_action >= 0);
        CHECK(row.first_action < 6);
        CHECK(std::abs(row.cosine) <= 1.0 + 1e-9);
        CHECK(row.lambda.size() == 2);
    }
}

TEST_CASE("multistart pooling can only help") {
    const ModelConfig cfg = tiny_cfg();
    auto table = init_parameters<float>(cfg, ProblemKind::BiTSP, 11);
    std::vector<Instance> insts{generate_instance(ProblemKind::BiTSP, 6, 3)};
    EvalOptions opt;
    opt.lattice_H = 8;
    opt.ctx = HvContext{{10.0, 10.0}, {0.0, 0.0}};
    const auto single = evaluate(table, cfg, insts, opt);
    opt.multistart = true;
    const auto multi = evaluate(table, cfg, insts, opt);
    CHECK(multi.per_instance[0].hv >= single.per_instance[0].hv - 1e-12);
}

TEST_CASE("ablation-approx encoder drops the weight-update block") {
    ModelConfig full = tiny_cfg();
    ModelConfig abl = tiny_cfg();
    abl.encoder = EncoderKind::AblationApprox;

    const auto full_table = init_parameters<float>(full, ProblemKind::BiTSP, 9);
    const auto abl_table = init_parameters<float>(abl, ProblemKind::BiTSP, 9);
    CHECK(full_table.has("enc0.cross_w.Wq"));
    CHECK(full_table.has("enc0.grf.W3"));
    CHECK_FALSE(abl_table.has("enc0.cross_w.Wq"));
    CHECK_FALSE(abl_table.has("enc0.grf.W3"));

    // the weight embedding passes through unchanged
    const Instance inst = generate_instance(ProblemKind::BiTSP, 6, 4);
    WeightVector lam{{0.7, 0.3}};
    Tape<float> t(false);
    BoundParams<float> p(t, abl_table, false);
    auto emb = embed_inputs(t, p, inst, lam);
    auto enc = encode(t, p, inst, lam, abl);
    CHECK(t.val(enc.A).v == t.val(emb.A).v);
    CHECK(t.val(enc.H).v != t.val(emb.H).v);

    // and a rollout through the ablation model works end to end
    Rng rng(1);
    const Solution sol = rollout(abl_table, abl, inst, lam, DecodeMode::Greedy, 1, rng);
    CHECK(sol.sequence.size() == 6);
}

// Command-line front end: dataset generation, training, lattice
// evaluation, exact oracles, and hypervolume computation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wecon/dataset.hpp"
#include "wecon/epo.hpp"
#include "wecon/eval.hpp"
#include "wecon/hypervolume.hpp"
#include "wecon/model.hpp"
#include "wecon/oracle.hpp"
#include "wecon/params.hpp"
#include "wecon/problems.hpp"

namespace fs = std::filesystem;
using namespace wecon;

namespace {

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
    return out;
}

std::vector<std::string> split_paths(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

struct ModelFlags {
    std::string config_path;
    int d = -1, L = -1, M = -1, experts = -1;
    double C = -1.0;
    std::string decoder, grf, encoder;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "model config file (key=value)");
        cmd->add_option("--d", d, "hidden width");
        cmd->add_option("--layers", L, "encoder layers");
        cmd->add_option("--heads", M, "attention heads");
        cmd->add_option("--clip", C, "logit clipping constant");
        cmd->add_option("--decoder", decoder, "decoder kind: rf|cco|plain");
        cmd->add_option("--grf", grf, "gated residual fusion: on|off");
        cmd->add_option("--encoder", encoder, "encoder kind: full|ablation-approx");
        cmd->add_option("--experts", experts, "expert count (cco decoder)");
    }

    ModelConfig resolve() const {
        ModelConfig cfg;
        if (!config_path.empty()) {
            for (const auto& [key, value] : read_config(config_path)) {
                if (key == "d") cfg.d = std::stoi(value);
                else if (key == "L") cfg.L = std::stoi(value);
                else if (key == "M") cfg.M = std::stoi(value);
                else if (key == "C") cfg.C = std::stod(value);
                else if (key == "decoder") cfg.decoder = decoder_from_name(value);
                else if (key == "grf") cfg.grf = value == "on";
                else if (key == "experts") cfg.experts = std::stoi(value);
                else if (key == "encoder")
                    cfg.encoder = value == "ablation-approx" ? EncoderKind::AblationApprox
                                                             : EncoderKind::Full;
                else
                    throw std::runtime_error("unknown model config key: " + key);
            }
        }
        if (d > 0) cfg.d = d;
        if (L > 0) cfg.L = L;
        if (M > 0) cfg.M = M;
        if (C > 0) cfg.C = C;
        if (experts > 0) cfg.experts = experts;
        if (!decoder.empty()) cfg.decoder = decoder_from_name(decoder);
        if (!grf.empty()) cfg.grf = grf == "on";
        if (!encoder.empty())
            cfg.encoder =
                encoder == "ablation-approx" ? EncoderKind::AblationApprox : EncoderKind::Full;
        cfg.validate();
        return cfg;
    }
};

std::string config_echo(const ModelConfig& cfg) {
    std::ostringstream os;
    os << "d=" << cfg.d << " L=" << cfg.L << " M=" << cfg.M << " C=" << cfg.C
       << " decoder=" << decoder_name(cfg.decoder) << " grf=" << (cfg.grf ? "on" : "off")
       << " encoder=" << (cfg.encoder == EncoderKind::Full ? "full" : "ablation-approx")
       << " experts=" << cfg.experts;
    return os.str();
}

void write_model_config(const std::string& path, const ModelConfig& cfg) {
    std::ofstream out(path);
    out << "d=" << cfg.d << "\nL=" << cfg.L << "\nM=" << cfg.M << "\nC=" << cfg.C
        << "\ndecoder=" << decoder_name(cfg.decoder) << "\ngrf=" << (cfg.grf ? "on" : "off")
        << "\nencoder=" << (cfg.encoder == EncoderKind::Full ? "full" : "ablation-approx")
        << "\nexperts=" << cfg.experts << "\n";
}

int run_gen(const std::string& problem, int n, int count, std::uint64_t seed,
            const std::string& out_path, bool aug) {
    const ProblemKind kind = kind_from_name(problem);
    if (aug && kind == ProblemKind::BiKP)
        std::cerr << "warning: augmentation undefined for bikp; flag ignored\n";
    std::vector<Instance> instances;
    instances.reserve(count);
    for (int i = 0; i < count; ++i)
        instances.push_back(generate_instance(kind, n, mix_seed(seed, i)));
    write_instances(out_path, instances);
    std::cout << "wrote " << count << " " << problem << " instances to " << out_path << "\n";
    return 0;
}

int run_train(const std::string& problem, int n, const ModelFlags& mf, TrainConfig tcfg,
              double beta_flag, const std::string& decomp, const std::string& out_dir) {
    const ProblemKind kind = kind_from_name(problem);
    const ModelConfig mcfg = mf.resolve();
    if (beta_flag > 0)
        tcfg.beta = beta_flag;
    else
        tcfg.beta = kappa_of(kind) == 2 ? 3.5 : 4.5;
    if (!decomp.empty()) tcfg.scalarization = scalarization_from_name(decomp);
    tcfg.validate();

    fs::create_directories(out_dir);
    const std::string ck_path = out_dir + "/checkpoint.wecn";
    auto checkpoint_cb = [&](int step_i, const ParameterTable<float>& p) {
        save_checkpoint(p, out_dir + "/checkpoint_step" + std::to_string(step_i) + ".wecn");
    };

    TrainResult result = train(kind, n, mcfg, tcfg, checkpoint_cb);

    save_checkpoint(result.params, ck_path);
    write_model_config(out_dir + "/model.cfg", mcfg);

    std::ofstream log(out_dir + "/train_log.csv");
    log << "# wecon train problem=" << problem << " n=" << n << " " << config_echo(mcfg)
        << " mode=" << (tcfg.plain_po() ? "PO" : "EPO") << " r=" << tcfg.r << " c=" << tcfg.c
        << " k=" << tcfg.k << " beta=" << tcfg.beta
        << " guided=" << tcfg.effective_guided_count() << " steps=" << tcfg.steps
        << " batch=" << tcfg.batch << " lr=" << tcfg.lr << " wd=" << tcfg.wd
        << " seed=" << tcfg.seed << " decomposition=" << scalarization_name(tcfg.scalarization)
        << "\n";
    log << "step,mean_loss,mean_best_ws,elapsed_s\n";
    for (const MetricsRow& row : result.log)
        log << row.step << ',' << format_double(row.mean_loss) << ','
            << format_double(row.mean_best_ws) << ',' << row.elapsed_s << "\n";
    log.close();

    if (result.aborted) {
        std::cerr << "training aborted: " << result.abort_reason
                  << " (last good checkpoint written to " << ck_path << ")\n";
        return 2;
    }
    std::cout << "trained " << tcfg.steps << " steps; checkpoint " << ck_path << "\n";
    return 0;
}

std::vector<Instance> load_eval_instances(const std::string& data, const std::string& tsplib) {
    if (!data.empty() && !tsplib.empty())
        throw std::runtime_error("pass either --data or --tsplib, not both");
    if (!tsplib.empty()) return {load_tsplib_pair(split_paths(tsplib))};
    if (data.empty()) throw std::runtime_error("--data or --tsplib is required");
    return read_instances(data);
}

int run_eval(const std::string& data, const std::string& tsplib, const std::string& checkpoint,
             const ModelFlags& mf, int lattice, bool aug, const std::string& decode,
             const std::string& ref_s, const std::string& ideal_s, double ref_hv,
             const std::string& out_dir, const std::string& method, bool diagnostics,
             int threads, bool multistart, bool save_archives) {
    const ModelConfig mcfg = mf.resolve();
    const std::vector<Instance> instances = load_eval_instances(data, tsplib);
    const ProblemKind kind = instances[0].kind;
    if (aug && !is_euclidean(kind))
        std::cerr << "warning: augmentation undefined for bikp; flag ignored\n";

    ParameterTable<float> params = load_checkpoint<float>(checkpoint);

    EvalOptions opt;
    opt.lattice_H = lattice > 0 ? lattice : (kappa_of(kind) == 2 ? 100 : 13);
    opt.augment = aug;
    opt.decode = decode == "sample" ? DecodeMode::Sample : DecodeMode::Greedy;
    opt.diagnostics = diagnostics;
    opt.threads = threads;
    opt.multistart = multistart;
    if (!ref_s.empty() != !ideal_s.empty())
        throw std::runtime_error("--ref and --ideal must be given together");
    if (!ref_s.empty()) {
        HvContext ctx{parse_point(ref_s), parse_point(ideal_s)};
        ctx.validate();
        opt.ctx = ctx;
    }

    EvalReport report = evaluate(params, mcfg, instances, opt);

    fs::create_directories(out_dir);
    std::string method_name = method;
    if (method_name.empty())
        method_name = "wecon" +
                      std::string(mcfg.decoder == DecoderKind::CCO     ? "-cco"
                                  : mcfg.decoder == DecoderKind::Plain ? "-plain"
                                                                       : "") +
                      (aug ? "-aug" : "");
    std::ofstream rep(out_dir + "/report.csv");
    rep << "problem,n,method,hv,gap_pct,time_s\n";
    rep << kind_name(kind) << ',' << instances[0].n << ',' << method_name << ','
        << format_double(report.mean_hv) << ',';
    if (ref_hv > 0) rep << format_double(hv_gap(report.mean_hv, ref_hv));
    rep << ',' << report.total_s << "\n";
    rep.close();

    if (save_archives) {
        for (std::size_t i = 0; i < report.per_instance.size(); ++i)
            write_points_csv(out_dir + "/archive_" + std::to_string(i) + ".csv",
                             report.per_instance[i].archive.points());
    }
    if (diagnostics) {
        std::ofstream diag(out_dir + "/diagnostics.csv");
        diag << "instance,weight_index";
        for (int j = 1; j <= kappa_of(kind); ++j) diag << ",lambda" << j;
        diag << ",first_action,cos_sim\n";
        for (std::size_t i = 0; i < report.per_instance.size(); ++i)
            for (const DiagRow& row : report.per_instance[i].diag) {
                diag << i << ',' << row.weight_index;
                for (double l : row.lambda) diag << ',' << format_double(l);
                diag << ',' << row.first_action << ',' << format_double(row.cosine) << "\n";
            }
    }

    std::cout << "mean HV " << report.mean_hv << " over " << report.per_instance.size()
              << " instances (" << report.weights << " weights x " << report.augments
              << " augmentations); report " << out_dir << "/report.csv\n";
    return 0;
}

int run_oracle(const std::string& data, const std::string& tsplib, const std::string& ref_s,
               const std::string& ideal_s, const std::string& out_dir) {
    const std::vector<Instance> instances = load_eval_instances(data, tsplib);
    const ProblemKind kind = instances[0].kind;
    fs::create_directories(out_dir);

    std::optional<HvContext> ctx;
    if (!ref_s.empty() != !ideal_s.empty())
        throw std::runtime_error("--ref and --ideal must be given together");
    if (!ref_s.empty()) {
        ctx = HvContext{parse_point(ref_s), parse_point(ideal_s)};
        ctx->validate();
    } else {
        ctx = builtin_hv_context(kind, instances[0].n);
        if (!ctx)
            throw std::runtime_error("no built-in reference point for " + kind_name(kind) +
                                     " n=" + std::to_string(instances[0].n) +
                                     "; pass explicit --ref/--ideal");
    }

    std::ofstream rep(out_dir + "/oracle_report.csv");
    rep << "problem,n,method,hv,gap_pct,time_s\n";
    double total_s = 0.0, hv_sum = 0.0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        OracleResult res = enumerate_pareto(instances[i]);
        const double hv = hypervolume(res.archive, *ctx);
        hv_sum += hv;
        total_s += res.wall_s;
        write_points_csv(out_dir + "/oracle_archive_" + std::to_string(i) + ".csv",
                         res.archive.points());
        std::cout << instances[i].id << ": enumerated " << res.enumerated << ", front "
                  << res.archive.size() << ", HV " << hv << "\n";
    }
    rep << kind_name(kind) << ',' << instances[0].n << ",oracle,"
        << format_double(hv_sum / instances.size()) << ",," << total_s << "\n";
    std::cout << "mean exact HV " << hv_sum / instances.size() << "; report " << out_dir
              << "/oracle_report.csv\n";
    return 0;
}

int run_hv(const std::string& points_path, const std::string& ref_s, const std::string& ideal_s) {
    const auto pts = read_points_csv(points_path);
    HvContext ctx{parse_point(ref_s), parse_point(ideal_s)};
    ctx.validate();
    ParetoArchive archive = pareto_filter(pts);
    std::cout << format_double(hypervolume(archive, ctx)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wecon: weight-conditioned neural solver laboratory for MOCOPs"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a uniform instance dataset");
    std::string g_problem = "bitsp", g_out = "dataset.txt";
    int g_n = 20, g_count = 20;
    std::uint64_t g_seed = 1;
    bool g_aug = false;
    gen->add_option("--problem", g_problem, "bitsp|tritsp|bicvrp|bikp")->required();
    gen->add_option("--n", g_n, "nodes/customers/items")->required();
    gen->add_option("--count", g_count, "instances to generate");
    gen->add_option("--seed", g_seed, "generation seed");
    gen->add_option("--out", g_out, "output file")->required();
    gen->add_flag("--augment", g_aug, "no effect at generation time");

    // train
    auto* tr = app.add_subcommand("train", "preference-optimization training");
    std::string t_problem = "bitsp", t_out = "run", t_decomp;
    int t_n = 10;
    double t_beta = -1.0;
    ModelFlags t_mf;
    TrainConfig tcfg;
    tr->add_option("--problem", t_problem, "bitsp|tritsp|bicvrp|bikp")->required();
    tr->add_option("--n", t_n, "training instance size")->required();
    tr->add_option("--steps", tcfg.steps, "training steps");
    tr->add_option("--batch", tcfg.batch, "instances per step");
    tr->add_option("--r", tcfg.r, "sampled solutions per (instance, weight)");
    tr->add_option("--c", tcfg.c, "guidance ratio divisor");
    tr->add_option("--k", tcfg.k, "guided sampling width");
    tr->add_option("--beta", t_beta, "preference temperature (default 3.5/4.5 by kappa)");
    tr->add_option("--lr", tcfg.lr, "Adam learning rate");
    tr->add_option("--wd", tcfg.wd, "decoupled weight decay");
    tr->add_option("--seed", tcfg.seed, "training seed");
    tr->add_option("--guided-count", tcfg.guided_count, "guided rollouts per item (0 = plain PO)");
    tr->add_option("--decomposition", t_decomp, "ws|tch");
    tr->add_option("--checkpoint-every", tcfg.checkpoint_every, "intermediate checkpoint period");
    tr->add_option("--out-dir", t_out, "output directory")->required();
    t_mf.add_to(tr);

    // eval
    auto* ev = app.add_subcommand("eval", "decode the weight lattice and report hypervolume");
    std::string e_data, e_tsplib, e_ck, e_decode = "greedy", e_ref, e_ideal, e_out = "eval",
                e_method;
    int e_lattice = -1, e_threads = 0;
    double e_ref_hv = -1.0;
    bool e_aug = false, e_diag = false, e_multi = false, e_save = false;
    ModelFlags e_mf;
    ev->add_option("--data", e_data, "instance dataset file");
    ev->add_option("--tsplib", e_tsplib, "comma-separated TSPLIB files forming one instance");
    ev->add_option("--checkpoint", e_ck, "model checkpoint")->required();
    ev->add_option("--lattice", e_lattice, "weight lattice density H (default 100 / 13)");
    ev->add_flag("--augment", e_aug, "pool the 8/64/512 instance augmentations");
    ev->add_option("--decode", e_decode, "greedy|sample");
    ev->add_option("--ref", e_ref, "reference point, comma separated");
    ev->add_option("--ideal", e_ideal, "ideal point, comma separated");
    ev->add_option("--ref-hv", e_ref_hv, "reference HV for the gap column");
    ev->add_option("--out-dir", e_out, "output directory");
    ev->add_option("--method", e_method, "method label in the report");
    ev->add_flag("--diagnostics", e_diag, "emit per-weight first actions and cosines");
    ev->add_option("--threads", e_threads, "worker threads (0 = hardware)");
    ev->add_flag("--multistart", e_multi, "decode every MOTSP start node");
    ev->add_flag("--save-archives", e_save, "write per-instance Pareto archives");
    e_mf.add_to(ev);

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact Pareto sets for tiny instances");
    std::string o_data, o_tsplib, o_ref, o_ideal, o_out = "oracle";
    orc->add_option("--data", o_data, "instance dataset file");
    orc->add_option("--tsplib", o_tsplib, "comma-separated TSPLIB files forming one instance");
    orc->add_option("--ref", o_ref, "reference point, comma separated");
    orc->add_option("--ideal", o_ideal, "ideal point, comma separated");
    orc->add_option("--out-dir", o_out, "output directory");

    // hv
    auto* hv = app.add_subcommand("hv", "hypervolume of a point CSV");
    std::string h_points, h_ref, h_ideal;
    hv->add_option("--points", h_points, "objective point CSV")->required();
    hv->add_option("--ref", h_ref, "reference point, comma separated")->required();
    hv->add_option("--ideal", h_ideal, "ideal point, comma separated")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return run_gen(g_problem, g_n, g_count, g_seed, g_out, g_aug);
        if (tr->parsed())
            return run_train(t_problem, t_n, t_mf, tcfg, t_beta, t_decomp, t_out);
        if (ev->parsed())
            return run_eval(e_data, e_tsplib, e_ck, e_mf, e_lattice, e_aug, e_decode, e_ref,
                            e_ideal, e_ref_hv, e_out, e_method, e_diag, e_threads, e_multi,
                            e_save);
        if (orc->parsed()) return run_oracle(o_data, o_tsplib, o_ref, o_ideal, o_out);
        if (hv->parsed()) return run_hv(h_points, h_ref, h_ideal);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

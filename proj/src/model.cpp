#include "wecon/model.hpp"

#include <algorithm>
#include <numeric>

namespace wecon {

std::string decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::Plain: return "plain";
        case DecoderKind::RF: return "rf";
        case DecoderKind::CCO: return "cco";
    }
    throw std::logic_error("unknown decoder kind");
}

DecoderKind decoder_from_name(const std::string& s) {
    if (s == "plain") return DecoderKind::Plain;
    if (s == "rf") return DecoderKind::RF;
    if (s == "cco") return DecoderKind::CCO;
    throw std::invalid_argument("unknown decoder kind: " + s);
}

int context_width(ProblemKind kind, int d) {
    switch (kind) {
        case ProblemKind::BiTSP:
        case ProblemKind::TriTSP: return 2 * d;
        case ProblemKind::BiCVRP:
        case ProblemKind::BiKP: return d + 1;
    }
    throw std::logic_error("unknown problem kind");
}

Matrix<double> model_features(const Instance& inst) {
    Matrix<double> f = inst.features;
    if (inst.kind == ProblemKind::BiCVRP) {
        for (int i = 0; i < f.rows; ++i) f.at(i, 2) /= inst.capacity;
    }
    return f;
}

std::vector<double> top1_gate(const std::vector<double>& softmax_scores) {
    if (softmax_scores.empty()) throw std::invalid_argument("top1_gate: empty scores");
    int best = 0;
    for (std::size_t i = 1; i < softmax_scores.size(); ++i)
        if (softmax_scores[i] > softmax_scores[best]) best = static_cast<int>(i);
    std::vector<double> gate(softmax_scores.size(), 0.0);
    gate[best] = 1.0;
    return gate;
}

int greedy_pick(const std::vector<double>& log_probs, const std::vector<std::uint8_t>& mask) {
    int best = -1;
    for (std::size_t i = 0; i < log_probs.size(); ++i) {
        if (!mask[i]) continue;
        if (best < 0 || log_probs[i] > log_probs[best]) best = static_cast<int>(i);
    }
    if (best < 0) throw std::invalid_argument("greedy_pick: no feasible node");
    return best;
}

int categorical_pick(const std::vector<double>& probs, const std::vector<std::uint8_t>& mask,
                     Rng& rng) {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (mask[i]) total += probs[i];
    if (!(total > 0.0)) throw std::invalid_argument("categorical_pick: no probability mass");
    const double u = rng.next_double() * total;
    double cum = 0.0;
    int last = -1;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!mask[i]) continue;
        cum += probs[i];
        last = static_cast<int>(i);
        if (u < cum) return last;
    }
    return last;
}

int guided_sample(const std::vector<double>& probs, const std::vector<std::uint8_t>& mask, int k,
                  Rng& rng) {
    if (k < 1) throw std::invalid_argument("guided_sample: k must be >= 1");
    std::vector<int> feasible;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (mask[i]) feasible.push_back(static_cast<int>(i));
    if (feasible.empty()) throw std::invalid_argument("guided_sample: no feasible node");

    if (static_cast<int>(feasible.size()) > k) {
        // top-k by probability, ties resolved toward lower indices
        std::stable_sort(feasible.begin(), feasible.end(),
                         [&](int a, int b) { return probs[a] > probs[b]; });
        feasible.resize(k);
        std::sort(feasible.begin(), feasible.end());
    }
    std::vector<std::uint8_t> restricted(probs.size(), 0);
    for (int i : feasible) restricted[i] = 1;
    return categorical_pick(probs, restricted, rng);
}

}  // namespace wecon

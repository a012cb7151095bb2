#include "proxynas/adaptation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <json.hpp>

#include "proxynas/errors.hpp"
#include "proxynas/parallel.hpp"
#include "proxynas/rank_correlation.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

int AdaptationParams::nonzero_count() const {
    int n = 0;
    for (const double v : b)
        if (v != 0.0) ++n;
    return n;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(std::pow(10.0, -4.0 + 0.5 * i));
    return grid;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

std::vector<double> adapted_weights(const AdaptationParams& params,
                                    std::span<const double> base_weights) {
    if (params.b.size() != base_weights.size())
        throw DimensionMismatch("b has " + std::to_string(params.b.size()) +
                                " entries, base has " + std::to_string(base_weights.size()));
    std::vector<double> w(base_weights.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = (params.alpha + params.b[i]) * base_weights[i];
    return w;
}

double adapted_predict(const AdaptationParams& params, const LatencyPredictor& base,
                       const ArchEncoding& encoding) {
    LatencyPredictor adapted;
    adapted.space_id = base.space_id;
    adapted.weights = adapted_weights(params, base.weights);
    return predict(adapted, encoding);
}

LatencyPredictor adapted_predictor(const AdaptationParams& params,
                                   const LatencyPredictor& base) {
    LatencyPredictor out;
    out.space_id = base.space_id;
    out.weights = adapted_weights(params, base.weights);
    return out;
}

namespace {

/// Dense view of the training set: row i of Z is w o x_i, s = Z * 1 is the
/// proxy prediction, y the measured latency.
struct RescaleProblem {
    Eigen::MatrixXd z;
    Eigen::VectorXd s;
    Eigen::VectorXd y;
};

RescaleProblem build_problem(const SearchSpaceSpec& space, const LatencyPredictor& base,
                             const std::vector<MeasurementSample>& samples) {
    const int k = space.encoding_length();
    if (static_cast<int>(base.weights.size()) != k)
        throw DimensionMismatch("base predictor does not match the space encoding");
    const int n = static_cast<int>(samples.size());
    RescaleProblem p;
    p.z.resize(n, k);
    p.y.resize(n);
    for (int i = 0; i < n; ++i) {
        const ArchEncoding enc = encode(space, samples[static_cast<std::size_t>(i)].genotype);
        for (int j = 0; j < k; ++j)
            p.z(i, j) = base.weights[static_cast<std::size_t>(j)] *
                        enc.features[static_cast<std::size_t>(j)];
        p.y(i) = samples[static_cast<std::size_t>(i)].latency_ms;
    }
    p.s = p.z.rowwise().sum();
    return p;
}

double smooth_loss(const RescaleProblem& p, double alpha, const Eigen::VectorXd& b) {
    const Eigen::VectorXd r = alpha * p.s + p.z * b - p.y;
    return r.squaredNorm() / static_cast<double>(p.y.size());
}

double full_objective(const RescaleProblem& p, double alpha, const Eigen::VectorXd& b,
                      double lambda) {
    return smooth_loss(p, alpha, b) + lambda * b.lpNorm<1>();
}

SparseRescaleResult solve_on_problem(const RescaleProblem& p, double lambda,
                                     const AdaptationConfig& cfg) {
    if (lambda < 0.0) throw DegenerateInput("lambda must be >= 0");
    const int n = static_cast<int>(p.y.size());
    const int k = static_cast<int>(p.z.cols());
    if (n < 2) throw TooFewSamples("rescale fit needs at least 2 samples");

    double alpha = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    double objective = full_objective(p, alpha, b, lambda);

    SparseRescaleResult result;
    double step = cfg.step.initial_step;
    int iter = 0;
    const double inv_n = 1.0 / static_cast<double>(n);

    for (; iter < cfg.max_iter; ++iter) {
        const Eigen::VectorXd r = alpha * p.s + p.z * b - p.y;
        const double loss = r.squaredNorm() * inv_n;
        const double grad_alpha = 2.0 * inv_n * p.s.dot(r);
        const Eigen::VectorXd grad_b = 2.0 * inv_n * (p.z.transpose() * r);

        // Backtracking proximal step: shrink until the smooth part satisfies
        // the quadratic upper bound at the candidate point.
        double next_alpha = alpha;
        Eigen::VectorXd next_b = b;
        double next_loss = loss;
        for (;;) {
            next_alpha = alpha - step * grad_alpha;
            for (int j = 0; j < k; ++j)
                next_b(j) = soft_threshold(b(j) - step * grad_b(j), lambda * step);
            const double d_alpha = next_alpha - alpha;
            const Eigen::VectorXd d_b = next_b - b;
            next_loss = smooth_loss(p, next_alpha, next_b);
            const double bound = loss + grad_alpha * d_alpha + grad_b.dot(d_b) +
                                 (d_alpha * d_alpha + d_b.squaredNorm()) / (2.0 * step);
            if (next_loss <= bound + 1e-15 * std::max(1.0, std::abs(loss))) break;
            step *= cfg.step.shrink;
            if (step < 1e-300) break;
        }

        const double next_objective = next_loss + lambda * next_b.lpNorm<1>();
        if (next_objective > objective + 1e-12 * std::max(1.0, objective))
            result.monotone = false;

        const double decrease = objective - next_objective;
        const bool no_move = next_alpha == alpha && next_b == b;
        alpha = next_alpha;
        b.swap(next_b);
        objective = next_objective;

        if (no_move || (decrease >= 0.0 && decrease <= cfg.rel_tol * std::max(objective, 1e-300))) {
            result.converged = true;
            ++iter;
            break;
        }
        step *= cfg.step.grow;
    }

    result.params.alpha = alpha;
    result.params.b.assign(b.data(), b.data() + k);
    result.iterations = iter;
    result.objective = objective;
    return result;
}

} // namespace

double rescale_objective(const SearchSpaceSpec& space, const LatencyPredictor& base,
                         const std::vector<MeasurementSample>& samples,
                         const AdaptationParams& params, double lambda) {
    const RescaleProblem p = build_problem(space, base, samples);
    Eigen::Map<const Eigen::VectorXd> b(params.b.data(),
                                        static_cast<Eigen::Index>(params.b.size()));
    if (b.size() != p.z.cols()) throw DimensionMismatch("b length does not match encoding");
    return full_objective(p, params.alpha, b, lambda);
}

SparseRescaleResult solve_sparse_rescale(const SearchSpaceSpec& space,
                                         const LatencyPredictor& base,
                                         const std::vector<MeasurementSample>& samples,
                                         double lambda, const AdaptationConfig& cfg) {
    const RescaleProblem p = build_problem(space, base, samples);
    return solve_on_problem(p, lambda, cfg);
}

LambdaTuneResult tune_lambda(const SearchSpaceSpec& space, const LatencyPredictor& base,
                             const std::vector<MeasurementSample>& samples,
                             const AdaptationConfig& cfg, int workers) {
    const int n = static_cast<int>(samples.size());
    if (cfg.validation_count < 2)
        throw TooFewSamples("validation split needs at least 2 samples");
    const int train_count =
        cfg.train_count > 0 ? cfg.train_count : n - cfg.validation_count;
    if (train_count < 2 || train_count + cfg.validation_count > n)
        throw TooFewSamples("have " + std::to_string(n) + " samples, need " +
                            std::to_string(std::max(train_count, 2) + cfg.validation_count));

    Rng rng(mix_seed(cfg.seed, 0x73706c6974ULL)); // split stream
    const std::vector<int> order = sample_indices(n, n, rng);
    std::vector<MeasurementSample> train, validation;
    for (int i = 0; i < train_count; ++i)
        train.push_back(samples[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);
    for (int i = train_count; i < train_count + cfg.validation_count; ++i)
        validation.push_back(samples[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])]);

    const std::vector<double> grid =
        cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid;
    const RescaleProblem problem = build_problem(space, base, train);

    std::vector<ArchEncoding> val_enc;
    std::vector<double> val_actual;
    for (const MeasurementSample& s : validation) {
        val_enc.push_back(encode(space, s.genotype));
        val_actual.push_back(s.latency_ms);
    }

    struct Scored {
        SparseRescaleResult solve;
        double srcc_score = -2.0; // sentinel below any real coefficient
    };
    std::vector<Scored> scored(grid.size());
    parallel_for(static_cast<int>(grid.size()), workers, [&](int gi) {
        Scored& slot = scored[static_cast<std::size_t>(gi)];
        slot.solve = solve_on_problem(problem, grid[static_cast<std::size_t>(gi)], cfg);
        std::vector<double> preds;
        preds.reserve(val_enc.size());
        for (const ArchEncoding& enc : val_enc)
            preds.push_back(adapted_predict(slot.solve.params, base, enc));
        try {
            slot.srcc_score = srcc(preds, val_actual);
        } catch (const DegenerateInput&) {
            // Constant predictions score below every usable lambda.
        }
    });

    int best = -1;
    LambdaTuneResult result;
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        result.all_converged = result.all_converged && scored[gi].solve.converged;
        // >= prefers the larger lambda on exact ties (grid is ascending).
        if (best < 0 || scored[gi].srcc_score >= scored[static_cast<std::size_t>(best)].srcc_score)
            best = static_cast<int>(gi);
    }
    if (scored[static_cast<std::size_t>(best)].srcc_score <= -2.0)
        throw DegenerateInput("every lambda produced constant validation predictions");

    result.lambda = grid[static_cast<std::size_t>(best)];
    result.params = scored[static_cast<std::size_t>(best)].solve.params;
    result.validation_srcc = scored[static_cast<std::size_t>(best)].srcc_score;
    return result;
}

std::string adaptation_to_json(const LambdaTuneResult& result) {
    nlohmann::ordered_json j;
    j["alpha"] = result.params.alpha;
    j["b"] = result.params.b;
    j["lambda"] = result.lambda;
    j["validation_srcc"] = result.validation_srcc;
    return j.dump();
}

LambdaTuneResult adaptation_from_json(const std::string& json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        LambdaTuneResult r;
        r.params.alpha = j.at("alpha").get<double>();
        r.params.b = j.at("b").get<std::vector<double>>();
        r.lambda = j.at("lambda").get<double>();
        r.validation_srcc = j.at("validation_srcc").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("adaptation JSON: ") + e.what());
    }
}

} // namespace proxynas

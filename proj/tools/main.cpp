#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "proxynas/accuracy_model.hpp"
#include "proxynas/adaptation.hpp"
#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/evolution.hpp"
#include "proxynas/latency_model.hpp"
#include "proxynas/pareto.hpp"
#include "proxynas/pipeline.hpp"
#include "proxynas/rank_correlation.hpp"
#include "proxynas/rng.hpp"
#include "proxynas/roofline.hpp"
#include "proxynas/search_space.hpp"
#include "proxynas/svg.hpp"

namespace fs = std::filesystem;
using namespace proxynas;

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string out_dir = ".";
};

std::string slurp(const fs::path& path) { return read_text_file(path.string()); }

void spit(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_text_file(path.string(), text);
}

fs::path resolve(const fs::path& base_dir, const std::string& ref) {
    const fs::path p(ref);
    return p.is_absolute() ? p : base_dir / p;
}

SearchSpaceSpec load_space(const fs::path& path) {
    return space_from_json(slurp(path));
}

/// Latencies of `other` reordered to follow `ref`'s genotype order.
std::vector<double> aligned_latencies(const SearchSpaceSpec& space, const MeasurementSet& ref,
                                      const MeasurementSet& other) {
    std::map<std::uint64_t, double> lookup;
    for (const auto& sample : other.samples)
        lookup[genotype_fingerprint(space, sample.genotype)] = sample.latency_ms;
    std::vector<double> out;
    out.reserve(ref.samples.size());
    for (const auto& sample : ref.samples) {
        const auto it = lookup.find(genotype_fingerprint(space, sample.genotype));
        if (it == lookup.end())
            throw UnknownArchitecture("device '" + other.device_id + "' has no row for " +
                                      genotype_to_json(space, sample.genotype));
        out.push_back(it->second);
    }
    return out;
}

std::vector<Genotype> distinct_samples(const SearchSpaceSpec& space, int count,
                                       std::uint64_t seed) {
    if (static_cast<std::uint64_t>(count) > space_cardinality(space))
        throw DegenerateInput("sample count exceeds the space size");
    Rng rng(seed);
    std::vector<Genotype> out;
    std::map<std::uint64_t, bool> seen;
    while (static_cast<int>(out.size()) < count) {
        Genotype g = random_sample(space, rng.next_u64());
        auto [it, fresh] = seen.emplace(genotype_fingerprint(space, g), true);
        (void)it;
        if (fresh) out.push_back(std::move(g));
    }
    return out;
}

int run_srcc(const GlobalOpts& g, const std::string& space_path, const std::string& a_path,
             const std::string& b_path, int sample_size, int runs) {
    const SearchSpaceSpec space = load_space(space_path);
    const MeasurementSet a = ingest_measurements(space, slurp(a_path));
    const MeasurementSet b = ingest_measurements(space, slurp(b_path));
    std::vector<double> lat_a;
    lat_a.reserve(a.samples.size());
    for (const auto& sample : a.samples) lat_a.push_back(sample.latency_ms);
    const std::vector<double> lat_b = aligned_latencies(space, a, b);

    std::printf("srcc %.6f\n", srcc(lat_a, lat_b));
    if (sample_size > 1) {
        const SrccEstimate est = estimate_srcc(lat_a, lat_b, sample_size, runs, g.seed);
        std::printf("estimate_mean %.6f\nestimate_std %.6f\nsample_size %d\nruns %d\n",
                    est.mean, est.std_dev, est.sample_size, est.runs);
    }
    return 0;
}

int run_matrix(const GlobalOpts& g, const std::string& space_path,
               const std::vector<std::string>& files, double threshold) {
    const SearchSpaceSpec space = load_space(space_path);
    std::vector<MeasurementSet> sets;
    sets.reserve(files.size());
    for (const auto& f : files) sets.push_back(ingest_measurements(space, slurp(f)));

    std::vector<std::string> ids;
    std::vector<std::vector<double>> latencies;
    for (const auto& set : sets) {
        ids.push_back(set.device_id);
        latencies.push_back(aligned_latencies(space, sets.front(), set));
    }
    const SrccMatrix matrix = srcc_matrix(ids, latencies);
    spit(fs::path(g.out_dir) / "srcc_matrix.csv", srcc_matrix_to_csv(matrix));
    std::printf("proxy %s\n", select_proxy(matrix, threshold).c_str());
    return 0;
}

int run_simulate(const GlobalOpts& g, const std::string& device_path,
                 const std::string& space_path, int count, bool enumerate_all) {
    const SearchSpaceSpec space = load_space(space_path);
    const RooflineDevice device = device_from_json(slurp(device_path));
    std::vector<Genotype> genotypes = enumerate_all
                                          ? enumerate_space(space)
                                          : distinct_samples(space, count, g.seed);
    MeasurementSet set;
    set.device_id = device.device_id;
    set.samples.reserve(genotypes.size());
    for (auto& genotype : genotypes)
        set.samples.push_back(
            {genotype, simulate_latency(device, space, genotype)});
    spit(fs::path(g.out_dir) / "measurements.csv", measurements_to_csv(space, set));
    std::printf("wrote %zu measurements for device %s\n", set.samples.size(),
                device.device_id.c_str());
    return 0;
}

int run_family(const GlobalOpts& g, const std::string& spec_path) {
    const fs::path base = fs::path(spec_path).parent_path();
    const FamilySpecFile file = family_spec_from_json(slurp(spec_path));
    SyntheticDeviceFamilySpec spec;
    spec.base = predictor_from_json(slurp(resolve(base, file.base_predictor_path)));
    spec.member_count = file.member_count;
    spec.global_scale_lo = file.global_scale_lo;
    spec.global_scale_hi = file.global_scale_hi;
    spec.perturb_fraction = file.perturb_fraction;
    spec.perturb_lo = file.perturb_lo;
    spec.perturb_hi = file.perturb_hi;
    spec.seed = file.seed;
    const std::vector<LatencyPredictor> members = generate_family(spec);
    for (std::size_t i = 0; i < members.size(); ++i)
        spit(fs::path(g.out_dir) / ("family_member_" + std::to_string(i) + ".json"),
             predictor_to_json(members[i]));
    std::printf("wrote %zu family predictors\n", members.size());
    return 0;
}

int run_fit(const GlobalOpts& g, const std::string& space_path,
            const std::string& measurements_path, double ridge, int holdout) {
    const SearchSpaceSpec space = load_space(space_path);
    const MeasurementSet set = ingest_measurements(space, slurp(measurements_path));
    std::vector<MeasurementSample> train = set.samples;
    std::vector<MeasurementSample> eval;
    if (holdout > 0) {
        if (holdout >= static_cast<int>(train.size()))
            throw TooFewSamples("holdout leaves no training rows");
        eval.assign(train.end() - holdout, train.end());
        train.resize(train.size() - static_cast<std::size_t>(holdout));
    }
    const LatencyPredictor predictor = fit(space, train, ridge);
    spit(fs::path(g.out_dir) / "predictor.json", predictor_to_json(predictor));
    std::printf("fit %zu weights from %zu rows\n", predictor.weights.size(), train.size());
    if (!eval.empty()) {
        const EvalReport report = evaluate(predictor, space, eval);
        std::printf("holdout_rmse_ms %.6f\nholdout_srcc %.6f\n", report.rmse_ms,
                    report.srcc_vs_actual);
    }
    return 0;
}

int run_adapt(const GlobalOpts& g, const std::string& space_path,
              const std::string& proxy_path, const std::string& measurements_path,
              int validation, int train_count, const std::vector<double>& lambda_grid) {
    const SearchSpaceSpec space = load_space(space_path);
    const LatencyPredictor proxy = predictor_from_json(slurp(proxy_path));
    const MeasurementSet set = ingest_measurements(space, slurp(measurements_path));
    AdaptationConfig cfg;
    cfg.lambda_grid = lambda_grid;
    cfg.validation_count = validation;
    cfg.train_count = train_count;
    cfg.seed = g.seed;
    const LambdaTuneResult result = tune_lambda(space, proxy, set.samples, cfg, g.workers);
    spit(fs::path(g.out_dir) / "adaptation.json", adaptation_to_json(result));
    std::printf("lambda %.6g\nvalidation_srcc %.6f\nnonzero %d\n", result.lambda,
                result.validation_srcc, result.params.nonzero_count());
    return result.all_converged ? 0 : 3;
}

AccuracyPredictor make_accuracy(const SearchSpaceSpec& space, const std::string& table_path,
                                std::uint64_t seed) {
    if (!table_path.empty())
        return AccuracyPredictor::from_table_csv(space, slurp(table_path));
    SyntheticAccuracyConfig cfg;
    cfg.seed = seed;
    return AccuracyPredictor::synthetic(space, cfg);
}

int run_search(const GlobalOpts& g, const std::string& space_path,
               const std::string& predictor_path, const std::string& device_path,
               const std::string& accuracy_table, EvoConfig evo,
               std::vector<double> grid, bool constrained) {
    const SearchSpaceSpec space = load_space(space_path);
    LatencyFn latency;
    LatencyPredictor predictor;
    RooflineDevice device;
    if (!predictor_path.empty()) {
        predictor = predictor_from_json(slurp(predictor_path));
        latency = [&predictor, &space](const Genotype& genotype) {
            return predict_genotype(predictor, space, genotype);
        };
    } else {
        device = device_from_json(slurp(device_path));
        latency = [&device, &space](const Genotype& genotype) {
            return simulate_latency(device, space, genotype);
        };
    }
    const AccuracyPredictor acc = make_accuracy(space, accuracy_table, g.seed);
    evo.mode = constrained ? EvoMode::Constrained : EvoMode::Scalarized;
    evo.seed = mix_seed(g.seed, evo.seed);
    if (grid.empty()) grid = default_tradeoff_grid();
    const ParetoSet front = sweep_tradeoff(space, acc, latency, evo, grid, g.workers);

    // background scatter for the plot
    const int scatter = static_cast<int>(
        std::min<std::uint64_t>(300, space_cardinality(space)));
    std::vector<ScoredArch> background(static_cast<std::size_t>(scatter));
    const std::vector<Genotype> sampled =
        distinct_samples(space, scatter, mix_seed(g.seed, 0x706c6f74ULL));
    for (int i = 0; i < scatter; ++i) {
        ScoredArch& arch = background[static_cast<std::size_t>(i)];
        arch.genotype = sampled[static_cast<std::size_t>(i)];
        arch.accuracy = acc.predict_accuracy(space, arch.genotype);
        arch.latency_ms = latency(arch.genotype);
    }

    spit(fs::path(g.out_dir) / "front.csv", front_to_csv(space, front));
    SvgPlotConfig plot;
    plot.title = "search front: " + space.id;
    spit(fs::path(g.out_dir) / "front.svg", front_svg(background, front, plot));
    std::printf("front_size %zu\n", front.members.size());
    return 0;
}

int run_pipeline(const GlobalOpts& g, const std::string& config_path) {
    const fs::path base = fs::path(config_path).parent_path();
    const auto j = nlohmann::json::parse(slurp(config_path));

    const SearchSpaceSpec space = load_space(resolve(base, j.at("space").get<std::string>()));

    ProxyState state;
    state.space = space;
    state.proxy_device_id = j.value("proxy_device_id", std::string("proxy"));
    state.proxy_predictor =
        predictor_from_json(slurp(resolve(base, j.at("proxy_predictor").get<std::string>())));

    PipelineConfig cfg;
    cfg.seed = j.value("seed", std::uint64_t{0});
    if (g.seed_given) cfg.seed = g.seed;

    std::string accuracy_table;
    std::uint64_t accuracy_seed = cfg.seed;
    if (j.contains("accuracy")) {
        const auto& ja = j.at("accuracy");
        const std::string kind = ja.value("kind", std::string("synthetic"));
        if (kind == "table") {
            accuracy_table = resolve(base, ja.at("path").get<std::string>()).string();
        } else if (kind == "synthetic") {
            accuracy_seed = ja.value("seed", accuracy_seed);
        } else {
            throw ParseError("unknown accuracy kind '" + kind + "'");
        }
        if (kind == "synthetic") {
            SyntheticAccuracyConfig acfg;
            acfg.a_max = ja.value("a_max", acfg.a_max);
            acfg.f0 = ja.value("f0", acfg.f0);
            acfg.jitter_sigma = ja.value("jitter_sigma", acfg.jitter_sigma);
            acfg.seed = accuracy_seed;
            state.acc_pred = AccuracyPredictor::synthetic(space, acfg);
        }
    }
    if (!accuracy_table.empty())
        state.acc_pred = AccuracyPredictor::from_table_csv(space, slurp(accuracy_table));
    else if (!j.contains("accuracy"))
        state.acc_pred = make_accuracy(space, "", cfg.seed);

    if (j.contains("proxy_front"))
        state.proxy_pareto =
            front_from_csv(space, slurp(resolve(base, j.at("proxy_front").get<std::string>())));

    const auto& jt = j.at("target");
    const std::string target_kind = jt.at("kind").get<std::string>();
    TargetOracle target = [&]() -> TargetOracle {
        if (target_kind == "simulator") {
            const RooflineDevice device =
                device_from_json(slurp(resolve(base, jt.at("device").get<std::string>())));
            return TargetOracle::from_simulator(device, space);
        }
        if (target_kind == "file") {
            const MeasurementSet set =
                ingest_measurements(space, slurp(resolve(base, jt.at("path").get<std::string>())));
            return TargetOracle::from_table(space, set);
        }
        if (target_kind == "predictor") {
            const LatencyPredictor predictor =
                predictor_from_json(slurp(resolve(base, jt.at("path").get<std::string>())));
            return TargetOracle::from_predictor(jt.value("device_id", std::string("target")),
                                                space, predictor);
        }
        throw ParseError("unknown target kind '" + target_kind + "'");
    }();

    if (j.contains("pipeline")) {
        const auto& jp = j.at("pipeline");
        cfg.srcc_threshold = jp.value("srcc_threshold", cfg.srcc_threshold);
        cfg.initial_sample_count = jp.value("initial_sample_count", cfg.initial_sample_count);
        cfg.validation_count = jp.value("validation_count", cfg.validation_count);
        cfg.adaptation_budget = jp.value("adaptation_budget", cfg.adaptation_budget);
        cfg.incremental_batch = jp.value("incremental_batch", cfg.incremental_batch);
        cfg.epsilon_accuracy = jp.value("epsilon_accuracy", cfg.epsilon_accuracy);
        const std::string mode = jp.value("reuse_mode", std::string("research_on_proxy"));
        if (mode == "reuse_set") cfg.reuse_mode = ReuseMode::ReuseSet;
        else if (mode == "research_on_proxy") cfg.reuse_mode = ReuseMode::ResearchOnProxy;
        else throw ParseError("unknown reuse_mode '" + mode + "'");
    }
    if (j.contains("evo")) {
        const auto& je = j.at("evo");
        cfg.evo.population = je.value("population", cfg.evo.population);
        cfg.evo.parent_ratio = je.value("parent_ratio", cfg.evo.parent_ratio);
        cfg.evo.mutation_prob = je.value("mutation_prob", cfg.evo.mutation_prob);
        cfg.evo.mutation_ratio = je.value("mutation_ratio", cfg.evo.mutation_ratio);
        cfg.evo.generations = je.value("generations", cfg.evo.generations);
        cfg.evo.normalize_latency = je.value("normalize_latency", cfg.evo.normalize_latency);
        cfg.evo.normalize_scale = je.value("normalize_scale", cfg.evo.normalize_scale);
        cfg.evo.latency_limit_ms = je.value("latency_limit_ms", cfg.evo.latency_limit_ms);
        cfg.evo.tradeoff_t = je.value("tradeoff_t", cfg.evo.tradeoff_t);
        cfg.evo.seed = je.value("seed", cfg.evo.seed);
        const std::string mode = je.value("mode", std::string("scalarized"));
        if (mode == "constrained") cfg.evo.mode = EvoMode::Constrained;
        else if (mode == "scalarized") cfg.evo.mode = EvoMode::Scalarized;
        else throw ParseError("unknown evo mode '" + mode + "'");
    }
    if (j.contains("adaptation")) {
        const auto& ja = j.at("adaptation");
        if (ja.contains("lambda_grid"))
            cfg.adaptation.lambda_grid = ja.at("lambda_grid").get<std::vector<double>>();
        cfg.adaptation.rel_tol = ja.value("rel_tol", cfg.adaptation.rel_tol);
        cfg.adaptation.max_iter = ja.value("max_iter", cfg.adaptation.max_iter);
        cfg.adaptation.train_count = ja.value("train_count", cfg.adaptation.train_count);
    }
    if (j.contains("t_grid")) cfg.t_grid = j.at("t_grid").get<std::vector<double>>();

    const PipelineResult result = one_proxy_nas(state, target, cfg, g.workers);

    const fs::path out(g.out_dir);
    spit(out / "front.csv", front_to_csv(space, result.pareto));
    SvgPlotConfig plot;
    plot.title = "measured front: " + target.device_id();
    spit(out / "front.svg", front_svg(result.candidates.members, result.pareto, plot));
    spit(out / "report.json", report_to_json(result.report));
    spit(out / "srcc_trace.csv", srcc_trace_to_csv(result.report));

    std::printf("branch %s\ninitial_srcc %.6f\nfront_size %d\ntotal_measurements %d\n",
                result.report.branch.c_str(), result.report.initial_check.srcc,
                result.report.front_size, result.report.total_measurements);
    if (result.report.budget_exhausted) std::printf("budget_exhausted true\n");
    return result.report.budget_exhausted ? 3 : 0;
}

int run_ingest(const std::string& space_path, const std::vector<std::string>& files) {
    const SearchSpaceSpec space = load_space(space_path);
    for (const auto& f : files) {
        const MeasurementSet set = ingest_measurements(space, slurp(f));
        std::printf("%s: %zu rows, device %s\n", f.c_str(), set.samples.size(),
                    set.device_id.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"one-proxy hardware-aware architecture search toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    const auto seed_opt = app.add_option("--seed", g.seed, "global random seed");
    app.add_option("--workers", g.workers, "worker thread count")
        ->check(CLI::PositiveNumber);
    app.add_option("--out-dir", g.out_dir, "output directory");

    int exit_code = 0;

    // srcc
    auto* srcc_cmd = app.add_subcommand("srcc", "rank correlation of two measurement files");
    std::string srcc_space, srcc_a, srcc_b;
    int srcc_sample_size = 0, srcc_runs = 100;
    srcc_cmd->add_option("--space", srcc_space, "search space JSON")->required();
    srcc_cmd->add_option("a", srcc_a, "first measurement CSV")->required();
    srcc_cmd->add_option("b", srcc_b, "second measurement CSV")->required();
    srcc_cmd->add_option("--sample-size", srcc_sample_size,
                         "subsample size for the Monte-Carlo estimate");
    srcc_cmd->add_option("--runs", srcc_runs, "Monte-Carlo runs");
    srcc_cmd->callback([&] {
        exit_code = run_srcc(g, srcc_space, srcc_a, srcc_b, srcc_sample_size, srcc_runs);
    });

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "pairwise SRCC matrix across devices");
    std::string matrix_space;
    std::vector<std::string> matrix_files;
    double matrix_threshold = 0.9;
    matrix_cmd->add_option("--space", matrix_space, "search space JSON")->required();
    matrix_cmd->add_option("files", matrix_files, "measurement CSVs, one per device")
        ->required()
        ->expected(-2);
    matrix_cmd->add_option("--threshold", matrix_threshold, "strong-correlation threshold");
    matrix_cmd->callback(
        [&] { exit_code = run_matrix(g, matrix_space, matrix_files, matrix_threshold); });

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "roofline latencies for sampled genotypes");
    std::string sim_device, sim_space;
    int sim_count = 100;
    bool sim_all = false;
    sim_cmd->add_option("--device", sim_device, "device profile JSON")->required();
    sim_cmd->add_option("--space", sim_space, "search space JSON")->required();
    sim_cmd->add_option("--count", sim_count, "distinct genotypes to sample");
    sim_cmd->add_flag("--enumerate", sim_all, "simulate every genotype in the space");
    sim_cmd->callback(
        [&] { exit_code = run_simulate(g, sim_device, sim_space, sim_count, sim_all); });

    // family
    auto* family_cmd = app.add_subcommand("family", "synthetic device family predictors");
    std::string family_spec;
    family_cmd->add_option("spec", family_spec, "family spec JSON")->required();
    family_cmd->callback([&] { exit_code = run_family(g, family_spec); });

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "least-squares latency predictor");
    std::string fit_space, fit_measurements;
    double fit_ridge = 1e-8;
    int fit_holdout = 0;
    fit_cmd->add_option("--space", fit_space, "search space JSON")->required();
    fit_cmd->add_option("--measurements", fit_measurements, "measurement CSV")->required();
    fit_cmd->add_option("--ridge", fit_ridge, "ridge regularizer");
    fit_cmd->add_option("--holdout", fit_holdout, "rows held out for evaluation");
    fit_cmd->callback(
        [&] { exit_code = run_fit(g, fit_space, fit_measurements, fit_ridge, fit_holdout); });

    // adapt
    auto* adapt_cmd = app.add_subcommand("adapt", "sparse rescaling onto a new device");
    std::string adapt_space, adapt_proxy, adapt_measurements;
    int adapt_validation = 20, adapt_train = 0;
    std::vector<double> adapt_lambda_grid;
    adapt_cmd->add_option("--space", adapt_space, "search space JSON")->required();
    adapt_cmd->add_option("--proxy", adapt_proxy, "proxy predictor JSON")->required();
    adapt_cmd->add_option("--measurements", adapt_measurements, "target measurement CSV")
        ->required();
    adapt_cmd->add_option("--validation", adapt_validation, "validation sample count");
    adapt_cmd->add_option("--train", adapt_train, "training sample count (0: the rest)");
    adapt_cmd->add_option("--lambda-grid", adapt_lambda_grid, "penalty grid values");
    adapt_cmd->callback([&] {
        exit_code = run_adapt(g, adapt_space, adapt_proxy, adapt_measurements,
                              adapt_validation, adapt_train, adapt_lambda_grid);
    });

    // search
    auto* search_cmd = app.add_subcommand("search", "evolutionary tradeoff sweep");
    std::string search_space_path, search_predictor, search_device, search_accuracy;
    EvoConfig search_evo;
    std::vector<double> search_grid;
    bool search_constrained = false;
    search_cmd->add_option("--space", search_space_path, "search space JSON")->required();
    auto* pred_opt =
        search_cmd->add_option("--predictor", search_predictor, "latency predictor JSON");
    search_cmd->add_option("--device", search_device, "roofline device JSON")
        ->excludes(pred_opt);
    search_cmd->add_option("--accuracy-table", search_accuracy,
                           "accuracy CSV (default: synthetic)");
    search_cmd->add_option("--population", search_evo.population, "population size");
    search_cmd->add_option("--generations", search_evo.generations, "generation count");
    search_cmd->add_option("--parent-ratio", search_evo.parent_ratio, "surviving fraction");
    search_cmd->add_option("--mutation-prob", search_evo.mutation_prob,
                           "mutation probability");
    search_cmd->add_option("--mutation-ratio", search_evo.mutation_ratio,
                           "children eligible to mutate");
    search_cmd->add_flag("--normalize-latency", search_evo.normalize_latency,
                         "normalize latency inside the fitness");
    search_cmd->add_option("--grid", search_grid,
                           "tradeoff grid (latency limits when constrained)");
    search_cmd->add_flag("--constrained", search_constrained,
                         "latency-constrained mode instead of scalarized");
    search_cmd->callback([&] {
        if (search_predictor.empty() && search_device.empty())
            throw CLI::ValidationError("search", "need --predictor or --device");
        exit_code = run_search(g, search_space_path, search_predictor, search_device,
                               search_accuracy, search_evo, search_grid, search_constrained);
    });

    // pipeline
    auto* pipeline_cmd = app.add_subcommand("pipeline", "full one-proxy search run");
    std::string pipeline_config;
    pipeline_cmd->add_option("config", pipeline_config, "run-config JSON")->required();
    pipeline_cmd->callback([&] {
        g.seed_given = seed_opt->count() > 0;
        exit_code = run_pipeline(g, pipeline_config);
    });

    // ingest
    auto* ingest_cmd = app.add_subcommand("ingest", "validate measurement files");
    std::string ingest_space;
    std::vector<std::string> ingest_files;
    ingest_cmd->add_option("--space", ingest_space, "search space JSON")->required();
    ingest_cmd->add_option("files", ingest_files, "measurement CSVs")->required();
    ingest_cmd->callback([&] { exit_code = run_ingest(ingest_space, ingest_files); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const NonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const BudgetExhausted& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}

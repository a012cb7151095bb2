#include "proxynas/latency_model.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <json.hpp>

#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/rank_correlation.hpp"

namespace proxynas {

double predict(const LatencyPredictor& predictor, const ArchEncoding& encoding) {
    if (predictor.weights.size() != encoding.features.size())
        throw DimensionMismatch("predictor has " + std::to_string(predictor.weights.size()) +
                                " weights, encoding has " +
                                std::to_string(encoding.features.size()) + " features");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictor.weights.size(); ++i)
        sum += predictor.weights[i] * encoding.features[i];
    return sum;
}

double predict_genotype(const LatencyPredictor& predictor, const SearchSpaceSpec& space,
                        const Genotype& g) {
    return predict(predictor, encode(space, g));
}

LatencyPredictor fit(const SearchSpaceSpec& space,
                     const std::vector<MeasurementSample>& samples, double ridge) {
    if (samples.size() < 2)
        throw TooFewSamples("fit needs at least 2 samples, got " +
                            std::to_string(samples.size()));
    if (ridge < 0.0) throw DegenerateDesign("ridge must be >= 0");

    const int n = static_cast<int>(samples.size());
    const int k = space.encoding_length();
    Eigen::MatrixXd x(n, k);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const ArchEncoding enc = encode(space, samples[static_cast<std::size_t>(i)].genotype);
        for (int j = 0; j < k; ++j) x(i, j) = enc.features[static_cast<std::size_t>(j)];
        y(i) = samples[static_cast<std::size_t>(i)].latency_ms;
    }

    Eigen::MatrixXd normal = x.transpose() * x;
    normal.diagonal().array() += ridge;
    const Eigen::VectorXd rhs = x.transpose() * y;

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success)
        throw DegenerateDesign("normal equations are not positive semidefinite");
    const Eigen::VectorXd w = ldlt.solve(rhs);
    if (!w.allFinite())
        throw DegenerateDesign("singular design; increase ridge or add samples");

    LatencyPredictor predictor;
    predictor.space_id = space.id;
    predictor.weights.assign(w.data(), w.data() + k);
    return predictor;
}

EvalReport evaluate(const LatencyPredictor& predictor, const SearchSpaceSpec& space,
                    const std::vector<MeasurementSample>& holdout) {
    if (holdout.size() < 3)
        throw TooFewSamples("evaluate needs at least 3 samples, got " +
                            std::to_string(holdout.size()));
    std::vector<double> predicted, actual;
    predicted.reserve(holdout.size());
    actual.reserve(holdout.size());
    double sq_sum = 0.0;
    for (const MeasurementSample& s : holdout) {
        const double p = predict_genotype(predictor, space, s.genotype);
        predicted.push_back(p);
        actual.push_back(s.latency_ms);
        sq_sum += (p - s.latency_ms) * (p - s.latency_ms);
    }
    EvalReport report;
    report.rmse_ms = std::sqrt(sq_sum / static_cast<double>(holdout.size()));
    report.srcc_vs_actual = srcc(predicted, actual);
    return report;
}

std::string predictor_to_json(const LatencyPredictor& predictor) {
    nlohmann::ordered_json j;
    j["space_id"] = predictor.space_id;
    j["weights"] = predictor.weights;
    return j.dump();
}

LatencyPredictor predictor_from_json(const std::string& json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        LatencyPredictor p;
        p.space_id = j.at("space_id").get<std::string>();
        p.weights = j.at("weights").get<std::vector<double>>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("predictor JSON: ") + e.what());
    }
}

std::string measurements_to_csv(const SearchSpaceSpec& space, const MeasurementSet& set) {
    std::string out = "device_id,genotype_json,latency_ms\n";
    for (const MeasurementSample& s : set.samples) {
        out += csv::join_row({set.device_id, genotype_to_json(space, s.genotype),
                              csv::format_double(s.latency_ms)});
        out += '\n';
    }
    return out;
}

MeasurementSet ingest_measurements(const SearchSpaceSpec& space, const std::string& csv_text) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) throw ParseError("row 1: missing header");
    if (rows[0] != csv::Row{"device_id", "genotype_json", "latency_ms"})
        throw ParseError("row 1: header must be device_id,genotype_json,latency_ms");

    MeasurementSet set;
    std::set<std::uint64_t> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::string row_label = "row " + std::to_string(r + 1);
        const csv::Row& row = rows[r];
        if (row.size() != 3) throw ParseError(row_label + ": expected 3 fields");
        if (set.samples.empty()) {
            set.device_id = row[0];
        } else if (row[0] != set.device_id) {
            throw ParseError(row_label + ": mixed device ids (" + row[0] + " vs " +
                             set.device_id + ")");
        }
        MeasurementSample sample;
        try {
            sample.genotype = genotype_from_json(space, row[1]);
        } catch (const Error& e) {
            throw ParseError(row_label + ": " + e.what());
        }
        try {
            std::size_t pos = 0;
            sample.latency_ms = std::stod(row[2], &pos);
            if (pos != row[2].size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ParseError(row_label + ": latency is not a number: " + row[2]);
        }
        if (!(sample.latency_ms > 0.0) || !std::isfinite(sample.latency_ms))
            throw NonpositiveLatency(row_label + ": latency " + row[2]);
        const std::uint64_t fp = genotype_fingerprint(space, sample.genotype);
        if (!seen.insert(fp).second)
            throw DuplicateGenotype(row_label + ": genotype repeats earlier row");
        set.samples.push_back(std::move(sample));
    }
    return set;
}

} // namespace proxynas

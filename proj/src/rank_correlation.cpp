#include "proxynas/rank_correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "proxynas/csv.hpp"
#include "proxynas/errors.hpp"
#include "proxynas/rng.hpp"

namespace proxynas {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // Positions i..j share the same value; assign their average rank.
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

double srcc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw LengthMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    const std::size_t n = a.size();
    if (n < 2) throw DegenerateInput("need at least 2 values");

    const std::vector<double> ra = average_ranks(a);
    const std::vector<double> rb = average_ranks(b);

    // Identical rank vectors correlate exactly; returning 1 here keeps the
    // perfect-agreement case free of rounding.
    if (ra == rb) {
        bool constant = true;
        for (std::size_t i = 1; i < n; ++i)
            if (ra[i] != ra[0]) { constant = false; break; }
        if (constant) throw DegenerateInput("constant list");
        return 1.0;
    }

    const double mean = 0.5 * (static_cast<double>(n) + 1.0);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = ra[i] - mean;
        const double db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a == 0.0 || var_b == 0.0) throw DegenerateInput("constant list");
    const double r = cov / std::sqrt(var_a * var_b);
    return std::clamp(r, -1.0, 1.0);
}

SrccEstimate estimate_srcc(std::span<const double> a, std::span<const double> b,
                           int sample_size, int runs, std::uint64_t seed) {
    if (a.size() != b.size())
        throw LengthMismatch(std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    const int n = static_cast<int>(a.size());
    if (sample_size < 2 || sample_size > n)
        throw DegenerateInput("sample_size must be in [2, n]");
    if (runs < 1) throw DegenerateInput("runs must be >= 1");

    constexpr int kMaxRetries = 100;
    std::vector<double> results(static_cast<std::size_t>(runs), 0.0);
    std::vector<double> sub_a(static_cast<std::size_t>(sample_size));
    std::vector<double> sub_b(static_cast<std::size_t>(sample_size));
    for (int r = 0; r < runs; ++r) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        bool done = false;
        for (int attempt = 0; attempt < kMaxRetries && !done; ++attempt) {
            const std::vector<int> idx = sample_indices(n, sample_size, rng);
            for (int i = 0; i < sample_size; ++i) {
                sub_a[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(idx[i])];
                sub_b[static_cast<std::size_t>(i)] = b[static_cast<std::size_t>(idx[i])];
            }
            try {
                results[static_cast<std::size_t>(r)] = srcc(sub_a, sub_b);
                done = true;
            } catch (const DegenerateInput&) {
                // Constant subsample: redraw.
            }
        }
        if (!done)
            throw DegenerateInput("run " + std::to_string(r) + ": subsample stayed constant after " +
                                  std::to_string(kMaxRetries) + " redraws");
    }

    SrccEstimate est;
    est.sample_size = sample_size;
    est.runs = runs;
    double sum = 0.0;
    for (const double v : results) sum += v;
    est.mean = sum / static_cast<double>(runs);
    double sq = 0.0;
    for (const double v : results) sq += (v - est.mean) * (v - est.mean);
    est.std_dev = std::sqrt(sq / static_cast<double>(runs));
    return est;
}

SrccMatrix srcc_matrix(const std::vector<std::string>& device_ids,
                       const std::vector<std::vector<double>>& latencies) {
    if (device_ids.size() != latencies.size())
        throw LengthMismatch("device_ids vs latency lists");
    if (device_ids.empty()) throw EmptyInput("no devices");
    if (device_ids.size() < 2) throw DegenerateInput("an SRCC matrix needs at least two devices");
    const std::size_t m = device_ids.size();
    for (std::size_t i = 1; i < m; ++i) {
        if (latencies[i].size() != latencies[0].size())
            throw LengthMismatch("latency list lengths differ across devices");
    }

    SrccMatrix matrix;
    matrix.device_ids = device_ids;
    matrix.values.assign(m, std::vector<double>(m, 1.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double r = srcc(latencies[i], latencies[j]);
            matrix.values[i][j] = r;
            matrix.values[j][i] = r;
        }
    }
    return matrix;
}

std::string srcc_matrix_to_csv(const SrccMatrix& matrix) {
    csv::Row header{"device_id"};
    for (const std::string& id : matrix.device_ids) header.push_back(id);
    std::string out = csv::join_row(header) + "\n";
    for (std::size_t i = 0; i < matrix.device_ids.size(); ++i) {
        csv::Row row{matrix.device_ids[i]};
        for (const double v : matrix.values[i]) row.push_back(csv::format_double(v));
        out += csv::join_row(row) + "\n";
    }
    return out;
}

std::string select_proxy(const SrccMatrix& matrix, double threshold) {
    const std::size_t m = matrix.device_ids.size();
    if (m == 0) throw EmptyInput("empty matrix");

    std::size_t best = 0;
    int best_count = -1;
    double best_mean = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        int count = 0;
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            if (matrix.values[i][j] >= threshold) ++count;
            sum += matrix.values[i][j];
        }
        const double mean = m > 1 ? sum / static_cast<double>(m - 1) : 0.0;
        const bool better =
            count > best_count ||
            (count == best_count && mean > best_mean) ||
            (count == best_count && mean == best_mean &&
             matrix.device_ids[i] < matrix.device_ids[best]);
        if (better) {
            best = i;
            best_count = count;
            best_mean = mean;
        }
    }
    return matrix.device_ids[best];
}

} // namespace proxynas

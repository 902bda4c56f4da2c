// Acceptance suite: exercises the eight project-level acceptance checks at
// full desk scale and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gmem/gmem.hpp"
#include "support/oracle.hpp"

using namespace gmem;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
    if (!condition)
        throw CheckFailure(message);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double value, int precision = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    return buf;
}

// The shared desk-scale fixture: 298 patterns of 116 x 116 cells with
// densities in [0.475, 0.507], seed 42, stored at default hyperparameters.
struct Fixture {
    PatternSet set;
    MemoryNet net{116, 116};
    double train_seconds = 0.0;

    Fixture() {
        CorpusSpec spec;
        spec.count = 298;
        spec.width = 116;
        spec.height = 116;
        spec.density_lo = 0.475;
        spec.density_hi = 0.507;
        spec.seed = 42;
        set = generate_corpus(spec);
        const auto start = std::chrono::steady_clock::now();
        net.store_all(set);
        train_seconds = seconds_since(start);
    }
};

}  // namespace

int main() {
    Fixture fx;
    const double grid[] = {0.05, 0.1, 0.15, 0.207, 0.25, 0.5, 1.0};

    std::vector<std::pair<std::string, std::function<std::string()>>> criteria;

    criteria.emplace_back("one-step training exactness", [&] {
        const auto start = std::chrono::steady_clock::now();
        for (std::size_t p = 0; p < fx.set.size(); ++p)
            require(fx.net.reconstruct(p) == fx.set[p],
                    "pattern " + std::to_string(p) + " not reconstructed bit-exactly");
        const double elapsed = fx.train_seconds + seconds_since(start);
        require(elapsed < 5.0, "took " + fmt(elapsed, 2) + " s, limit 5 s");
        return "298/298 bit-exact, train+verify " + fmt(elapsed, 2) + " s (limit 5 s)";
    });

    criteria.emplace_back("perfect full recall", [&] {
        const auto start = std::chrono::steady_clock::now();
        const ExperimentReport report = run_full_recall(fx.net, fx.set);
        const double elapsed = seconds_since(start);
        require(report.summary.accuracy == 1.0,
                "accuracy " + fmt(report.summary.accuracy));
        require(elapsed < 10.0, "took " + fmt(elapsed, 2) + " s, limit 10 s");
        return "accuracy 1.000000 over 298 probes, " + fmt(elapsed, 2) + " s (limit 10 s)";
    });

    criteria.emplace_back("winning-score range and closed form", [&] {
        const ExperimentReport report = run_full_recall(fx.net, fx.set);
        for (const ProbeOutcome& row : report.rows) {
            require(row.score >= 0.7125 && row.score <= 0.7605,
                    "score " + fmt(row.score) + " outside [0.7125, 0.7605]");
            const double closed = 1.5 * density(fx.set[row.pattern]);
            require(std::abs(row.score - closed) <= 1e-12,
                    "score differs from 1.5 * density by " +
                        fmt(std::abs(row.score - closed), 16));
        }
        return "all scores in [" + fmt(report.summary.min_score) + ", " +
               fmt(report.summary.max_score) + "] subset of [0.712500, 0.760500], " +
               "closed form within 1e-12";
    });

    criteria.emplace_back("partial recall with a failure point", [&] {
        const ExperimentReport report =
            run_occlusion_sweep(fx.net, fx.set, grid, Corner::BottomRight,
                                NormMode::ByPresented);

        double keep25_accuracy = -1.0;
        for (const auto& [fraction, accuracy] : report.summary.fraction_accuracy) {
            if (fraction == 0.25)
                keep25_accuracy = accuracy;
        }
        require(keep25_accuracy >= 0.99,
                "keep 0.25 accuracy " + fmt(keep25_accuracy) + " below 0.99");

        const RegionSpec quarter = corner_region(116, 116, 0.25, Corner::BottomRight);
        for (const ProbeOutcome& row : report.rows) {
            if (row.fraction != 0.25 || !row.correct)
                continue;
            const MaskedPattern probe = apply_mask(fx.set[row.pattern], quarter);
            std::size_t ones = 0;
            for (std::size_t j = 0; j < probe.presented.size(); ++j)
                ones += probe.presented[j] && probe.pattern.bits[j];
            const double closed =
                1.5 * (static_cast<double>(ones) /
                       static_cast<double>(probe.presented_count()));
            require(std::abs(row.score - closed) <= 1e-12,
                    "keep-0.25 score differs from the regional closed form");
        }

        std::ostringstream accuracies;
        for (const auto& [fraction, accuracy] : report.summary.fraction_accuracy)
            accuracies << " " << fraction << ":" << fmt(accuracy, 4);
        require(report.summary.failure_fraction.has_value(),
                "no recall error at any tested keep-fraction (accuracy per fraction:" +
                    accuracies.str() + ")");
        return "keep 0.25 accuracy " + fmt(keep25_accuracy) +
               ", failure point at keep " + fmt(*report.summary.failure_fraction, 3);
    });

    criteria.emplace_back("unknown patterns are rejected", [&] {
        std::size_t rejected = 0;
        double score_sum = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const BitPattern unknown = random_pattern(116, 116, 0.5, 1000 + seed);
            const ExperimentReport report = run_unknown_probe(fx.net, fx.set, unknown);
            const ProbeOutcome& row = report.rows.front();
            rejected += row.accepted ? 0 : 1;
            score_sum += row.score;
        }
        const double mean = score_sum / 100.0;
        require(rejected == 100,
                std::to_string(rejected) + "/100 rejected, expected 100/100");
        require(std::abs(mean - 0.375) <= 0.05,
                "mean max score " + fmt(mean) + " outside 0.375 +/- 0.05");
        return "100/100 rejected below tau 0.70, mean max score " + fmt(mean);
    });

    criteria.emplace_back("recall equals the brute-force overlap oracle", [&] {
        std::mt19937_64 rng(424242);
        for (int trial = 0; trial < 100; ++trial) {
            const int w = 1 + static_cast<int>(rng() % 8);
            const int h = 1 + static_cast<int>(rng() % 8);
            const std::size_t n = 1 + rng() % 16;
            std::vector<BitPattern> patterns;
            for (std::size_t i = 0; i < n; ++i)
                patterns.push_back(
                    random_pattern(w, h, (rng() % 101) / 100.0, rng()));
            MemoryNet net(w, h);
            for (const BitPattern& p : patterns)
                net.store(p);

            const BitPattern probe_bits = random_pattern(w, h, (rng() % 101) / 100.0, rng());
            MaskedPattern probe = present_all(probe_bits);
            std::size_t presented = probe.presented.size();
            for (auto& cell : probe.presented) {
                if (presented > 1 && rng() % 2 == 0) {
                    cell = 0;
                    --presented;
                }
            }

            const auto [expected, overlap] = testing::brute_force_winner(patterns, probe);
            require(net.recall(probe).winner == expected,
                    "winner differs from the oracle at trial " + std::to_string(trial));
        }
        return "100/100 instances match (N <= 16, R <= 64, random masks)";
    });

    criteria.emplace_back("weight container size and round-trip", [&] {
        require(matrix_payload_size(298, 13456, WeightDType::F16) == 8019776,
                "f16 matrix payload is not 8019776 bytes");
        std::mt19937_64 rng(515151);
        for (int trial = 0; trial < 20; ++trial) {
            const int w = 1 + static_cast<int>(rng() % 12);
            const int h = 1 + static_cast<int>(rng() % 12);
            HyperParams params;
            params.eps_v = 0.25 + (rng() % 200) / 100.0;
            params.theta = 0.25 + (rng() % 200) / 100.0;
            params.tau = 0.1 + (rng() % 90) / 100.0;
            MemoryNet net(w, h, params);
            const std::size_t n = 1 + rng() % 16;
            for (std::size_t i = 0; i < n; ++i)
                net.store(random_pattern(w, h, (rng() % 101) / 100.0, rng()));

            const MemoryNet back = load_weights(save_weights(net, WeightDType::F64));
            require(back.pattern_weights() == net.pattern_weights() &&
                        back.recall_weights() == net.recall_weights() &&
                        back.width() == net.width() && back.height() == net.height() &&
                        back.params().eps_w == net.params().eps_w &&
                        back.params().eps_v == net.params().eps_v &&
                        back.params().theta == net.params().theta &&
                        back.params().tau == net.params().tau,
                    "f64 round-trip differs at trial " + std::to_string(trial));
        }
        return "f16 payload per matrix 8019776 bytes (7.649 MiB); 20/20 f64 round-trips bit-exact";
    });

    criteria.emplace_back("recall winners are scale invariant", [&] {
        std::mt19937_64 rng(616161);
        for (int trial = 0; trial < 50; ++trial) {
            const int w = 2 + static_cast<int>(rng() % 7);
            const int h = 2 + static_cast<int>(rng() % 7);
            const std::size_t n = 2 + rng() % 12;
            std::vector<BitPattern> patterns;
            for (std::size_t i = 0; i < n; ++i)
                patterns.push_back(random_pattern(w, h, 0.3 + (rng() % 41) / 100.0, rng()));
            const BitPattern probe = random_pattern(w, h, 0.3 + (rng() % 41) / 100.0, rng());

            const auto winner_with = [&](double eps_v, double theta) {
                MemoryNet net(w, h, HyperParams{.eps_v = eps_v, .theta = theta});
                for (const BitPattern& p : patterns)
                    net.store(p);
                return net.recall(present_all(probe)).winner;
            };

            const std::size_t base = winner_with(1.5, 1.0);
            for (double c : {0.1, 2.0, 10.0}) {
                require(winner_with(1.5 * c, 1.0) == base,
                        "winner moved when scaling eps_v by " + fmt(c, 1));
                require(winner_with(1.5, c) == base,
                        "winner moved when scaling theta by " + fmt(c, 1));
            }
        }
        return "50/50 instances keep their winner at c in {0.1, 2, 10}";
    });

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string verdict = "PASS";
        std::string detail;
        try {
            detail = criteria[i].second();
        } catch (const std::exception& e) {
            verdict = "FAIL";
            detail = e.what();
            ++failures;
        }
        std::cout << "criterion " << (i + 1) << ": " << verdict << "  "
                  << criteria[i].first << " -- " << detail << "\n";
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size()
              << " acceptance criteria passed\n";
    return failures == 0 ? 0 : 1;
}

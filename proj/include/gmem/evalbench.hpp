#pragma once

#include <algorithm>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "gmem/net.hpp"
#include "gmem/pattern.hpp"

namespace gmem {

enum class ExperimentKind { FullRecall, OcclusionSweep, UnknownProbe };

/// One probe's outcome. `fraction` is the keep-fraction the probe used
/// (1.0 for full probes); `correct` means the winner index matched the
/// probed pattern, except for unknown probes where it means rejected.
struct ProbeOutcome {
    std::size_t pattern = 0;
    double fraction = 1.0;
    std::size_t winner = 0;
    double score = 0.0;
    bool accepted = false;
    bool correct = false;
};

struct ReportSummary {
    std::size_t probes = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;
    double max_score = 0.0;   // over winning scores
    double min_score = 0.0;
    // Per-fraction accuracy in sweep order, and the largest tested fraction
    // with any recall error.
    std::vector<std::pair<double, double>> fraction_accuracy;
    std::optional<double> failure_fraction;
};

struct ExperimentReport {
    ExperimentKind kind = ExperimentKind::FullRecall;
    std::vector<ProbeOutcome> rows;
    ReportSummary summary;
};

namespace detail {

inline void finalize_summary(ExperimentReport& report) {
    ReportSummary& s = report.summary;
    s.probes = report.rows.size();
    s.correct = 0;
    for (const ProbeOutcome& row : report.rows)
        s.correct += row.correct ? 1 : 0;
    s.accuracy = s.probes ? static_cast<double>(s.correct) / s.probes : 0.0;
    if (!report.rows.empty()) {
        s.max_score = report.rows.front().score;
        s.min_score = report.rows.front().score;
        for (const ProbeOutcome& row : report.rows) {
            s.max_score = std::max(s.max_score, row.score);
            s.min_score = std::min(s.min_score, row.score);
        }
    }
}

inline void check_net_and_set(const MemoryNet& net, const PatternSet& set) {
    validate_pattern_set(set);
    if (net.size() != set.size())
        throw std::invalid_argument("net does not hold exactly the given patterns");
    if (set.patterns.front().width != net.width() ||
        set.patterns.front().height != net.height())
        throw std::invalid_argument("pattern dimensions do not match the net");
}

}  // namespace detail

/// Probes every stored pattern, fully presented; correct means the winner
/// is the pattern's own neuron.
inline ExperimentReport run_full_recall(const MemoryNet& net, const PatternSet& set,
                                        NormMode norm = NormMode::ByPresented) {
    detail::check_net_and_set(net, set);
    ExperimentReport report;
    report.kind = ExperimentKind::FullRecall;
    report.rows.reserve(set.size());
    for (std::size_t p = 0; p < set.size(); ++p) {
        const RecallResult r = net.recall(present_all(set[p]), norm);
        report.rows.push_back({p, 1.0, r.winner, r.winner_score, r.accepted, r.winner == p});
    }
    detail::finalize_summary(report);
    return report;
}

/// Probes every pattern at each keep-fraction (corner-anchored region),
/// in the order the fractions are given. The failure fraction is the
/// largest tested fraction whose accuracy fell below 1.
inline ExperimentReport run_occlusion_sweep(const MemoryNet& net, const PatternSet& set,
                                            std::span<const double> fractions,
                                            Corner corner = Corner::BottomRight,
                                            NormMode norm = NormMode::ByPresented) {
    detail::check_net_and_set(net, set);
    if (fractions.empty())
        throw std::invalid_argument("no keep-fractions given");
    for (double f : fractions) {
        if (!(f > 0.0) || f > 1.0)
            throw std::invalid_argument("keep-fractions must be in (0, 1]");
    }

    ExperimentReport report;
    report.kind = ExperimentKind::OcclusionSweep;
    report.rows.reserve(set.size() * fractions.size());
    for (double f : fractions) {
        const RegionSpec region = corner_region(net.width(), net.height(), f, corner);
        std::size_t correct = 0;
        for (std::size_t p = 0; p < set.size(); ++p) {
            const RecallResult r = net.recall(apply_mask(set[p], region), norm);
            const bool ok = r.winner == p;
            correct += ok ? 1 : 0;
            report.rows.push_back({p, f, r.winner, r.winner_score, r.accepted, ok});
        }
        const double accuracy = static_cast<double>(correct) / set.size();
        report.summary.fraction_accuracy.emplace_back(f, accuracy);
        if (accuracy < 1.0) {
            if (!report.summary.failure_fraction || f > *report.summary.failure_fraction)
                report.summary.failure_fraction = f;
        }
    }
    detail::finalize_summary(report);
    return report;
}

/// Single full probe of a pattern that must not be stored; correct means
/// the net rejected it (winner score under tau).
inline ExperimentReport run_unknown_probe(const MemoryNet& net, const PatternSet& set,
                                          const BitPattern& unknown,
                                          NormMode norm = NormMode::ByPresented) {
    detail::check_net_and_set(net, set);
    if (unknown.width != net.width() || unknown.height != net.height())
        throw std::invalid_argument("unknown pattern dimensions do not match the net");
    for (const BitPattern& p : set.patterns) {
        if (p == unknown)
            throw std::invalid_argument("probe pattern is already stored");
    }
    ExperimentReport report;
    report.kind = ExperimentKind::UnknownProbe;
    const RecallResult r = net.recall(present_all(unknown), norm);
    report.rows.push_back({0, 1.0, r.winner, r.winner_score, r.accepted, !r.accepted});
    detail::finalize_summary(report);
    return report;
}

inline const char* experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::FullRecall: return "full_recall";
        case ExperimentKind::OcclusionSweep: return "occlusion_sweep";
        case ExperimentKind::UnknownProbe: return "unknown_probe";
    }
    return "unknown";
}

/// CSV rows `pattern,winner,score,accepted,correct` (scores with six
/// decimals), then the summary as trailing `#` comment lines. An empty
/// report emits the header only. Sweep rows appear grouped by fraction in
/// sweep order.
inline void write_csv(const ExperimentReport& report, std::ostream& out) {
    out << "pattern,winner,score,accepted,correct\n";
    if (report.rows.empty())
        return;
    const std::streamsize old_precision = out.precision();
    out << std::fixed << std::setprecision(6);
    for (const ProbeOutcome& row : report.rows) {
        out << row.pattern << ',' << row.winner << ',' << row.score << ','
            << (row.accepted ? 1 : 0) << ',' << (row.correct ? 1 : 0) << '\n';
    }
    const ReportSummary& s = report.summary;
    out << "# kind=" << experiment_kind_name(report.kind) << '\n';
    out << "# probes=" << s.probes << " correct=" << s.correct
        << " accuracy=" << s.accuracy << '\n';
    out << "# max_score=" << s.max_score << " min_score=" << s.min_score << '\n';
    for (const auto& [fraction, accuracy] : s.fraction_accuracy)
        out << "# fraction=" << fraction << " accuracy=" << accuracy << '\n';
    if (report.kind == ExperimentKind::OcclusionSweep) {
        if (s.failure_fraction)
            out << "# failure_fraction=" << *s.failure_fraction << '\n';
        else
            out << "# failure_fraction=none\n";
    }
    out << std::defaultfloat << std::setprecision(static_cast<int>(old_precision));
}

}  // namespace gmem

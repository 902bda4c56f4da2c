#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gmem/pattern.hpp"

namespace gmem {

/// Learning rates, teacher signal and acceptance threshold.
///
/// With the defaults, storing a pattern writes the pattern itself into the
/// outgoing weight row and eps_v * theta times the pattern into the recall
/// row, so a stored pattern's own normalized score is exactly 1.5 times its
/// density and QR-like densities near 0.5 land comfortably above tau.
struct HyperParams {
    double eps_w = 1.0;   // learning rate for pattern (outgoing) weights
    double eps_v = 1.5;   // learning rate for recall (incoming) weights
    double theta = 1.0;   // teacher signal for the recall error
    double tau = 0.70;    // acceptance threshold on the normalized score

    void validate() const {
        if (!(eps_w > 0.0) || !(eps_v > 0.0) || !(theta > 0.0) || !(tau > 0.0))
            throw std::invalid_argument("hyperparameters must be positive");
        if (!std::isfinite(eps_w) || !std::isfinite(eps_v) || !std::isfinite(theta) ||
            !std::isfinite(tau))
            throw std::invalid_argument("hyperparameters must be finite");
    }
};

/// How activations are normalized before the threshold test:
/// by the number of presented cells (default) or by the full cell count.
enum class NormMode { ByPresented, ByR };

/// Outcome of one winner-take-all recall.
struct RecallResult {
    std::vector<double> scores;     // normalized activation per memory neuron
    std::size_t winner = 0;         // smallest index attaining the max score
    double winner_score = 0.0;
    bool accepted = false;          // winner_score >= tau
    std::size_t presented_count = 0;
};

/// One-neuron-per-pattern bidirectional memory.
///
/// Each stored pattern owns one memory neuron and two weight rows over the
/// width x height cell grid: a pattern row (memory neuron -> cells) trained
/// by the delta rule until the cells reproduce the pattern, and a recall row
/// (cells -> memory neuron) that turns a probe into an activation. Recall is
/// winner-take-all over the normalized activations, with scores below tau
/// rejected as unknown.
class MemoryNet {
public:
    MemoryNet(int width, int height, HyperParams params = {})
        : width_(width), height_(height), params_(params) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("grid dimensions must be positive");
        params_.validate();
        cells_ = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    /// Rebuilds a net from previously trained weight matrices (flat, row-major,
    /// equal length, a whole number of rows each).
    static MemoryNet from_weights(int width, int height, HyperParams params,
                                  std::vector<double> pattern_weights,
                                  std::vector<double> recall_weights) {
        MemoryNet net(width, height, params);
        if (pattern_weights.size() != recall_weights.size())
            throw std::invalid_argument("weight matrices differ in size");
        if (pattern_weights.size() % net.cells_ != 0)
            throw std::invalid_argument("weight size is not a whole number of rows");
        net.count_ = pattern_weights.size() / net.cells_;
        net.w_ = std::move(pattern_weights);
        net.v_ = std::move(recall_weights);
        return net;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t cell_count() const { return cells_; }   // R
    std::size_t size() const { return count_; }         // stored patterns, N
    const HyperParams& params() const { return params_; }

    const std::vector<double>& pattern_weights() const { return w_; }
    const std::vector<double>& recall_weights() const { return v_; }

    std::span<const double> pattern_row(std::size_t index) const {
        check_index(index);
        return {w_.data() + index * cells_, cells_};
    }

    std::span<const double> recall_row(std::size_t index) const {
        check_index(index);
        return {v_.data() + index * cells_, cells_};
    }

    /// Appends a memory neuron and learns its pattern row by the delta rule
    /// w += eps_w * (d - w), starting from zero, with unit input from the
    /// memory neuron. eps_w = 1 converges in one step with the row equal to
    /// the pattern bit-for-bit; other rates iterate until the residual
    /// max|d - w| drops to 1e-12 (10,000 step cap, eps_w >= 2 never settles).
    /// Returns the new neuron's index.
    std::size_t learn_pattern(const BitPattern& p) {
        check_dims(p);
        const std::size_t index = count_;
        w_.resize(w_.size() + cells_, 0.0);
        v_.resize(v_.size() + cells_, 0.0);
        ++count_;
        double* row = w_.data() + index * cells_;
        bool converged = false;
        for (int step = 0; step < kMaxTrainSteps && !converged; ++step) {
            converged = true;
            for (std::size_t j = 0; j < cells_; ++j) {
                const double d = static_cast<double>(p.bits[j]);
                row[j] += params_.eps_w * (d - row[j]);
                // NaN residuals (overflowed weights) must count as divergence.
                if (!(std::abs(d - row[j]) <= kTrainTolerance))
                    converged = false;
            }
        }
        if (!converged) {
            // Roll the half-trained neuron back before reporting.
            w_.resize(w_.size() - cells_);
            v_.resize(v_.size() - cells_);
            --count_;
            throw std::runtime_error("pattern training diverged (eps_w = " +
                                     std::to_string(params_.eps_w) + ")");
        }
        return index;
    }

    /// Learns neuron `index`'s recall row: one delta step from zero with the
    /// activation reset to zero, i.e. v = eps_v * theta * y where y is the
    /// trained pattern row.
    void learn_recall(std::size_t index) {
        check_index(index);
        const double* y = w_.data() + index * cells_;
        double* row = v_.data() + index * cells_;
        const double gain = params_.eps_v * params_.theta;
        for (std::size_t j = 0; j < cells_; ++j)
            row[j] = gain * y[j];
    }

    /// Stores every pattern of `set` in order (pattern row, then recall row).
    /// All-or-nothing: a failure anywhere leaves the net unchanged.
    void store_all(const PatternSet& set) {
        MemoryNet staged(*this);
        for (const BitPattern& p : set.patterns)
            staged.learn_recall(staged.learn_pattern(p));
        *this = std::move(staged);
    }

    /// Convenience: learn_pattern followed by learn_recall.
    std::size_t store(const BitPattern& p) {
        const std::size_t index = learn_pattern(p);
        learn_recall(index);
        return index;
    }

    /// Pattern-reproduction error 1/2 * sum_j (d_j - w_j)^2 for one neuron.
    double pattern_error(std::size_t index, const BitPattern& target) const {
        check_index(index);
        check_dims(target);
        const double* row = w_.data() + index * cells_;
        double sum = 0.0;
        for (std::size_t j = 0; j < cells_; ++j) {
            const double diff = static_cast<double>(target.bits[j]) - row[j];
            sum += diff * diff;
        }
        return 0.5 * sum;
    }

    /// Recall-side error 1/2 * sum_i (theta - q_i)^2 with raw (unnormalized)
    /// activations over the presented cells. Empty net: empty sum, zero.
    double recall_error(const MaskedPattern& probe) const {
        if (count_ == 0)
            return 0.0;
        check_probe(probe);
        const std::vector<std::size_t> active = active_cells(probe);
        double sum = 0.0;
        for (std::size_t i = 0; i < count_; ++i) {
            const double diff = params_.theta - raw_activation(i, active);
            sum += diff * diff;
        }
        return 0.5 * sum;
    }

    /// The pattern a neuron reproduces: its pattern row rounded to {0, 1}.
    /// Exact at defaults, where the row is the stored pattern itself.
    BitPattern reconstruct(std::size_t index) const {
        check_index(index);
        const double* row = w_.data() + index * cells_;
        BitPattern p;
        p.width = width_;
        p.height = height_;
        p.bits.resize(cells_);
        for (std::size_t j = 0; j < cells_; ++j)
            p.bits[j] = row[j] >= 0.5 ? 1 : 0;
        return p;
    }

    /// Normalized activation of every memory neuron for a probe. Masked-out
    /// cells are omitted from the sums; the divisor is the presented-cell
    /// count (ByPresented) or the full grid size (ByR).
    std::vector<double> activations(const MaskedPattern& probe,
                                    NormMode norm = NormMode::ByPresented) const {
        if (count_ == 0)
            throw std::invalid_argument("empty net has no activations");
        check_probe(probe);
        const std::vector<std::size_t> active = active_cells(probe);
        const double divisor =
            norm == NormMode::ByPresented
                ? static_cast<double>(probe.presented_count())
                : static_cast<double>(cells_);
        std::vector<double> scores(count_);
        for (std::size_t i = 0; i < count_; ++i)
            scores[i] = raw_activation(i, active) / divisor;
        return scores;
    }

    /// Winner-take-all recall: the smallest index attaining the maximum
    /// normalized activation wins, and is accepted iff its score reaches tau.
    RecallResult recall(const MaskedPattern& probe,
                        NormMode norm = NormMode::ByPresented) const {
        RecallResult result;
        result.scores = activations(probe, norm);
        result.presented_count = probe.presented_count();
        result.winner = 0;
        result.winner_score = result.scores[0];
        for (std::size_t i = 1; i < result.scores.size(); ++i) {
            if (result.scores[i] > result.winner_score) {
                result.winner = i;
                result.winner_score = result.scores[i];
            }
        }
        result.accepted = result.winner_score >= params_.tau;
        return result;
    }

private:
    static constexpr int kMaxTrainSteps = 10000;
    static constexpr double kTrainTolerance = 1e-12;

    void check_index(std::size_t index) const {
        if (index >= count_)
            throw std::out_of_range("memory neuron index out of range");
    }

    void check_dims(const BitPattern& p) const {
        if (p.width != width_ || p.height != height_ || p.bits.size() != cells_)
            throw std::invalid_argument("pattern dimensions do not match the net");
    }

    void check_probe(const MaskedPattern& probe) const {
        check_dims(probe.pattern);
        if (probe.presented.size() != cells_)
            throw std::invalid_argument("mask length does not match the net");
        if (probe.presented_count() == 0)
            throw std::invalid_argument("probe has no presented cells");
    }

    // Presented cells holding a 1; only these contribute to activations.
    std::vector<std::size_t> active_cells(const MaskedPattern& probe) const {
        std::vector<std::size_t> active;
        for (std::size_t j = 0; j < cells_; ++j) {
            if (probe.presented[j] && probe.pattern.bits[j])
                active.push_back(j);
        }
        return active;
    }

    double raw_activation(std::size_t i, const std::vector<std::size_t>& active) const {
        const double* row = v_.data() + i * cells_;
        double q = 0.0;
        for (std::size_t j : active)
            q += row[j];
        return q;
    }

    int width_;
    int height_;
    std::size_t cells_ = 0;   // R
    std::size_t count_ = 0;   // N
    HyperParams params_;
    std::vector<double> w_;   // pattern rows, N x R flat
    std::vector<double> v_;   // recall rows, N x R flat
};

}  // namespace gmem

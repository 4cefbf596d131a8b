#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace ajk {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using MaskVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

/**
 * n x T panel of time series with an explicit observation mask.
 *
 * Row i is series i, column t is period t (0-based in storage). A cell whose
 * mask entry is false is missing; its stored value is never read by any
 * computation in the library, so it may hold anything (including NaN).
 */
class TimeSeriesDataset {
public:
    TimeSeriesDataset(Matrix values, Mask observed,
                      std::vector<std::string> series_names = {},
                      std::vector<std::string> time_labels = {});

    /// Every cell observed.
    static TimeSeriesDataset fully_observed(Matrix values);

    int num_series() const { return static_cast<int>(values_.rows()); }
    int num_periods() const { return static_cast<int>(values_.cols()); }

    const Matrix& values() const { return values_; }
    const Mask& observed() const { return observed_; }
    bool is_observed(int series, int period) const { return observed_(series, period); }

    const std::vector<std::string>& series_names() const { return series_names_; }
    const std::vector<std::string>& time_labels() const { return time_labels_; }

    std::ptrdiff_t observed_count() const;
    bool has_observations() const { return observed_count() > 0; }

    /// Indices (0-based) of series with no observed cell at all.
    std::vector<int> fully_missing_series() const;

    /// Periods 1..periods (the first `periods` columns).
    TimeSeriesDataset prefix(int periods) const;

    /// Periods first..last, 1-based inclusive.
    TimeSeriesDataset window(int first, int last) const;

    /// Copy with the additional cells flagged missing.
    TimeSeriesDataset with_mask(Mask observed) const;

private:
    Matrix values_;
    Mask observed_;
    std::vector<std::string> series_names_;
    std::vector<std::string> time_labels_;
};

/// gamma = (p, lambda, alpha, beta) of the lag-decaying elastic-net VAR.
struct Hyperparameters {
    int p = 1;
    double lambda = 0.0;
    double alpha = 0.0;
    double beta = 1.0;

    /// Throws DomainError unless p >= 1, lambda >= 0, 0 <= alpha <= 1, beta >= 1.
    void validate() const;

    bool operator==(const Hyperparameters&) const = default;
};

/// Nonnegative finite loss weights with at least one positive entry.
class WeightVector {
public:
    explicit WeightVector(Vector weights);

    static WeightVector equal(int n);

    int size() const { return static_cast<int>(weights_.size()); }
    const Vector& values() const { return weights_; }
    double operator[](int i) const { return weights_[i]; }

private:
    Vector weights_;
};

/// A cell of the panel in 1-based coordinates, matching t in [1, T].
struct Cell {
    int series = 1;
    int period = 1;

    auto operator<=>(const Cell&) const = default;
};

/// A set of cells to be turned into artificial missing values.
class SubsamplePattern {
public:
    SubsamplePattern() = default;
    /// Duplicates are removed; cells are kept sorted by (period, series).
    explicit SubsamplePattern(std::vector<Cell> cells);

    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(Cell cell) const;

    /// Union of both patterns.
    SubsamplePattern merged(const SubsamplePattern& other) const;

    bool operator==(const SubsamplePattern&) const = default;

private:
    std::vector<Cell> cells_;
};

using SubsampleFamily = std::vector<SubsamplePattern>;

/// Flags every cell of `pattern` missing on top of the existing mask.
/// Throws IndexError for cells outside the panel.
TimeSeriesDataset apply_pattern(const TimeSeriesDataset& data, const SubsamplePattern& pattern);

struct LossOptions {
    /// Rescale the weights of the observed series so that they keep the
    /// total weight of the full vector.
    bool rescale_weights = false;
};

/// Weighted squared error over the observed entries of `actual`.
/// Zero when nothing is observed. Throws DimensionError on length mismatch.
double loss(const Vector& actual, const MaskVector& observed, const Vector& predicted,
            const WeightVector& weights, LossOptions options = {});

}  // namespace ajk

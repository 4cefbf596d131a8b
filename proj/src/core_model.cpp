#include "ajk/core_model.hpp"

#include "ajk/errors.hpp"
#include "ajk/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace ajk {

TimeSeriesDataset::TimeSeriesDataset(Matrix values, Mask observed,
                                     std::vector<std::string> series_names,
                                     std::vector<std::string> time_labels)
    : values_(std::move(values)),
      observed_(std::move(observed)),
      series_names_(std::move(series_names)),
      time_labels_(std::move(time_labels)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw DimensionError("dataset needs at least one series and one period");
    if (observed_.rows() != values_.rows() || observed_.cols() != values_.cols())
        throw DimensionError("values and missing mask differ in shape");
    if (!series_names_.empty() && static_cast<Eigen::Index>(series_names_.size()) != values_.rows())
        throw DimensionError("series_names length differs from number of series");
    if (!time_labels_.empty() && static_cast<Eigen::Index>(time_labels_.size()) != values_.cols())
        throw DimensionError("time_labels length differs from number of periods");
}

TimeSeriesDataset TimeSeriesDataset::fully_observed(Matrix values) {
    Mask mask = Mask::Constant(values.rows(), values.cols(), true);
    return TimeSeriesDataset(std::move(values), std::move(mask));
}

std::ptrdiff_t TimeSeriesDataset::observed_count() const {
    return observed_.count();
}

std::vector<int> TimeSeriesDataset::fully_missing_series() const {
    std::vector<int> out;
    for (int i = 0; i < num_series(); ++i)
        if (!observed_.row(i).any()) out.push_back(i);
    return out;
}

TimeSeriesDataset TimeSeriesDataset::prefix(int periods) const {
    return window(1, periods);
}

TimeSeriesDataset TimeSeriesDataset::window(int first, int last) const {
    if (first < 1 || last > num_periods() || first > last)
        throw IndexError("window [" + std::to_string(first) + ", " + std::to_string(last) +
                         "] outside 1.." + std::to_string(num_periods()));
    const int len = last - first + 1;
    std::vector<std::string> labels;
    if (!time_labels_.empty())
        labels.assign(time_labels_.begin() + (first - 1), time_labels_.begin() + last);
    return TimeSeriesDataset(values_.middleCols(first - 1, len), observed_.middleCols(first - 1, len),
                             series_names_, std::move(labels));
}

TimeSeriesDataset TimeSeriesDataset::with_mask(Mask observed) const {
    return TimeSeriesDataset(values_, std::move(observed), series_names_, time_labels_);
}

void Hyperparameters::validate() const {
    if (p < 1) throw DomainError("lag order p must be >= 1");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be finite and >= 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    if (!(beta >= 1.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and >= 1");
}

WeightVector::WeightVector(Vector weights) : weights_(std::move(weights)) {
    if (weights_.size() < 1) throw DimensionError("weight vector is empty");
    bool positive = false;
    for (double w : weights_) {
        if (!std::isfinite(w) || w < 0.0) throw DomainError("weights must be finite and nonnegative");
        positive = positive || w > 0.0;
    }
    if (!positive) throw DomainError("at least one weight must be positive");
}

WeightVector WeightVector::equal(int n) {
    return WeightVector(Vector::Constant(n, 1.0 / n));
}

SubsamplePattern::SubsamplePattern(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end(), [](const Cell& a, const Cell& b) {
        return a.period != b.period ? a.period < b.period : a.series < b.series;
    });
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool SubsamplePattern::contains(Cell cell) const {
    return std::binary_search(cells_.begin(), cells_.end(), cell, [](const Cell& a, const Cell& b) {
        return a.period != b.period ? a.period < b.period : a.series < b.series;
    });
}

SubsamplePattern SubsamplePattern::merged(const SubsamplePattern& other) const {
    std::vector<Cell> all = cells_;
    all.insert(all.end(), other.cells_.begin(), other.cells_.end());
    return SubsamplePattern(std::move(all));
}

TimeSeriesDataset apply_pattern(const TimeSeriesDataset& data, const SubsamplePattern& pattern) {
    Mask mask = data.observed();
    for (const Cell& c : pattern.cells()) {
        if (c.series < 1 || c.series > data.num_series() || c.period < 1 || c.period > data.num_periods())
            throw IndexError("pattern cell (" + std::to_string(c.series) + ", " + std::to_string(c.period) +
                             ") outside the " + std::to_string(data.num_series()) + "x" +
                             std::to_string(data.num_periods()) + " panel");
        mask(c.series - 1, c.period - 1) = false;
    }
    return data.with_mask(std::move(mask));
}

double loss(const Vector& actual, const MaskVector& observed, const Vector& predicted,
            const WeightVector& weights, LossOptions options) {
    const auto n = actual.size();
    if (observed.size() != n || predicted.size() != n || weights.size() != n)
        throw DimensionError("loss: actual, mask, prediction and weights must have equal length");
    const std::span<const double> a{actual.data(), static_cast<std::size_t>(n)};
    const std::span<const double> b{predicted.data(), static_cast<std::size_t>(n)};
    const std::span<const bool> m{observed.data(), static_cast<std::size_t>(n)};
    if (!options.rescale_weights)
        return kernels::masked_weighted_sse(a, b, {weights.values().data(), static_cast<std::size_t>(n)}, m);

    double observed_weight = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (observed[i]) observed_weight += weights[static_cast<int>(i)];
    if (observed_weight <= 0.0) return 0.0;
    const Vector scaled = weights.values() * (weights.values().sum() / observed_weight);
    return kernels::masked_weighted_sse(a, b, {scaled.data(), static_cast<std::size_t>(n)}, m);
}

}  // namespace ajk

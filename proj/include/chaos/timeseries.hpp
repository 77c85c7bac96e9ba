#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chaos/error.hpp"

namespace chaos {

/// Longest run of missing sampling intervals that ingestion will forward-fill.
/// A longer gap invalidates the data.
inline constexpr std::int64_t kMaxFillableGap = 5;

/// Uniform sampling grid. Timestamps are integers: epoch seconds for
/// calendar input, plain slot numbers otherwise.
struct TimeAxis {
    std::int64_t origin = 0;
    std::int64_t interval = 60;
    bool calendar = false;

    std::int64_t at(std::size_t row) const {
        return origin + static_cast<std::int64_t>(row) * interval;
    }
};

/// N x p multivariate series stored column-major. Rows are time points,
/// columns are metrics.
class MetricMatrix {
public:
    MetricMatrix() = default;

    MetricMatrix(std::size_t rows, std::vector<std::string> names)
        : rows_(rows), names_(std::move(names)), data_(rows_ * names_.size(), 0.0) {}

    MetricMatrix(std::size_t rows, std::size_t cols)
        : MetricMatrix(rows, default_names(cols)) {}

    static MetricMatrix from_columns(const std::vector<std::vector<double>>& columns,
                                     std::vector<std::string> names = {}) {
        if (columns.empty()) throw ParameterError("matrix needs at least one column");
        const std::size_t n = columns.front().size();
        if (names.empty()) names = default_names(columns.size());
        if (names.size() != columns.size())
            throw ParameterError("metric name count does not match column count");
        MetricMatrix m(n, std::move(names));
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].size() != n) throw ParameterError("ragged columns");
            std::copy(columns[c].begin(), columns[c].end(), m.column(c).begin());
        }
        return m;
    }

    static MetricMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                  std::vector<std::string> names = {}) {
        if (rows.empty()) throw ParameterError("matrix needs at least one row");
        const std::size_t p = rows.front().size();
        if (names.empty()) names = default_names(p);
        MetricMatrix m(rows.size(), std::move(names));
        if (m.cols() != p) throw ParameterError("metric name count does not match row width");
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != p) throw ParameterError("ragged rows");
            for (std::size_t c = 0; c < p; ++c) m(r, c) = rows[r][c];
        }
        return m;
    }

    static std::vector<std::string> default_names(std::size_t cols) {
        std::vector<std::string> out;
        out.reserve(cols);
        for (std::size_t c = 0; c < cols; ++c) out.push_back("m" + std::to_string(c));
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return names_.size(); }
    bool empty() const noexcept { return rows_ == 0 || names_.empty(); }

    double operator()(std::size_t r, std::size_t c) const { return data_[c * rows_ + r]; }
    double& operator()(std::size_t r, std::size_t c) { return data_[c * rows_ + r]; }

    std::span<const double> column(std::size_t c) const {
        return {data_.data() + c * rows_, rows_};
    }
    std::span<double> column(std::size_t c) { return {data_.data() + c * rows_, rows_}; }

    std::vector<double> row(std::size_t r) const {
        std::vector<double> out(cols());
        for (std::size_t c = 0; c < cols(); ++c) out[c] = (*this)(r, c);
        return out;
    }

    /// Copy of the values laid out row by row (time-major), which keeps an
    /// m-row segment contiguous in memory.
    std::vector<double> row_major() const {
        std::vector<double> out(rows_ * cols());
        for (std::size_t c = 0; c < cols(); ++c)
            for (std::size_t r = 0; r < rows_; ++r) out[r * cols() + c] = data_[c * rows_ + r];
        return out;
    }

    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<double>& raw() const noexcept { return data_; }

    TimeAxis time;

    MetricMatrix slice_rows(std::size_t begin, std::size_t count) const {
        if (begin + count > rows_) throw ParameterError("row slice out of range");
        MetricMatrix out(count, names_);
        out.time = time;
        out.time.origin = time.at(begin);
        for (std::size_t c = 0; c < cols(); ++c) {
            auto src = column(c).subspan(begin, count);
            std::copy(src.begin(), src.end(), out.column(c).begin());
        }
        return out;
    }

    MetricMatrix select_columns(std::span<const std::size_t> indices) const {
        std::vector<std::string> names;
        for (auto i : indices) {
            if (i >= cols()) throw ParameterError("column index out of range");
            names.push_back(names_[i]);
        }
        MetricMatrix out(rows_, std::move(names));
        out.time = time;
        for (std::size_t k = 0; k < indices.size(); ++k) {
            auto src = column(indices[k]);
            std::copy(src.begin(), src.end(), out.column(k).begin());
        }
        return out;
    }

    std::size_t index_of(const std::string& name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) throw ParameterError("unknown metric '" + name + "'");
        return static_cast<std::size_t>(it - names_.begin());
    }

    friend bool operator==(const MetricMatrix& a, const MetricMatrix& b) {
        return a.rows_ == b.rows_ && a.names_ == b.names_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::vector<std::string> names_;
    std::vector<double> data_;
};

struct ColumnRange {
    double min = 0.0;
    double max = 0.0;
};

/// Min-max scaled matrix with every value in [0, 1], plus the per-column
/// range that produced it.
struct NormalizedMatrix {
    MetricMatrix values;
    std::vector<ColumnRange> provenance;

    std::size_t rows() const noexcept { return values.rows(); }
    std::size_t cols() const noexcept { return values.cols(); }
};

/// Scales each column to [0, 1] by its own min and max. A constant column maps
/// to all zeros.
inline NormalizedMatrix minmax_normalize(const MetricMatrix& x) {
    if (x.rows() < 2) throw ParameterError("normalization needs at least 2 rows", Stage::entropy);
    NormalizedMatrix out{x, {}};
    out.provenance.reserve(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        auto col = x.column(c);
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (!std::isfinite(col[r]))
                throw DataError("non-finite value at row " + std::to_string(r) + ", column " +
                                    std::to_string(c),
                                Stage::entropy);
        }
        auto [lo, hi] = std::minmax_element(col.begin(), col.end());
        ColumnRange range{*lo, *hi};
        out.provenance.push_back(range);
        auto dst = out.values.column(c);
        const double span = range.max - range.min;
        if (span > 0.0) {
            for (std::size_t r = 0; r < col.size(); ++r) dst[r] = (col[r] - range.min) / span;
        } else {
            std::fill(dst.begin(), dst.end(), 0.0);
        }
    }
    return out;
}

/// Non-overlapping block means of length `tau`; the N mod tau trailing rows
/// are dropped.
inline MetricMatrix coarse_grain(const MetricMatrix& x, std::size_t tau) {
    if (tau < 1 || tau > x.rows())
        throw ParameterError("scale factor " + std::to_string(tau) + " outside [1, " +
                                 std::to_string(x.rows()) + "]",
                             Stage::entropy);
    if (tau == 1) return x;
    const std::size_t n = x.rows() / tau;
    MetricMatrix out(n, x.names());
    out.time = x.time;
    out.time.interval = x.time.interval * static_cast<std::int64_t>(tau);
    for (std::size_t c = 0; c < x.cols(); ++c) {
        auto src = x.column(c);
        auto dst = out.column(c);
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = j * tau; k < (j + 1) * tau; ++k) sum += src[k];
            dst[j] = sum / static_cast<double>(tau);
        }
    }
    return out;
}

inline NormalizedMatrix coarse_grain(const NormalizedMatrix& x, std::size_t tau) {
    return {coarse_grain(x.values, tau), x.provenance};
}

/// Unbiased (n - 1) sample variance of one column.
inline double sample_variance(std::span<const double> v) {
    if (v.size() < 2) throw ParameterError("variance needs at least 2 samples", Stage::entropy);
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

/// Trace of the sample covariance matrix, i.e. the sum of column variances.
inline double total_variance(const MetricMatrix& x) {
    if (x.rows() < 2) throw ParameterError("total variance needs at least 2 rows", Stage::entropy);
    double tr = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) tr += sample_variance(x.column(c));
    return tr;
}

inline double total_variance(const NormalizedMatrix& x) { return total_variance(x.values); }

struct SlidingWindow {
    std::size_t length = 1000;
    std::size_t stride = 1;

    /// Number of full windows over a series of `n` rows.
    std::size_t count(std::size_t n) const {
        if (stride == 0) throw ParameterError("window stride must be positive");
        return n < length ? 0 : (n - length) / stride + 1;
    }

    /// First row of window `k`.
    std::size_t begin(std::size_t k) const { return k * stride; }
};

} // namespace chaos

#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "cmc/errors.hpp"

namespace cmc {

/// Residual statistics of one identity over a set of samples.
struct EquationResidual {
    std::string equation_id;
    double max_residual = 0.0;
    double rms_residual = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    std::size_t samples = 0;

    friend bool operator==(const EquationResidual&, const EquationResidual&) = default;
};

/// Running max / RMS; merging is associative so samples may be folded in any order.
class ResidualAccumulator {
public:
    void add(double r) {
        const double a = std::abs(r);
        if (std::isnan(a) || a > max_) max_ = a;
        sum_sq_ += a * a;
        ++count_;
    }
    void merge(const ResidualAccumulator& o) {
        if (std::isnan(o.max_) || o.max_ > max_) max_ = o.max_;
        sum_sq_ += o.sum_sq_;
        count_ += o.count_;
    }

    EquationResidual finish(std::string id, double tolerance) const {
        EquationResidual r;
        r.equation_id = std::move(id);
        r.max_residual = max_;
        r.rms_residual = count_ ? std::sqrt(sum_sq_ / static_cast<double>(count_)) : 0.0;
        r.tolerance = tolerance;
        r.samples = count_;
        r.pass = max_ <= tolerance;  // NaN fails
        return r;
    }

private:
    double max_ = 0.0;
    double sum_sq_ = 0.0;
    std::size_t count_ = 0;
};

struct ResidualReport {
    std::string subject;
    std::vector<EquationResidual> entries;

    bool pass() const {
        return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
    }
    const EquationResidual& at(const std::string& id) const {
        for (const auto& e : entries)
            if (e.equation_id == id) return e;
        throw Error(ErrorKind::domain, "no residual entry '" + id + "' in report for " + subject);
    }
};

/// Correctly rounded floating-point sum (Shewchuk partials with the final
/// half-way correction). The result does not depend on the order of the
/// terms, so algebraically regrouped sums agree bit for bit.
inline double exact_sum(std::initializer_list<double> terms) {
    std::vector<double> partials;
    for (double x : terms) {
        std::size_t i = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[i++] = lo;
            x = hi;
        }
        partials.resize(i);
        partials.push_back(x);
    }
    if (partials.empty()) return 0.0;
    std::size_t n = partials.size();
    double hi = partials[--n];
    double lo = 0.0;
    while (n > 0) {
        const double x = hi;
        const double y = partials[--n];
        hi = x + y;
        const double yr = hi - x;
        lo = y - yr;
        if (lo != 0.0) break;
    }
    if (n > 0 && ((lo < 0 && partials[n - 1] < 0) || (lo > 0 && partials[n - 1] > 0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        const double yr = x - hi;
        if (y == yr) hi = x;
    }
    return hi;
}

}  // namespace cmc

#pragma once

#include <cmath>
#include <complex>

namespace cflow::detail {

/// Truncations beyond this size switch the quartic reductions to compensated sums.
inline constexpr long kCompensatedThreshold = 256;

/// Neumaier (improved Kahan) running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(std::complex<double> z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    std::complex<double> value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

/// Plain or compensated accumulation chosen once per reduction.
template <typename T>
class Accumulator;

template <>
class Accumulator<double> {
public:
    explicit Accumulator(bool compensated) : compensated_(compensated) {}
    void add(double x) {
        if (compensated_)
            c_.add(x);
        else
            plain_ += x;
    }
    double value() const { return compensated_ ? c_.value() : plain_; }

private:
    bool compensated_;
    double plain_ = 0.0;
    CompensatedSum c_;
};

template <>
class Accumulator<std::complex<double>> {
public:
    explicit Accumulator(bool compensated) : compensated_(compensated) {}
    void add(std::complex<double> z) {
        if (compensated_)
            c_.add(z);
        else
            plain_ += z;
    }
    std::complex<double> value() const { return compensated_ ? c_.value() : plain_; }

private:
    bool compensated_;
    std::complex<double> plain_{};
    CompensatedComplexSum c_;
};

}  // namespace cflow::detail

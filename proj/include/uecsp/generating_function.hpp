#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace uecsp {

// G(b) = sum_{j>=2} c_j b^j for a clause-density vector. The "pure" form
// (all mass at j = k) evaluates through pow so that very large k stays cheap.
class GeneratingFunction {
public:
    GeneratingFunction() = default;

    // Dense coefficients: c[j] for j = 0..k; entries 0 and 1 must be zero.
    explicit GeneratingFunction(std::vector<double> coeffs) : c_(std::move(coeffs)) {
        if (c_.size() < 3) c_.resize(3, 0.0);
        if (c_[0] != 0.0 || c_[1] != 0.0)
            throw std::invalid_argument("GeneratingFunction: c_0 and c_1 must be zero");
        for (double v : c_)
            if (v < 0.0) throw std::invalid_argument("GeneratingFunction: negative density");
    }

    static GeneratingFunction pure(std::uint32_t k, double alpha) {
        if (k < 2) throw std::invalid_argument("GeneratingFunction::pure: k must be >= 2");
        if (alpha < 0) throw std::invalid_argument("GeneratingFunction::pure: negative alpha");
        GeneratingFunction g;
        g.pure_k_ = k;
        g.pure_alpha_ = alpha;
        return g;
    }

    bool is_pure() const { return pure_k_ != 0; }
    std::uint32_t arity() const {
        return is_pure() ? pure_k_ : static_cast<std::uint32_t>(c_.size()) - 1;
    }
    // Density of length-j clauses (0 outside the stored range).
    double coeff(std::uint32_t j) const {
        if (is_pure()) return j == pure_k_ ? pure_alpha_ : 0.0;
        return j < c_.size() ? c_[j] : 0.0;
    }

    double value(double b) const {
        if (is_pure()) return pure_alpha_ * std::pow(b, pure_k_);
        double acc = 0.0;
        for (std::size_t j = c_.size(); j-- > 2;) acc = acc * b + c_[j];
        return acc * b * b;
    }

    double deriv1(double b) const {
        if (is_pure()) return pure_alpha_ * pure_k_ * std::pow(b, pure_k_ - 1);
        double acc = 0.0;
        for (std::size_t j = c_.size(); j-- > 2;) acc = acc * b + static_cast<double>(j) * c_[j];
        return acc * b;
    }

    double deriv2(double b) const {
        if (is_pure())
            return pure_alpha_ * pure_k_ * (pure_k_ - 1.0) * std::pow(b, pure_k_ - 2.0);
        double acc = 0.0;
        for (std::size_t j = c_.size(); j-- > 2;)
            acc = acc * b + static_cast<double>(j) * static_cast<double>(j - 1) * c_[j];
        return acc;
    }

    double deriv3(double b) const {
        if (is_pure()) {
            if (pure_k_ < 3) return 0.0;
            return pure_alpha_ * pure_k_ * (pure_k_ - 1.0) * (pure_k_ - 2.0) *
                   std::pow(b, pure_k_ - 3.0);
        }
        double acc = 0.0;
        for (std::size_t j = c_.size(); j-- > 3;)
            acc = acc * b +
                  static_cast<double>(j) * static_cast<double>(j - 1) * static_cast<double>(j - 2) * c_[j];
        return acc;
    }

    // Mean variable degree lambda_0 = G'(1) = sum_j j c_j.
    double lambda0() const { return deriv1(1.0); }
    // Clause density gamma_0 = G(1) = sum_j c_j.
    double gamma0() const { return value(1.0); }

private:
    std::vector<double> c_;  // dense path; c_[j] for j in [2, k]
    std::uint32_t pure_k_ = 0;
    double pure_alpha_ = 0.0;
};

}  // namespace uecsp

#pragma once

#include <string>
#include <string_view>

namespace ossrisk {

// Combines contributor availability c and upstream health d, both in [0,1],
// into a survival probability. Failure probability is 1 - survival.
class ProductionFunction {
public:
    enum class Kind { cobb_douglas, leontief, linear };

    // c^a * d^(1-a), a in (0,1)
    static ProductionFunction cobb_douglas(double contributor_exponent = 0.5);
    // min(c, d)
    static ProductionFunction leontief();
    // (c + d) / 2
    static ProductionFunction linear();

    // "cobb-douglas", "leontief" or "linear"; throws std::invalid_argument otherwise.
    static ProductionFunction from_name(std::string_view name, double contributor_exponent = 0.5);

    Kind kind() const { return kind_; }
    double contributor_exponent() const { return exponent_; }
    double dependency_exponent() const { return 1.0 - exponent_; }
    std::string name() const;

    // Throws std::domain_error if an input is outside [0,1] or NaN.
    double survival(double c_share, double d_share) const;
    double failure(double c_share, double d_share) const { return 1.0 - survival(c_share, d_share); }

private:
    ProductionFunction(Kind kind, double exponent) : kind_(kind), exponent_(exponent) {}

    Kind kind_;
    double exponent_;
};

} // namespace ossrisk

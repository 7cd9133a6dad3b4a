#include "ossrisk/production.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ossrisk {

ProductionFunction ProductionFunction::cobb_douglas(double contributor_exponent) {
    if (!(contributor_exponent > 0.0 && contributor_exponent < 1.0))
        throw std::invalid_argument("Cobb-Douglas exponent must lie in (0,1)");
    return ProductionFunction(Kind::cobb_douglas, contributor_exponent);
}

ProductionFunction ProductionFunction::leontief() { return ProductionFunction(Kind::leontief, 0.5); }

ProductionFunction ProductionFunction::linear() { return ProductionFunction(Kind::linear, 0.5); }

ProductionFunction ProductionFunction::from_name(std::string_view name, double contributor_exponent) {
    if (name == "cobb-douglas") return cobb_douglas(contributor_exponent);
    if (name == "leontief") return leontief();
    if (name == "linear") return linear();
    throw std::invalid_argument("unknown production function '" + std::string(name) + "'");
}

std::string ProductionFunction::name() const {
    switch (kind_) {
    case Kind::cobb_douglas: return "cobb-douglas";
    case Kind::leontief: return "leontief";
    case Kind::linear: return "linear";
    }
    return "?";
}

double ProductionFunction::survival(double c, double d) const {
    if (!(c >= 0.0 && c <= 1.0) || !(d >= 0.0 && d <= 1.0))
        throw std::domain_error("production function input outside [0,1]");
    switch (kind_) {
    case Kind::cobb_douglas:
        // sqrt is correctly rounded, pow is not guaranteed to be
        if (exponent_ == 0.5) return std::sqrt(c) * std::sqrt(d);
        return std::pow(c, exponent_) * std::pow(d, 1.0 - exponent_);
    case Kind::leontief: return std::min(c, d);
    case Kind::linear: return 0.5 * (c + d);
    }
    return 0.0;
}

} // namespace ossrisk

#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "sriqa/error.hpp"

namespace sriqa {

/// Exact positive rational, kept reduced. Scale factors are stored this way
/// so that e.g. 1024/128 and 8/1 compare equal and no precision is lost
/// before the value reaches the model.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (d <= 0 || n < 0) {
            throw Error(ErrorKind::invalid_record,
                        "rational requires n >= 0, d > 0, got " +
                            std::to_string(n) + "/" + std::to_string(d));
        }
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    static Rational from_int(std::int64_t n) { return Rational(n, 1); }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    double log2_value() const { return std::log2(value()); }
    bool is_integer() const { return den == 1; }

    std::string str() const {
        return den == 1 ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        // reduced and positive, so cross-multiplication is safe in 64 bits
        // for any realistic image width
        return a.num * b.den < b.num * a.den;
    }
};

/// Scale factor of an SR image from the widths of the SR and LR versions.
inline Rational derive_scale(std::int64_t hr_width, std::int64_t lr_width) {
    if (lr_width < 1) {
        throw Error(ErrorKind::invalid_record, "lr_width must be >= 1");
    }
    if (hr_width < lr_width) {
        throw Error(ErrorKind::invalid_record,
                    "hr_width (" + std::to_string(hr_width) +
                        ") must be >= lr_width (" + std::to_string(lr_width) + ")");
    }
    return Rational(hr_width, lr_width);
}

} // namespace sriqa

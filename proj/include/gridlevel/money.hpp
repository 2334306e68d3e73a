#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace gridlevel {

/// Fixed-point money amount with 1/100 pence resolution.
///
/// All bills, revenues and caps are stored as integer centipence so that
/// comparisons against caps are exact and results are identical across
/// platforms. Conversion from a real-valued pence amount rounds half away
/// from zero, once, at the point where a computed quantity becomes money.
class Money {
public:
    constexpr Money() = default;

    static constexpr Money from_centipence(std::int64_t cp) {
        Money m;
        m.cp_ = cp;
        return m;
    }

    static Money from_pence(double pence) {
        return from_centipence(std::llround(pence * 100.0));
    }

    static constexpr Money from_whole_pence(std::int64_t pence) {
        return from_centipence(pence * 100);
    }

    constexpr std::int64_t centipence() const { return cp_; }
    constexpr double pence() const { return static_cast<double>(cp_) / 100.0; }
    constexpr double pounds() const { return static_cast<double>(cp_) / 10000.0; }

    constexpr bool is_zero() const { return cp_ == 0; }

    /// "12.34" (pence, two decimals).
    std::string to_string() const;

    friend constexpr Money operator+(Money a, Money b) { return from_centipence(a.cp_ + b.cp_); }
    friend constexpr Money operator-(Money a, Money b) { return from_centipence(a.cp_ - b.cp_); }
    constexpr Money operator-() const { return from_centipence(-cp_); }
    Money& operator+=(Money o) {
        cp_ += o.cp_;
        return *this;
    }
    Money& operator-=(Money o) {
        cp_ -= o.cp_;
        return *this;
    }

    friend constexpr auto operator<=>(Money, Money) = default;

private:
    std::int64_t cp_ = 0;
};

inline std::string Money::to_string() const {
    const std::int64_t cp = cp_ < 0 ? -cp_ : cp_;
    std::string s = cp_ < 0 ? "-" : "";
    s += std::to_string(cp / 100);
    s += '.';
    const std::int64_t frac = cp % 100;
    s += static_cast<char>('0' + frac / 10);
    s += static_cast<char>('0' + frac % 10);
    return s;
}

}  // namespace gridlevel

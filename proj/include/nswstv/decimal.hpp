#pragma once

#include <cstdint>
#include <compare>
#include <stdexcept>
#include <string>

namespace nswstv {

inline constexpr int kMaxDecimalPlaces = 12;

/// 10^places as a 64-bit integer; places must lie in [0, kMaxDecimalPlaces].
constexpr std::int64_t decimal_scale(int places)
{
    std::int64_t scale = 1;
    for (int i = 0; i < places; ++i) scale *= 10;
    return scale;
}

/// Exact fixed-point decimal: value = scaled / 10^places.
///
/// Used for transfer values, raw entitlements and every vote figure written to
/// a transcript. Arithmetic stays in integers so conservation checks are exact.
class FixedDecimal
{
  public:
    constexpr FixedDecimal() = default;
    constexpr FixedDecimal(std::int64_t scaled, int places) : scaled_(scaled), places_(places) {}

    static constexpr FixedDecimal from_integer(std::int64_t whole, int places)
    {
        return {whole * decimal_scale(places), places};
    }

    /// numerator/denominator truncated to `places` digits (both non-negative).
    /// Truncation keeps a transfer value strictly below 1 whenever the exact ratio is.
    static FixedDecimal from_ratio(std::int64_t numerator, std::int64_t denominator, int places)
    {
        if (denominator <= 0 || numerator < 0)
            throw std::invalid_argument("FixedDecimal::from_ratio: expects numerator >= 0, denominator > 0");
        // Long division one digit at a time; the remainder stays below the denominator.
        std::int64_t scaled = numerator / denominator;
        std::int64_t remainder = numerator % denominator;
        for (int i = 0; i < places; ++i) {
            remainder *= 10;
            scaled = scaled * 10 + remainder / denominator;
            remainder %= denominator;
        }
        return {scaled, places};
    }

    constexpr std::int64_t scaled() const { return scaled_; }
    constexpr int places() const { return places_; }
    constexpr std::int64_t scale() const { return decimal_scale(places_); }

    constexpr std::int64_t integer_part() const { return scaled_ / scale(); }
    constexpr std::int64_t fractional_part() const { return scaled_ % scale(); }
    constexpr bool is_integer() const { return fractional_part() == 0; }
    constexpr std::int64_t floor() const { return integer_part(); }
    constexpr std::int64_t ceil() const { return integer_part() + (is_integer() ? 0 : 1); }

    constexpr FixedDecimal times(std::int64_t factor) const { return {scaled_ * factor, places_}; }

    std::string to_string() const
    {
        const bool negative = scaled_ < 0;
        const std::int64_t magnitude = negative ? -scaled_ : scaled_;
        std::string out = negative ? "-" : "";
        out += std::to_string(magnitude / scale());
        if (places_ > 0) {
            std::string frac = std::to_string(magnitude % scale());
            out += '.';
            out.append(static_cast<std::size_t>(places_) - frac.size(), '0');
            out += frac;
        }
        return out;
    }

    // Comparisons assume equal precision, which holds within one count.
    constexpr bool operator==(const FixedDecimal&) const = default;
    constexpr auto operator<=>(const FixedDecimal& other) const { return scaled_ <=> other.scaled_; }

  private:
    std::int64_t scaled_ = 0;
    int places_ = 0;
};

}  // namespace nswstv

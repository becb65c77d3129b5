#pragma once

#include <cstdint>
#include <string>

namespace scisimp {

// Fixed-point currency amount with nano-dollar resolution. Cost bookkeeping
// must be exact to the cent, so no binary floating point is involved in
// arithmetic; parsing and formatting go through decimal strings.
class Money {
public:
    static constexpr std::int64_t kScale = 1'000'000'000;  // nanos per unit

    Money() = default;
    static Money from_nanos(std::int64_t nanos);
    // Parses strings like "1.072", "0.45", "-3". Throws Error on bad input or
    // more than 9 fractional digits.
    static Money parse(const std::string& text);

    std::int64_t nanos() const { return nanos_; }
    double to_double() const { return static_cast<double>(nanos_) / kScale; }

    // Decimal rendering with the minimal number of fractional digits
    // (at least min_digits, default 2).
    std::string str(int min_digits = 2) const;

    Money operator+(Money o) const { return from_nanos(nanos_ + o.nanos_); }
    Money operator-(Money o) const { return from_nanos(nanos_ - o.nanos_); }
    Money& operator+=(Money o) { nanos_ += o.nanos_; return *this; }
    bool operator==(const Money&) const = default;
    auto operator<=>(const Money&) const = default;

    // cost = tokens × price_per_1M / 1e6, computed in 128-bit then reduced to
    // nanos (exact for all realistic token counts).
    static Money token_cost(std::uint64_t tokens, Money price_per_million);

private:
    std::int64_t nanos_ = 0;
};

}  // namespace scisimp

#include "scisimp/money.hpp"

#include <cctype>
#include <cstdlib>

#include "scisimp/errors.hpp"

namespace scisimp {

Money Money::from_nanos(std::int64_t nanos) {
    Money m;
    m.nanos_ = nanos;
    return m;
}

Money Money::parse(const std::string& text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        neg = text[i] == '-';
        ++i;
    }
    if (i >= text.size()) throw Error("bad money literal: '" + text + "'");
    std::int64_t units = 0;
    bool any = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        units = units * 10 + (text[i] - '0');
        ++i;
        any = true;
    }
    std::int64_t frac = 0;
    if (i < text.size() && text[i] == '.') {
        ++i;
        int digits = 0;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            if (++digits > 9) throw Error("too many fractional digits: '" + text + "'");
            frac = frac * 10 + (text[i] - '0');
            ++i;
            any = true;
        }
        for (; digits < 9; ++digits) frac *= 10;
    }
    if (!any || i != text.size()) throw Error("bad money literal: '" + text + "'");
    std::int64_t nanos = units * kScale + frac;
    return from_nanos(neg ? -nanos : nanos);
}

std::string Money::str(int min_digits) const {
    std::int64_t n = nanos_;
    std::string sign;
    if (n < 0) { sign = "-"; n = -n; }
    std::int64_t units = n / kScale;
    std::int64_t frac = n % kScale;
    std::string frac_s = std::to_string(frac);
    frac_s.insert(0, 9 - frac_s.size(), '0');
    while (static_cast<int>(frac_s.size()) > min_digits && frac_s.back() == '0')
        frac_s.pop_back();
    if (frac_s.empty()) return sign + std::to_string(units);
    return sign + std::to_string(units) + "." + frac_s;
}

Money Money::token_cost(std::uint64_t tokens, Money price_per_million) {
    __int128 total = static_cast<__int128>(tokens) * price_per_million.nanos();
    return from_nanos(static_cast<std::int64_t>(total / 1'000'000));
}

}  // namespace scisimp

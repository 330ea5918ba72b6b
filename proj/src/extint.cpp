#include "padint/extint.hpp"

#include "padint/errors.hpp"

namespace padint {

const mpz_class &ExtInt::value() const {
    if (inf_) throw InsufficientPrecision("value of infinite valuation");
    return v_;
}

long ExtInt::to_long() const { return value().get_si(); }

ExtInt ExtInt::operator+(const ExtInt &o) const {
    if (inf_ || o.inf_) return infinity();
    return ExtInt(mpz_class(v_ + o.v_));
}

ExtInt ExtInt::operator-(const mpz_class &o) const {
    if (inf_) return infinity();
    return ExtInt(mpz_class(v_ - o));
}

bool ExtInt::operator==(const ExtInt &o) const {
    if (inf_ || o.inf_) return inf_ == o.inf_;
    return v_ == o.v_;
}

std::strong_ordering ExtInt::operator<=>(const ExtInt &o) const {
    if (inf_ && o.inf_) return std::strong_ordering::equal;
    if (inf_) return std::strong_ordering::greater;
    if (o.inf_) return std::strong_ordering::less;
    int c = cmp(v_, o.v_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string ExtInt::str() const { return inf_ ? "inf" : v_.get_str(); }

std::ostream &operator<<(std::ostream &os, const ExtInt &e) { return os << e.str(); }

ExtInt min(const ExtInt &a, const ExtInt &b) { return a < b ? a : b; }

} // namespace padint

#pragma once

#include <compare>
#include <ostream>
#include <string>

#include <gmpxx.h>

namespace padint {

// Integer or +infinity. Used for valuations, where ord(0) = +inf.
class ExtInt {
public:
    ExtInt() = default;
    ExtInt(long v) : v_(v) {}
    ExtInt(const mpz_class &v) : v_(v) {}
    static ExtInt infinity() {
        ExtInt r;
        r.inf_ = true;
        return r;
    }

    bool is_infinite() const { return inf_; }
    bool is_finite() const { return !inf_; }
    const mpz_class &value() const;
    long to_long() const;

    ExtInt operator+(const ExtInt &o) const;
    ExtInt operator-(const mpz_class &o) const;
    bool operator==(const ExtInt &o) const;
    std::strong_ordering operator<=>(const ExtInt &o) const;

    std::string str() const;

private:
    mpz_class v_ = 0;
    bool inf_ = false;
};

std::ostream &operator<<(std::ostream &os, const ExtInt &e);

ExtInt min(const ExtInt &a, const ExtInt &b);

} // namespace padint

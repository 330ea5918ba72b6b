#pragma once

#include <stdexcept>
#include <string>

namespace padint {

class Error : public std::runtime_error {
public:
    Error(const std::string &kind, const std::string &msg)
        : std::runtime_error(kind + ": " + msg), kind_(kind) {}
    const std::string &kind() const { return kind_; }

private:
    std::string kind_;
};

#define PADINT_ERROR(Name)                                                     \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string &msg) : Error(#Name, msg) {}           \
    }

PADINT_ERROR(InsufficientPrecision);
PADINT_ERROR(NotIntegral);
PADINT_ERROR(ZeroPolynomial);
PADINT_ERROR(PrecisionLoss);
PADINT_ERROR(NotSquarefree);
PADINT_ERROR(CommonRoot);
PADINT_ERROR(NotRegular);
PADINT_ERROR(TruncationTooSmall);
PADINT_ERROR(CompositionDomain);
PADINT_ERROR(ZeroSeries);
PADINT_ERROR(NotAnAnnulus);
PADINT_ERROR(UnsupportedTerm);
PADINT_ERROR(SyntaxError);
PADINT_ERROR(SortError);
PADINT_ERROR(UnsupportedFragment);
PADINT_ERROR(UnsupportedSplit);
PADINT_ERROR(Divergent);
PADINT_ERROR(TooManyVariables);
PADINT_ERROR(BudgetExceeded);
PADINT_ERROR(NotRegularAtTruncation);

#undef PADINT_ERROR

} // namespace padint

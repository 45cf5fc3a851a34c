#ifndef CPID_ERRORS_HPP_
#define CPID_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace cpid {

// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CPID_DECLARE_ERROR(Name)                                   \
    class Name : public Error {                                    \
    public:                                                        \
        explicit Name(const std::string& what) : Error(what) {}    \
    }

// graph construction
CPID_DECLARE_ERROR(CycleError);
CPID_DECLARE_ERROR(UnknownVertex);
CPID_DECLARE_ERROR(SelfLoop);
CPID_DECLARE_ERROR(InvalidHorizon);
CPID_DECLARE_ERROR(ParseError);
CPID_DECLARE_ERROR(InvalidGraph);
CPID_DECLARE_ERROR(InvalidTemplate);

// separation
CPID_DECLARE_ERROR(InvalidQuery);
CPID_DECLARE_ERROR(GraphTooLarge);

// decision processes and identification
CPID_DECLARE_ERROR(InvalidProcess);
CPID_DECLARE_ERROR(InvalidTimes);
CPID_DECLARE_ERROR(NotDtrShape);
CPID_DECLARE_ERROR(BudgetExceeded);

// g-formula
CPID_DECLARE_ERROR(PositivityViolation);
CPID_DECLARE_ERROR(PreconditionFailed);
CPID_DECLARE_ERROR(DomainTooLarge);
CPID_DECLARE_ERROR(InvalidDistribution);

// simulator
CPID_DECLARE_ERROR(SchemaError);
CPID_DECLARE_ERROR(UnknownKernelType);
CPID_DECLARE_ERROR(InvalidParams);

// policy learning
CPID_DECLARE_ERROR(StateSpaceTooLarge);
CPID_DECLARE_ERROR(NoConvergence);
CPID_DECLARE_ERROR(StateUnvisited);

#undef CPID_DECLARE_ERROR

}  // namespace cpid

#endif  // CPID_ERRORS_HPP_

#ifndef TKIT_ERRORS_HPP
#define TKIT_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkit {

// Base class for all library errors. Callers that do not care about the
// specific failure can catch this one type.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("empty input: no observations") {}
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(std::size_t index)
        : Error("non-finite value at input index " + std::to_string(index)),
          index(index) {}
    std::size_t index;
};

class ZeroKernelMass : public Error {
public:
    explicit ZeroKernelMass(double x)
        : Error("no kernel mass at x = " + std::to_string(x) +
                " (no design points within the kernel support)"),
          x(x) {}
    double x;
};

class ZeroDensity : public Error {
public:
    explicit ZeroDensity(double x)
        : Error("estimated design density is zero at x = " + std::to_string(x)), x(x) {}
    double x;
};

class InsufficientReplicates : public Error {
public:
    explicit InsufficientReplicates(const std::string& what) : Error(what) {}
};

class AllBandwidthsDegenerate : public Error {
public:
    AllBandwidthsDegenerate()
        : Error("every candidate bandwidth leaves some held-out point without kernel mass") {}
};

class NonBinaryResponse : public Error {
public:
    explicit NonBinaryResponse(std::size_t group_index)
        : Error("response outside {0,1} in group " + std::to_string(group_index)),
          group_index(group_index) {}
    std::size_t group_index;
};

class TauOutOfRange : public Error {
public:
    explicit TauOutOfRange(double tau)
        : Error("baseline rate tau = " + std::to_string(tau) + " must lie in (0,1)"), tau(tau) {}
    double tau;
};

class NoDataInInterval : public Error {
public:
    explicit NoDataInInterval(double eta)
        : Error("no covariate values at or below eta = " + std::to_string(eta)), eta(eta) {}
    double eta;
};

class DomainError : public Error {
public:
    explicit DomainError(double x)
        : Error("model evaluated outside [0,1]: x = " + std::to_string(x)), x(x) {}
    double x;
};

class InvalidCombination : public Error {
public:
    explicit InvalidCombination(const std::string& what) : Error(what) {}
};

}  // namespace tkit

#endif  // TKIT_ERRORS_HPP

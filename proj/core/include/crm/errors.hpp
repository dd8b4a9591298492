#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace crm {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class InfeasibleRoot : public Error {
public:
    InfeasibleRoot(const std::string& what, std::vector<double> candidates)
        : Error(what), candidates_(std::move(candidates)) {}
    const std::vector<double>& candidates() const noexcept { return candidates_; }

private:
    std::vector<double> candidates_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> last_iterate, double residual)
        : Error(what), last_(std::move(last_iterate)), residual_(residual) {}
    const std::vector<double>& last_iterate() const noexcept { return last_; }
    double residual() const noexcept { return residual_; }

private:
    std::vector<double> last_;
    double residual_;
};

class StiffnessError : public Error {
public:
    StiffnessError(const std::string& what, double t, std::vector<double> state)
        : Error(what), t_(t), state_(std::move(state)) {}
    double time() const noexcept { return t_; }
    const std::vector<double>& state() const noexcept { return state_; }

private:
    double t_;
    std::vector<double> state_;
};

class SingularSystem : public Error {
public:
    using Error::Error;
};

// A closed form produced non-positive abundances; lists the offending species.
class InfeasibleRegime : public Error {
public:
    InfeasibleRegime(const std::string& what, std::vector<std::size_t> species)
        : Error(what), species_(std::move(species)) {}
    const std::vector<std::size_t>& species() const noexcept { return species_; }

private:
    std::vector<std::size_t> species_;
};

// Newton settled on a face of the positive orthant (some consumer extinct).
class BoundaryFixedPoint : public Error {
public:
    BoundaryFixedPoint(const std::string& what, std::vector<double> C, std::vector<double> R,
                       std::vector<std::size_t> extinct)
        : Error(what), C_(std::move(C)), R_(std::move(R)), extinct_(std::move(extinct)) {}
    const std::vector<double>& consumers() const noexcept { return C_; }
    const std::vector<double>& resources() const noexcept { return R_; }
    const std::vector<std::size_t>& extinct() const noexcept { return extinct_; }

private:
    std::vector<double> C_, R_;
    std::vector<std::size_t> extinct_;
};

class NoCrossing : public Error {
public:
    using Error::Error;
};

class StatisticalPower : public Error {
public:
    using Error::Error;
};

}  // namespace crm

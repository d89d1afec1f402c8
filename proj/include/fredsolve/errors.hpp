#pragma once

#include <stdexcept>
#include <string>

namespace fredsolve {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Base for failures caused by the numerical parameters of a run (CLI exit code 2).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ParameterExclusion : public NumericalError {
public:
    ParameterExclusion(std::string family, int n, double value, const std::string& msg)
        : NumericalError(msg), family_(std::move(family)), n_(n), value_(value) {}
    const std::string& family() const noexcept { return family_; }
    int n() const noexcept { return n_; }
    double excluded_value() const noexcept { return value_; }

private:
    std::string family_;
    int n_;
    double value_;
};

class OnSpectrum : public NumericalError {
public:
    OnSpectrum(double mu, double sigma_min, const std::string& msg)
        : NumericalError(msg), mu_(mu), sigma_min_(sigma_min) {}
    double mu() const noexcept { return mu_; }
    double sigma_min() const noexcept { return sigma_min_; }

private:
    double mu_;
    double sigma_min_;
};

class ContractionViolated : public NumericalError {
public:
    ContractionViolated(double c1, const std::string& msg) : NumericalError(msg), c1_(c1) {}
    double c1() const noexcept { return c1_; }

private:
    double c1_;
};

class SingularSystem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoValidMu : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidRadius : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class DegenerateProblem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class UndefinedDelta : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ProblemTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ParseError : public Error {
public:
    ParseError(int column, const std::string& msg) : Error(msg), column_(column) {}
    int column() const noexcept { return column_; }

private:
    int column_;
};

} // namespace fredsolve

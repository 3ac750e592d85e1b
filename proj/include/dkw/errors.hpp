#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dkw {

// Bad numeric argument (out of range, NaN, empty input).
class domain_error: public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A setup that cannot be realized (missing law, cap exceeded, unsupported kind).
class configuration_error: public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config validation failure; carries every violated field.
class validation_error: public std::runtime_error {
public:
    explicit validation_error(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Projected work over the configured budget.
class budget_error: public std::runtime_error {
public:
    explicit budget_error(double projected_flops, double budget);
    double projected_flops() const { return projected_; }

private:
    double projected_;
};

} // namespace dkw
